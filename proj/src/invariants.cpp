#include "lobtree/invariants.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "lobtree/format.hpp"
#include "lobtree/tree_ops.hpp"

namespace lobtree {

void InvariantReport::fail(std::string what) {
  if (failures++ == 0) first_failure = std::move(what);
}

void InvariantReport::merge(const InvariantReport& other) {
  trees += other.trees;
  checks += other.checks;
  if (other.failures > 0 && failures == 0) first_failure = other.first_failure;
  failures += other.failures;
}

std::vector<ColoredTree> enumerate_initial_trees(std::size_t max_nodes, const std::vector<double>& labels) {
  std::vector<ColoredTree> out;
  if (max_nodes == 0) return out;
  // Shapes are grown in preorder: each new node hangs off the rightmost path.
  std::vector<std::size_t> parents{0};
  std::vector<std::size_t> path{0};
  std::function<void()> grow = [&] {
    const std::size_t k = parents.size();
    std::vector<std::size_t> choice(k, 0);  // label index per non-root node
    while (true) {
      ColoredTree t;
      std::vector<NodeId> ids{t.root()};
      for (std::size_t v = 1; v < k; ++v) ids.push_back(t.add_child(ids[parents[v]], labels[choice[v]], Color::white));
      out.push_back(std::move(t));
      std::size_t pos = 1;
      while (pos < k && ++choice[pos] == labels.size()) choice[pos++] = 0;
      if (pos >= k) break;
    }
    if (k == max_nodes) return;
    const auto saved = path;
    for (std::size_t j = 0; j < saved.size(); ++j) {
      parents.push_back(saved[j]);
      path.assign(saved.begin(), saved.begin() + static_cast<long>(j) + 1);
      path.push_back(k);
      grow();
      parents.pop_back();
    }
    path = saved;
  };
  grow();
  return out;
}

InvariantReport check_orbit_identities(const ColoredTree& t) {
  InvariantReport r;
  r.trees = 1;
  ColoredTree cur = t;
  for (long k = 0;; ++k) {
    const ColoredTree y = delete_white(cur);
    ++r.checks;
    if (sigma(y) != k) r.fail("sigma of white-deleted iterate differs from k=" + std::to_string(k));

    const bool has_green = cur.green_count() > 0;
    ColoredTree expected = y;
    if (has_green) {
      const NodeId g = price_node(cur);
      if (const auto w = first_white_child(cur, g)) {
        expected = append_green_child(y, cur.node(*w).edge);
      } else {
        expected = kill_price_node(y);
      }
    }
    const ColoredTree next = phi(cur);
    const ColoredTree y_next = delete_white(next);
    r.checks += 3;
    if (!(y_next == expected)) r.fail("three-case rule fails at k=" + std::to_string(k));
    if (sigma(next) != sigma(cur) + (has_green ? 1 : 0)) r.fail("sigma increment fails at k=" + std::to_string(k));
    if (!satisfies_tree_invariants(next)) r.fail("tree invariants broken at k=" + std::to_string(k + 1));
    if (!has_green) {
      ++r.checks;
      if (sigma(y_next) == k + 1) r.fail("sigma keeps counting past the last green node");
      break;
    }
    cur = next;
  }
  return r;
}

namespace {

// Preorder serialization of ranks, edge labels and child counts.
std::string skeleton_key(const ColoredTree& t) {
  std::string key;
  for (NodeId v : t.preorder()) {
    key += std::to_string(t.node(v).rank);
    key += ':';
    key += format_real(t.node(v).edge);
    key += ':';
    key += std::to_string(t.children(v).size());
    key += ';';
  }
  return key;
}

std::string color_key(const ColoredTree& t) {
  std::string key;
  for (NodeId v : t.preorder()) key += to_string(t.color(v))[0];
  return key;
}

struct Interned {
  std::vector<std::size_t> history;                          // ids of the earlier iterates
  std::vector<std::pair<std::size_t, std::size_t>> red_arity;  // (preorder position, children)
  bool has_green = false;
};

}  // namespace

InvariantReport check_reconstruction(std::size_t max_nodes, const std::vector<double>& labels) {
  InvariantReport r;
  const auto trees = enumerate_initial_trees(max_nodes, labels);
  r.trees = trees.size();

  std::unordered_map<std::string, std::size_t> ids;
  std::vector<Interned> ys;
  std::unordered_map<std::string, std::vector<std::size_t>> by_skeleton;
  std::vector<std::vector<std::size_t>> orbit_of(trees.size());

  for (std::size_t ti = 0; ti < trees.size(); ++ti) {
    ColoredTree cur = trees[ti];
    std::vector<std::size_t> history;
    while (true) {
      const ColoredTree y = delete_white(cur);
      const std::string skeleton = skeleton_key(y);
      const auto [it, fresh] = ids.try_emplace(skeleton + '|' + color_key(y), ys.size());
      if (fresh) {
        Interned info;
        info.history = history;
        info.has_green = y.green_count() > 0;
        const auto order = y.preorder();
        for (std::size_t i = 0; i < order.size(); ++i) {
          if (y.color(order[i]) == Color::red) info.red_arity.emplace_back(i, y.children(order[i]).size());
        }
        ys.push_back(std::move(info));
        if (ys.back().has_green) by_skeleton[skeleton].push_back(it->second);
      } else {
        ++r.checks;
        if (ys[it->second].history != history) r.fail("white-deleted iterate with two histories");
      }
      if (y.green_count() == 0) break;
      orbit_of[ti].push_back(it->second);
      history.push_back(it->second);
      phi_in_place(cur);
    }
  }

  for (std::size_t ti = 0; ti < trees.size(); ++ti) {
    const ColoredTree& t = trees[ti];
    const auto order = t.preorder();
    const std::size_t k = order.size();
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < k; ++i) pos[order[i]] = i;
    std::vector<std::size_t> parent_pos(k, 0);
    for (std::size_t i = 1; i < k; ++i) parent_pos[i] = pos[t.node(order[i]).parent];

    std::vector<std::size_t> found;
    for (std::uint32_t mask = 0; mask < (1u << (k - 1)); ++mask) {
      auto in = [&](std::size_t i) { return i == 0 || ((mask >> (i - 1)) & 1u); };
      bool closed = true;
      for (std::size_t i = 1; i < k && closed; ++i) closed = !in(i) || in(parent_pos[i]);
      if (!closed) continue;

      std::string key;
      std::vector<std::size_t> arity;  // children inside the subtree, per subtree position
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < k; ++i) {
        if (!in(i)) continue;
        std::size_t c = 0;
        for (NodeId ch : t.children(order[i])) c += in(pos[ch]);
        key += std::to_string(t.node(order[i]).rank);
        key += ':';
        key += format_real(t.node(order[i]).edge);
        key += ':';
        key += std::to_string(c);
        key += ';';
        members.push_back(i);
      }
      const auto hit = by_skeleton.find(key);
      if (hit == by_skeleton.end()) continue;
      for (std::size_t id : hit->second) {
        ++r.checks;
        bool arity_ok = true;
        for (const auto& [p, n] : ys[id].red_arity) {
          arity_ok = arity_ok && t.children(order[members[p]]).size() == n;
        }
        if (arity_ok) found.push_back(id);
      }
    }
    std::sort(found.begin(), found.end());
    auto orbit = orbit_of[ti];
    std::sort(orbit.begin(), orbit.end());
    if (found != orbit) r.fail("containment criterion disagrees with the orbit of tree #" + std::to_string(ti));
  }
  return r;
}

}  // namespace lobtree
