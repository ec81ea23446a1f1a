#include "lobtree/tree_ops.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

namespace lobtree {
namespace {

// Copies the subtree rooted at `from`, keeping ranks, and descending only
// into children accepted by `keep`.
ColoredTree copy_subtree(const ColoredTree& t, NodeId from,
                         const std::function<bool(NodeId)>& keep) {
  const auto& r = t.node(from);
  ColoredTree out(r.color, r.label, r.key);
  out.set_finalized(out.root(), r.finalized);
  std::vector<std::pair<NodeId, NodeId>> stack{{from, out.root()}};
  while (!stack.empty()) {
    const auto [src, dst] = stack.back();
    stack.pop_back();
    for (NodeId c : t.children(src)) {
      if (!keep(c)) continue;
      const auto& n = t.node(c);
      const NodeId id = out.add_child_with_rank(dst, n.rank, n.edge, n.color);
      out.set_key(id, n.key);
      out.set_finalized(id, n.finalized);
      stack.emplace_back(c, id);
    }
  }
  return out;
}

}  // namespace

Book green_measure(const ColoredTree& t) {
  Book b;
  for (NodeId v = 0; v < t.size(); ++v) {
    if (t.color(v) == Color::green) b.add(t.label(v));
  }
  return b;
}

std::optional<NodeId> find_price_node(const ColoredTree& t) {
  if (t.green_count() == 0) return std::nullopt;
  std::optional<NodeId> best;
  for (NodeId v : t.preorder()) {
    if (t.color(v) != Color::green) continue;
    if (!best || t.label(v) >= t.label(*best)) best = v;
  }
  return best;
}

NodeId price_node(const ColoredTree& t) {
  auto g = find_price_node(t);
  if (!g) throw std::logic_error("price_node: tree has no green node");
  return *g;
}

std::size_t white_children(const ColoredTree& t, NodeId v) {
  std::size_t n = 0;
  for (NodeId c : t.children(v)) n += t.color(c) == Color::white;
  return n;
}

std::size_t white_count(const ColoredTree& t) {
  return white_children(t, price_node(t));
}

std::optional<NodeId> first_white_child(const ColoredTree& t, NodeId v) {
  for (NodeId c : t.children(v)) {
    if (t.color(c) == Color::white) return c;
  }
  return std::nullopt;
}

PhiKind phi_in_place(ColoredTree& t) {
  const auto g = find_price_node(t);
  if (!g) return PhiKind::idle;
  if (const auto w = first_white_child(t, *g)) {
    t.set_color(*w, Color::green);
    return PhiKind::grew;
  }
  t.set_color(*g, Color::red);
  return PhiKind::killed;
}

ColoredTree phi(const ColoredTree& t) {
  ColoredTree out = t;
  phi_in_place(out);
  return out;
}

ColoredTree phi_iterate(const ColoredTree& t, std::size_t n) {
  ColoredTree out = t;
  for (std::size_t i = 0; i < n && out.green_count() > 0; ++i) phi_in_place(out);
  return out;
}

std::optional<std::size_t> kappa(const ColoredTree& t, std::size_t cap) {
  ColoredTree cur = t;
  for (std::size_t n = 0; n <= cap; ++n) {
    if (cur.green_count() == 0) return n;
    phi_in_place(cur);
  }
  return std::nullopt;
}

long sigma(const ColoredTree& t) {
  return static_cast<long>(t.green_count()) + 2 * static_cast<long>(t.red_count()) - 1;
}

ColoredTree delete_white(const ColoredTree& t) {
  if (t.color(t.root()) == Color::white) throw std::invalid_argument("delete_white: white root");
  return copy_subtree(t, t.root(), [&](NodeId c) { return t.color(c) != Color::white; });
}

ColoredTree append_green_child(const ColoredTree& t, double edge) {
  ColoredTree out = t;
  out.add_child(price_node(out), edge, Color::green);
  return out;
}

ColoredTree kill_price_node(const ColoredTree& t) {
  ColoredTree out = t;
  out.set_color(price_node(out), Color::red);
  return out;
}

ColoredTree promote_first_white(const ColoredTree& t) {
  ColoredTree out = t;
  const auto w = first_white_child(out, price_node(out));
  if (!w) throw std::logic_error("promote_first_white: price node has no white child");
  out.set_color(*w, Color::green);
  return out;
}

ColoredTree shift_root(const ColoredTree& t, double delta) {
  ColoredTree out = t;
  out.shift(delta);
  return out;
}

ColoredTree barrier(const ColoredTree& t, double level) {
  return copy_subtree(t, t.root(), [&](NodeId c) { return t.label(c) >= level; });
}

ColoredTree barrier_at_root(const ColoredTree& t) {
  return barrier(t, t.root_label());
}

ColoredTree subtree_at(const ColoredTree& t, NodeId v) {
  if (v >= t.size()) throw std::out_of_range("subtree_at: node not in tree");
  return copy_subtree(t, v, [](NodeId) { return true; });
}

double rightmost(const ColoredTree& t, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  for (NodeId v = 0; v < t.size(); ++v) {
    if (t.node(v).depth == n) best = std::max(best, t.label(v));
  }
  return best;
}

std::size_t max_depth(const ColoredTree& t) {
  std::size_t d = 0;
  for (NodeId v = 0; v < t.size(); ++v) d = std::max<std::size_t>(d, t.node(v).depth);
  return d;
}

std::vector<std::uint32_t> path_of(const ColoredTree& t, NodeId v) {
  std::vector<std::uint32_t> path;
  for (; t.node(v).parent != kNoNode; v = t.node(v).parent) path.push_back(t.node(v).rank);
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

std::optional<NodeId> child_with_rank(const ColoredTree& t, NodeId v, std::uint32_t rank) {
  const auto ch = t.children(v);
  const auto it = std::lower_bound(ch.begin(), ch.end(), rank,
                                   [&](NodeId c, std::uint32_t r) { return t.node(c).rank < r; });
  if (it == ch.end() || t.node(*it).rank != rank) return std::nullopt;
  return *it;
}

// Pairs each node of y with its counterpart in t; empty if y is not a subtree.
std::optional<std::vector<NodeId>> embed(const ColoredTree& y, const ColoredTree& t) {
  std::vector<NodeId> image(y.size(), kNoNode);
  image[y.root()] = t.root();
  std::vector<NodeId> stack{y.root()};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId c : y.children(u)) {
      const auto m = child_with_rank(t, image[u], y.node(c).rank);
      if (!m || t.node(*m).edge != y.node(c).edge) return std::nullopt;
      image[c] = *m;
      stack.push_back(c);
    }
  }
  return image;
}

}  // namespace

std::optional<NodeId> find_by_path(const ColoredTree& t, const std::vector<std::uint32_t>& path) {
  NodeId v = t.root();
  for (auto r : path) {
    const auto c = child_with_rank(t, v, r);
    if (!c) return std::nullopt;
    v = *c;
  }
  return v;
}

bool is_subtree_of(const ColoredTree& y, const ColoredTree& t) {
  return embed(y, t).has_value();
}

bool red_child_counts_match(const ColoredTree& y, const ColoredTree& t) {
  const auto image = embed(y, t);
  if (!image) return false;
  for (NodeId v = 0; v < y.size(); ++v) {
    if (y.color(v) == Color::red && y.children(v).size() != t.children((*image)[v]).size()) return false;
  }
  return true;
}

bool satisfies_tree_invariants(const ColoredTree& t) {
  if (t.color(t.root()) == Color::white) return false;
  std::size_t greens = 0, reds = 0;
  for (NodeId v = 0; v < t.size(); ++v) {
    const auto& n = t.node(v);
    greens += n.color == Color::green;
    reds += n.color == Color::red;
    if (n.parent == kNoNode) continue;
    if (n.color != Color::white && t.color(n.parent) == Color::white) return false;
    if (n.label != t.label(n.parent) + n.edge) return false;
    if (n.depth != t.node(n.parent).depth + 1) return false;
  }
  return greens == t.green_count() && reds == t.red_count();
}

}  // namespace lobtree
