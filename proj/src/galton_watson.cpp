#include "lobtree/galton_watson.hpp"

#include <deque>
#include <stdexcept>

namespace lobtree {

void validate(const GwSpec& spec) {
  if (!(spec.p > 0.0 && spec.p < 1.0)) throw std::invalid_argument("GwSpec: p must lie in (0,1)");
  if (spec.max_depth == 0 || spec.max_nodes == 0) throw std::invalid_argument("GwSpec: caps must be positive");
}

namespace {

std::uint32_t next_rank(const ColoredTree& tree, NodeId v) {
  const auto ch = tree.children(v);
  return ch.empty() ? 0 : tree.node(ch.back()).rank + 1;
}

bool draw_existence(const ColoredTree& tree, NodeId v, const GwSpec& spec, DrawSource& source) {
  const DrawAddress at{tree.node(v).key, next_rank(tree, v)};
  if (spec.law == OffspringLaw::geometric_from_one && at.rank == 0) return true;
  return source.coin(spec.p, at);
}

}  // namespace

std::optional<NodeId> lazy_reveal(ColoredTree& tree, NodeId v, const GwSpec& spec,
                                  DrawSource& source) {
  if (tree.node(v).finalized) throw std::logic_error("lazy_reveal: offspring already finalized");
  const std::uint64_t key = tree.node(v).key;
  const std::uint32_t rank = next_rank(tree, v);
  if (!draw_existence(tree, v, spec, source)) {
    tree.set_finalized(v);
    return std::nullopt;
  }
  const double x = source.displacement(spec.dist, DrawAddress{key, rank});
  const NodeId c = tree.add_child_with_rank(v, rank, x, Color::white);
  tree.set_key(c, child_key(key, rank));
  return c;
}

GwTree generate_gw(const GwSpec& spec, DrawSource& source, std::uint64_t root_key) {
  validate(spec);
  GwTree out{ColoredTree(Color::green, 0.0, root_key), false};
  auto& t = out.tree;
  std::deque<NodeId> queue{t.root()};
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (t.node(v).depth >= spec.max_depth) {
      out.truncated = out.truncated || draw_existence(t, v, spec, source);
      continue;
    }
    while (true) {
      if (t.size() >= spec.max_nodes) {
        out.truncated = out.truncated || draw_existence(t, v, spec, source);
        break;
      }
      const auto c = lazy_reveal(t, v, spec, source);
      if (!c) break;
      queue.push_back(*c);
    }
  }
  return out;
}

}  // namespace lobtree
