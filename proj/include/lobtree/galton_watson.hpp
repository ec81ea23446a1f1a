#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "lobtree/colored_tree.hpp"
#include "lobtree/displacement.hpp"
#include "lobtree/random_stream.hpp"

namespace lobtree {

enum class OffspringLaw : std::uint8_t {
  geometric,          // P(N = k) = (1 - p) p^k, k >= 0
  geometric_from_one  // P(N = k) = (1 - p) p^(k - 1), k >= 1; test control only
};

struct GwSpec {
  double p = 0.5;
  DisplacementDist dist = DisplacementDist::point(0.0);
  std::size_t max_depth = 64;
  std::size_t max_nodes = 100000;
  OffspringLaw law = OffspringLaw::geometric;
};

void validate(const GwSpec& spec);

/// Decides whether v has one more child. On heads a white child is appended
/// with a fresh edge label; on tails v's offspring is finalized. The draws
/// are addressed by (key of v, rank of the prospective child).
/// Throws std::logic_error if v is already finalized.
std::optional<NodeId> lazy_reveal(ColoredTree& tree, NodeId v, const GwSpec& spec,
                                  DrawSource& source);

struct GwTree {
  ColoredTree tree;
  bool truncated = false;  // some node had offspring beyond a cap
};

/// Eager breadth-first generation with green root at label 0 and white
/// descendants. Nodes at max_depth, and any node whose next child would
/// exceed max_nodes, are left unfinalized; the flag records whether one more
/// coin drawn there came up heads.
GwTree generate_gw(const GwSpec& spec, DrawSource& source, std::uint64_t root_key = 0);

}  // namespace lobtree
