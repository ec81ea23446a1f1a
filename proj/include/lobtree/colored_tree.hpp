#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace lobtree {

enum class Color : std::uint8_t { white, green, red };

const char* to_string(Color c);

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeNode {
  NodeId parent = kNoNode;
  std::vector<NodeId> children;  // increasing rank = lexicographic order
  std::uint32_t rank = 0;        // index among siblings in the full genealogy
  std::uint32_t depth = 0;
  double edge = 0.0;   // label on the edge from the parent
  double label = 0.0;  // root label + edge labels on the root path
  std::uint64_t key = 0;
  Color color = Color::white;
  bool finalized = false;  // offspring fully revealed
};

/// Rooted ordered tree with real edge labels and three node colors, stored
/// in an arena; the root is node 0. Node identity across trees is the
/// Ulam-Harris path of ranks, so operators that delete nodes keep ranks.
class ColoredTree {
 public:
  explicit ColoredTree(Color root_color = Color::green, double root_label = 0.0,
                       std::uint64_t root_key = 0);

  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode& node(NodeId v) const { return nodes_[v]; }
  double label(NodeId v) const { return nodes_[v].label; }
  Color color(NodeId v) const { return nodes_[v].color; }
  std::span<const NodeId> children(NodeId v) const { return nodes_[v].children; }
  double root_label() const { return nodes_[0].label; }

  /// Appends a child after all existing children; its rank is one past the
  /// last child's rank.
  NodeId add_child(NodeId parent, double edge, Color c);
  /// Appends a child with an explicit rank, which must exceed the last rank.
  NodeId add_child_with_rank(NodeId parent, std::uint32_t rank, double edge, Color c);

  void set_color(NodeId v, Color c);
  void set_finalized(NodeId v, bool finalized = true) { nodes_[v].finalized = finalized; }
  void set_key(NodeId v, std::uint64_t key) { nodes_[v].key = key; }
  /// Adds delta to the root label; every node label moves with it.
  void shift(double delta);

  std::size_t green_count() const { return greens_; }
  std::size_t red_count() const { return reds_; }

  /// Node ids in lexicographic (depth-first, rank) order.
  std::vector<NodeId> preorder() const;

  /// Same genealogy with the same ranks, edge labels, colors and root label.
  friend bool operator==(const ColoredTree& a, const ColoredTree& b);

 private:
  std::vector<TreeNode> nodes_;
  std::size_t greens_ = 0;
  std::size_t reds_ = 0;
};

/// Debug snapshot: one line `nodeId parentId edgeLabel color` per node in
/// lexicographic order, ids being preorder positions. The root line carries
/// parentId -1 and the root label in the edge column.
void write_snapshot(std::ostream& os, const ColoredTree& t);
/// Inverse of write_snapshot; ranks are assigned 0,1,... in line order.
ColoredTree read_snapshot(std::istream& is);

}  // namespace lobtree
