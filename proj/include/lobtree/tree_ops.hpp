#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lobtree/book.hpp"
#include "lobtree/colored_tree.hpp"

namespace lobtree {

/// Point measure of green-node labels.
Book green_measure(const ColoredTree& t);

/// Green node of largest label; on ties the last one in lexicographic order.
std::optional<NodeId> find_price_node(const ColoredTree& t);
/// As find_price_node, but throws std::logic_error when there is no green node.
NodeId price_node(const ColoredTree& t);

std::size_t white_children(const ColoredTree& t, NodeId v);
/// White children of the price node.
std::size_t white_count(const ColoredTree& t);
std::optional<NodeId> first_white_child(const ColoredTree& t, NodeId v);
/// Number of children (any color).
inline std::size_t child_count(const ColoredTree& t, NodeId v) { return t.children(v).size(); }

enum class PhiKind : std::uint8_t { idle, grew, killed };

/// One application of the dynamic: the price node's first white child turns
/// green, or the price node turns red if it has none; identity without greens.
PhiKind phi_in_place(ColoredTree& t);
ColoredTree phi(const ColoredTree& t);
ColoredTree phi_iterate(const ColoredTree& t, std::size_t n);
/// First n with no green node in phi_iterate(t, n), searching n <= cap.
std::optional<std::size_t> kappa(const ColoredTree& t, std::size_t cap);

/// |green| + 2|red| - 1.
long sigma(const ColoredTree& t);

/// Deletes every white node (and so every white subtree).
ColoredTree delete_white(const ColoredTree& t);
/// Adds a green child to the price node, after its existing children, with
/// edge label `edge`. Requires a green node.
ColoredTree append_green_child(const ColoredTree& t, double edge);
/// Turns the price node red. Requires a green node.
ColoredTree kill_price_node(const ColoredTree& t);
/// Turns the first white child of the price node green. Requires one.
ColoredTree promote_first_white(const ColoredTree& t);

/// Adds `delta` to the root label.
ColoredTree shift_root(const ColoredTree& t, double delta);
/// Removes every node with label < level together with its descendants.
/// The root is kept even when it lies below the level.
ColoredTree barrier(const ColoredTree& t, double level);
/// Barrier at the root's own label.
ColoredTree barrier_at_root(const ColoredTree& t);
/// Subtree rooted at v; v's label becomes the root label.
ColoredTree subtree_at(const ColoredTree& t, NodeId v);
/// Maximum label at depth n; -inf if no node has that depth.
double rightmost(const ColoredTree& t, std::size_t n);
std::size_t max_depth(const ColoredTree& t);

/// Ulam-Harris path (ranks from the root) of node v.
std::vector<std::uint32_t> path_of(const ColoredTree& t, NodeId v);
std::optional<NodeId> find_by_path(const ColoredTree& t, const std::vector<std::uint32_t>& path);

/// y is contained in t: every node of y exists in t under the same path and
/// shared edges carry the same labels.
bool is_subtree_of(const ColoredTree& y, const ColoredTree& t);
/// Every red node of y has as many children in y as in t (y must be a subtree of t).
bool red_child_counts_match(const ColoredTree& y, const ColoredTree& t);

/// Root is green or red, green/red nodes form a connected set containing the
/// root, and cached labels equal root label plus path sums.
bool satisfies_tree_invariants(const ColoredTree& t);

}  // namespace lobtree
