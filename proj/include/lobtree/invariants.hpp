#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lobtree/colored_tree.hpp"

namespace lobtree {

/// Every ordered tree with 1..max_nodes nodes and every assignment of the
/// given edge labels, colored with a green root and white descendants.
std::vector<ColoredTree> enumerate_initial_trees(std::size_t max_nodes, const std::vector<double>& labels);

struct InvariantReport {
  std::size_t trees = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
  void fail(std::string what);
  void merge(const InvariantReport& other);
};

/// Along the orbit t, phi(t), phi(phi(t)), ... up to one step past the first
/// tree without a green node, checks: sigma of the white-deleted iterate
/// equals k exactly for k <= kappa; sigma grows by one per step with a green
/// node; the white-deleted iterate follows the three-case rule (unchanged,
/// green child appended with the revealed edge label, price node killed).
InvariantReport check_orbit_identities(const ColoredTree& t);

/// Brute-force check of the reconstruction property over all initial trees
/// with up to max_nodes nodes: for every tree t and every white-deleted
/// iterate y (with a green node) realized by some initial tree, y lies on
/// the orbit of t iff y is contained in t and every red node of y has the
/// same number of children in y and t. Also checks that each such y has a
/// single history.
InvariantReport check_reconstruction(std::size_t max_nodes, const std::vector<double>& labels);

}  // namespace lobtree
