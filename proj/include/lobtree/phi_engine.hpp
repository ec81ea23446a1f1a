#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "lobtree/book.hpp"
#include "lobtree/colored_tree.hpp"
#include "lobtree/galton_watson.hpp"
#include "lobtree/tree_ops.hpp"

namespace lobtree {

/// Order-maintenance list: O(1) order queries between entries, amortized
/// O(log n) insertion (Bender et al. tag relabelling).
class OrderList {
 public:
  using Handle = std::uint32_t;

  OrderList() { clear(); }
  void clear();

  Handle head() const { return 0; }
  Handle tail() const { return 1; }
  Handle insert_before(Handle pos);
  std::uint64_t tag(Handle h) const { return entries_[h].tag; }
  bool before(Handle a, Handle b) const { return entries_[a].tag < entries_[b].tag; }
  std::size_t size() const { return entries_.size() - 2; }

 private:
  struct Entry {
    std::uint64_t tag;
    Handle prev, next;
  };
  void relabel_around(Handle h);

  std::vector<Entry> entries_;
};

struct PhiStep {
  PhiKind kind = PhiKind::idle;
  NodeId node = kNoNode;  // node whose color changed
  double label = 0.0;     // its label
};

/// Iterates the dynamic on a lazily revealed tree. Offspring of the price
/// node is revealed one child at a time, so the tree never holds white nodes
/// and equals its own white-deleted form. The price node and the green
/// measure are maintained incrementally.
class PhiEngine {
 public:
  explicit PhiEngine(GwSpec spec, std::uint64_t root_key = 0);
  PhiEngine(const PhiEngine&) = delete;
  PhiEngine& operator=(const PhiEngine&) = delete;

  /// Starts over from a fresh green root at label 0.
  void reset(std::uint64_t root_key);

  PhiStep step(DrawSource& source);

  const ColoredTree& tree() const { return tree_; }
  const Book& green_book() const { return greens_book_; }
  std::optional<NodeId> price_node() const;
  std::size_t steps() const { return steps_; }
  const GwSpec& spec() const { return spec_; }

 private:
  struct LexLess {
    const PhiEngine* engine;
    bool operator()(NodeId a, NodeId b) const {
      return engine->order_.before(engine->open_[a], engine->open_[b]);
    }
  };
  using GreenSet = std::set<NodeId, LexLess>;

  void add_green(NodeId v);
  void remove_green(NodeId v);

  GwSpec spec_;
  ColoredTree tree_;
  OrderList order_;
  std::vector<OrderList::Handle> open_, close_;
  std::map<double, GreenSet> greens_;
  Book greens_book_;
  std::size_t steps_ = 0;
};

}  // namespace lobtree
