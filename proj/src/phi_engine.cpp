#include "lobtree/phi_engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lobtree {

namespace {
constexpr std::uint64_t kTagLimit = std::uint64_t{1} << 62;
constexpr OrderList::Handle kNone = std::numeric_limits<OrderList::Handle>::max();
}  // namespace

void OrderList::clear() {
  entries_.clear();
  entries_.push_back({0, kNone, 1});
  entries_.push_back({kTagLimit, 0, kNone});
}

OrderList::Handle OrderList::insert_before(Handle pos) {
  if (pos == head() || pos >= entries_.size()) throw std::out_of_range("OrderList: bad position");
  const Handle prev = entries_[pos].prev;
  const auto h = static_cast<Handle>(entries_.size());
  entries_.push_back({0, prev, pos});
  entries_[prev].next = h;
  entries_[pos].prev = h;
  const std::uint64_t lo = entries_[prev].tag, hi = entries_[pos].tag;
  if (hi - lo >= 2) {
    entries_[h].tag = lo + (hi - lo) / 2;
  } else {
    relabel_around(h);
  }
  return h;
}

void OrderList::relabel_around(Handle h) {
  const Handle prev = entries_[h].prev;
  for (int i = 1; i <= 62; ++i) {
    const std::uint64_t width = std::uint64_t{1} << i;
    const std::uint64_t lo = entries_[prev].tag & ~(width - 1);
    const std::uint64_t hi = lo + width;
    Handle first = prev;
    std::uint64_t count = 2;  // prev and h
    while (entries_[first].prev != kNone && entries_[entries_[first].prev].tag >= lo) {
      first = entries_[first].prev;
      ++count;
    }
    for (Handle r = entries_[h].next; r != kNone && entries_[r].tag < hi; r = entries_[r].next) ++count;
    if (static_cast<double>(count) > std::pow(1.0 / 0.7, i)) continue;
    const std::uint64_t gap = width / count;
    std::uint64_t tag = lo;
    for (Handle e = first; count > 0; e = entries_[e].next, --count, tag += gap) entries_[e].tag = tag;
    return;
  }
  throw std::length_error("OrderList: tag space exhausted");
}

PhiEngine::PhiEngine(GwSpec spec, std::uint64_t root_key) : spec_(std::move(spec)) {
  validate(spec_);
  reset(root_key);
}

void PhiEngine::reset(std::uint64_t root_key) {
  tree_ = ColoredTree(Color::green, 0.0, root_key);
  order_.clear();
  greens_.clear();
  greens_book_ = Book();
  open_.assign(1, order_.insert_before(order_.tail()));
  close_.assign(1, order_.insert_before(order_.tail()));
  steps_ = 0;
  add_green(tree_.root());
}

std::optional<NodeId> PhiEngine::price_node() const {
  if (greens_.empty()) return std::nullopt;
  return *greens_.rbegin()->second.rbegin();
}

void PhiEngine::add_green(NodeId v) {
  greens_.try_emplace(tree_.label(v), LexLess{this}).first->second.insert(v);
  greens_book_.add(tree_.label(v));
}

void PhiEngine::remove_green(NodeId v) {
  const auto it = greens_.find(tree_.label(v));
  it->second.erase(v);
  if (it->second.empty()) greens_.erase(it);
  greens_book_.remove_one(tree_.label(v));
}

PhiStep PhiEngine::step(DrawSource& source) {
  ++steps_;
  const auto g = price_node();
  if (!g) return {};
  if (!tree_.node(*g).finalized) {
    if (const auto c = lazy_reveal(tree_, *g, spec_, source)) {
      open_.push_back(order_.insert_before(close_[*g]));
      close_.push_back(order_.insert_before(close_[*g]));
      tree_.set_color(*c, Color::green);
      add_green(*c);
      return {PhiKind::grew, *c, tree_.label(*c)};
    }
  }
  tree_.set_color(*g, Color::red);
  remove_green(*g);
  return {PhiKind::killed, *g, tree_.label(*g)};
}

}  // namespace lobtree
