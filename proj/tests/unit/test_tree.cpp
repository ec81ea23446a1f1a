#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "lobtree/galton_watson.hpp"
#include "lobtree/phi_engine.hpp"
#include "lobtree/tree_ops.hpp"

using namespace lobtree;

namespace {

DisplacementDist two_atoms(double lo, double plo, double hi) {
  return DisplacementDist::discrete({{lo, Probability::from_double(plo)}, {hi, Probability::from_double(1 - plo)}});
}

DisplacementDist law_quarters() {
  return DisplacementDist::discrete({{-2, Probability::from_rational(Rational(3, 4))},
                                     {1, Probability::from_rational(Rational(1, 4))}});
}

std::vector<ColoredTree> random_trees(std::size_t count, double p, const DisplacementDist& dist,
                                      std::uint64_t seed, std::size_t max_nodes = 40) {
  std::vector<ColoredTree> out;
  RandomStream s(seed);
  GwSpec spec{p, dist, 8, max_nodes};
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    auto t = generate_gw(spec, s).tree;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 2 * t.size())(rng);
    out.push_back(phi_iterate(t, n));
  }
  return out;
}

}  // namespace

TEST(Tree, GreenMeasure) {
  RandomStream s(1);
  EXPECT_EQ(green_measure(generate_gw({0.5, two_atoms(-1, 0.5, 1)}, s).tree), Book::delta(0));

  ColoredTree t;
  t.add_child(0, 2, Color::green);
  t.add_child(0, 2, Color::green);
  EXPECT_EQ(green_measure(t), (Book{{0, 1}, {2, 2}}));

  ColoredTree dead(Color::red);
  dead.add_child(0, 1, Color::red);
  EXPECT_TRUE(green_measure(dead).empty());
}

TEST(Tree, PriceNode) {
  ColoredTree root_only;
  EXPECT_EQ(price_node(root_only), root_only.root());

  ColoredTree t;
  const NodeId a = t.add_child(0, 1, Color::green);
  const NodeId b = t.add_child(0, 3, Color::green);
  t.add_child(a, 1, Color::green);
  EXPECT_EQ(price_node(t), b);

  // u precedes v in lexicographic order and both sit at label 2
  ColoredTree tie;
  const NodeId x = tie.add_child(0, 1, Color::red);
  const NodeId u = tie.add_child(x, 1, Color::green);
  const NodeId v = tie.add_child(0, 2, Color::green);
  EXPECT_EQ(tie.label(u), tie.label(v));
  EXPECT_EQ(price_node(tie), v);

  ColoredTree dead(Color::red);
  EXPECT_FALSE(find_price_node(dead));
  EXPECT_THROW(price_node(dead), std::logic_error);
}

TEST(Tree, WhiteCounts) {
  ColoredTree t;
  for (int i = 0; i < 3; ++i) t.add_child(0, 0, Color::white);
  EXPECT_EQ(white_count(t), 3u);
  EXPECT_EQ(white_children(t, 1), 0u);

  ColoredTree m;
  m.add_child(0, 0, Color::green);
  m.add_child(0, 0, Color::white);
  m.add_child(0, 0, Color::white);
  EXPECT_EQ(white_children(m, 0), 2u);
  EXPECT_EQ(child_count(m, 0), 3u);
}

TEST(Tree, PhiExamples) {
  ColoredTree t;
  const NodeId c = t.add_child(0, -1, Color::white);
  auto t1 = phi(t);
  EXPECT_EQ(t1.color(c), Color::green);
  EXPECT_EQ(green_measure(t1), (Book{{-1, 1}, {0, 1}}));

  ColoredTree lone;
  const auto killed = phi(lone);
  EXPECT_EQ(killed.color(0), Color::red);
  EXPECT_TRUE(green_measure(killed).empty());

  ColoredTree dead(Color::red);
  dead.add_child(0, 1, Color::red);
  EXPECT_EQ(phi(dead), dead);
  ColoredTree copy = dead;
  EXPECT_EQ(phi_in_place(copy), PhiKind::idle);
}

TEST(Tree, Kappa) {
  EXPECT_EQ(kappa(ColoredTree{}, 10), 1u);
  ColoredTree t;
  t.add_child(0, 1, Color::white);
  EXPECT_EQ(kappa(t, 10), 3u);
  EXPECT_FALSE(kappa(t, 2));
}

TEST(Tree, Sigma) {
  EXPECT_EQ(sigma(ColoredTree{}), 0);
  ColoredTree t;
  t.add_child(0, 0, Color::green);
  t.add_child(0, 0, Color::red);
  EXPECT_EQ(sigma(t), 3);
  ColoredTree r(Color::red);
  r.add_child(0, 0, Color::red);
  EXPECT_EQ(sigma(r), 3);
}

TEST(Tree, DeleteWhite) {
  RandomStream s(3);
  const auto fresh = generate_gw({0.6, two_atoms(-1, 0.5, 1)}, s).tree;
  EXPECT_EQ(delete_white(fresh), ColoredTree{});

  ColoredTree t;
  t.add_child(0, 1, Color::white);
  EXPECT_EQ(delete_white(t).size(), 1u);
}

TEST(Tree, AppendAndKill) {
  const auto two = append_green_child(ColoredTree{}, 5);
  EXPECT_EQ(green_measure(two), (Book{{0, 1}, {5, 1}}));
  const auto dead = kill_price_node(ColoredTree{});
  EXPECT_EQ(dead.size(), 1u);
  EXPECT_EQ(dead.color(0), Color::red);
}

TEST(Tree, PromoteThenDeleteWhiteCommutes) {
  std::size_t checked = 0;
  for (const auto& t : random_trees(6000, 0.6, two_atoms(-1, 0.5, 1), 21)) {
    const auto g = find_price_node(t);
    if (!g) continue;
    const auto w = first_white_child(t, *g);
    if (!w) continue;
    ++checked;
    EXPECT_EQ(delete_white(promote_first_white(t)), append_green_child(delete_white(t), t.node(*w).edge));
  }
  EXPECT_GE(checked, 1000u);
}

TEST(Tree, ShiftRoot) {
  const auto trees = random_trees(50, 0.6, law_quarters(), 4);
  for (const auto& t : trees) {
    EXPECT_EQ(shift_root(t, 0), t);
    EXPECT_EQ(shift_root(shift_root(t, 2), -2), t);
    const auto s = shift_root(t, 3);
    for (NodeId v = 0; v < t.size(); ++v) EXPECT_EQ(s.label(v), t.label(v) + 3);
  }
}

TEST(Tree, Barrier) {
  ColoredTree pos;
  const NodeId a = pos.add_child(0, 1, Color::white);
  pos.add_child(a, 0, Color::white);
  EXPECT_EQ(barrier(pos, 0), pos);

  ColoredTree t;
  const NodeId neg = t.add_child(0, -1, Color::white);
  const NodeId up = t.add_child(0, 1, Color::white);
  t.add_child(neg, 5, Color::white);
  const NodeId kept = t.add_child(up, 0, Color::white);
  t.add_child(up, -2, Color::white);
  const auto x = barrier_at_root(t);
  EXPECT_EQ(x.size(), 3u);
  EXPECT_TRUE(find_by_path(x, path_of(t, kept)));
  EXPECT_FALSE(find_by_path(x, path_of(t, neg)));

  for (const auto& r : random_trees(1000, 0.6, law_quarters(), 5)) {
    std::size_t prev = r.size() + 1;
    for (double level : {-4.0, -2.0, -1.0, 0.0, 1.0, 3.0}) {
      const auto b = barrier(r, level);
      EXPECT_LE(b.size(), prev);
      EXPECT_TRUE(is_subtree_of(b, r));
      prev = b.size();
    }
  }
}

TEST(Tree, SubtreeAt) {
  for (const auto& t : random_trees(50, 0.6, law_quarters(), 6)) {
    EXPECT_EQ(subtree_at(t, t.root()), t);
    const auto order = t.preorder();
    const NodeId leaf = order.back();
    EXPECT_EQ(subtree_at(t, leaf).size(), 1u);
    EXPECT_EQ(subtree_at(t, leaf).root_label(), t.label(leaf));
    for (NodeId v : order) {
      const auto s = subtree_at(t, v);
      const auto base = path_of(t, v);
      for (NodeId w = 0; w < s.size(); ++w) {
        auto full = base;
        const auto rel = path_of(s, w);
        full.insert(full.end(), rel.begin(), rel.end());
        const auto orig = find_by_path(t, full);
        ASSERT_TRUE(orig);
        EXPECT_EQ(s.label(w), t.label(*orig));
      }
    }
  }
}

TEST(Tree, Rightmost) {
  ColoredTree t(Color::green, 0.5);
  t.add_child(0, -1, Color::white);
  t.add_child(0, 2, Color::white);
  EXPECT_EQ(rightmost(t, 0), 0.5);
  EXPECT_EQ(rightmost(t, 1), 2.5);
  EXPECT_EQ(rightmost(t, 2), -INFINITY);

  // Direct maximum over nodes at each depth on random trees.
  for (const auto& r : random_trees(200, 0.6, law_quarters(), 7, 200)) {
    std::map<std::size_t, double> best;
    for (NodeId v = 0; v < r.size(); ++v) {
      const auto d = r.node(v).depth;
      best[d] = best.count(d) ? std::max(best[d], r.label(v)) : r.label(v);
    }
    for (std::size_t d = 0; d <= max_depth(r) + 1; ++d) {
      EXPECT_EQ(rightmost(r, d), best.count(d) ? best[d] : -INFINITY);
    }
  }
}

// Rightmost position at depth 200 of a surviving walk with lattice steps,
// tracked as particle counts per position. Offspring of c particles is
// negative binomial; each child moves +1 with probability 1/4, else -2.
TEST(Tree, RightmostSpeedNegativeBelowThreshold) {
  const double p = 0.51;
  const int depth = 200;
  std::mt19937_64 rng(8);
  double sum = 0.0;
  int surviving = 0;
  while (surviving < 500) {
    std::map<long, long> gen{{0, 1}};
    for (int d = 0; d < depth && !gen.empty(); ++d) {
      std::map<long, long> next;
      for (auto [x, c] : gen) {
        const long kids = std::negative_binomial_distribution<long>(c, 1 - p)(rng);
        if (kids == 0) continue;
        const long up = std::binomial_distribution<long>(kids, 0.25)(rng);
        if (up) next[x + 1] += up;
        if (kids - up) next[x - 2] += kids - up;
      }
      gen.swap(next);
    }
    if (gen.empty()) continue;
    ++surviving;
    sum += static_cast<double>(gen.rbegin()->first) / depth;
  }
  EXPECT_LT(sum / surviving, 0.0);
}

TEST(Tree, OperatorsPreserveInvariants) {
  for (const auto& t : random_trees(1000, 0.6, law_quarters(), 9)) {
    ASSERT_TRUE(satisfies_tree_invariants(t));
    EXPECT_TRUE(satisfies_tree_invariants(phi(t)));
    EXPECT_TRUE(satisfies_tree_invariants(delete_white(t)));
    EXPECT_TRUE(satisfies_tree_invariants(shift_root(t, 1.5)));
    EXPECT_TRUE(satisfies_tree_invariants(barrier_at_root(t)));
    EXPECT_TRUE(satisfies_tree_invariants(barrier(t, 1)));
    if (t.green_count() > 0) {
      EXPECT_TRUE(satisfies_tree_invariants(append_green_child(t, 1)));
      EXPECT_TRUE(satisfies_tree_invariants(kill_price_node(t)));
    }
    for (NodeId v = 0; v < t.size(); ++v) {
      if (t.color(v) != Color::white) {
        EXPECT_TRUE(satisfies_tree_invariants(subtree_at(t, v)));
      }
    }
  }
}

TEST(Tree, PhiChangesOneColorForward) {
  auto rank = [](Color c) { return c == Color::white ? 0 : c == Color::green ? 1 : 2; };
  for (const auto& t : random_trees(1000, 0.6, two_atoms(-1, 0.5, 1), 10)) {
    const auto u = phi(t);
    ASSERT_EQ(u.size(), t.size());
    int changed = 0;
    for (NodeId v = 0; v < t.size(); ++v) {
      EXPECT_EQ(u.node(v).edge, t.node(v).edge);
      EXPECT_EQ(u.node(v).parent, t.node(v).parent);
      if (u.color(v) != t.color(v)) {
        ++changed;
        EXPECT_EQ(rank(u.color(v)), rank(t.color(v)) + 1);
      }
    }
    EXPECT_EQ(changed, t.green_count() > 0 ? 1 : 0);
    EXPECT_EQ(sigma(u), sigma(t) + (t.green_count() > 0 ? 1 : 0));
  }
}

TEST(GaltonWatson, RootOnlyFraction) {
  RandomStream s(11);
  const int n = 10000;
  int root_only = 0;
  for (int i = 0; i < n; ++i) root_only += generate_gw({0.01, two_atoms(-1, 0.5, 1), 1}, s).tree.size() == 1;
  const double sd = std::sqrt(0.99 * 0.01 / n);
  EXPECT_NEAR(static_cast<double>(root_only) / n, 0.99, 3 * sd);
}

TEST(GaltonWatson, MeanOffspring) {
  RandomStream s(12);
  const int n = 100000;
  const double p = 0.6;
  double total = 0;
  for (int i = 0; i < n; ++i) total += static_cast<double>(generate_gw({p, DisplacementDist::point(0), 1}, s).tree.size() - 1);
  const double sd = std::sqrt(p) / (1 - p) / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(total / n, p / (1 - p), 3 * sd);
}

TEST(GaltonWatson, NodeCap) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    AddressedStream s(seed);
    const auto key = AddressedStream::tree_root_key(0);
    const auto g = generate_gw({0.5, DisplacementDist::point(0), 64, 1}, s, key);
    EXPECT_EQ(g.tree.size(), 1u);
    EXPECT_EQ(g.truncated, s.coin(0.5, {key, 0}));
  }
  EXPECT_THROW(validate({0.5, DisplacementDist::point(0), 0, 10}), std::invalid_argument);
  EXPECT_THROW(validate({1.0, DisplacementDist::point(0), 5, 10}), std::invalid_argument);
}

TEST(GaltonWatson, LazyReveal) {
  GwSpec spec{0.5, DisplacementDist::point(0)};
  ColoredTree t;
  ScriptedStream heads;
  heads.heads(2);
  const auto c = lazy_reveal(t, 0, spec, heads);
  ASSERT_TRUE(c);
  EXPECT_EQ(t.color(*c), Color::white);
  EXPECT_EQ(t.node(*c).edge, 2.0);

  ScriptedStream k;
  k.heads(1).heads(-1).heads(3).tails();
  ColoredTree u;
  while (lazy_reveal(u, 0, spec, k)) {
  }
  EXPECT_EQ(child_count(u, 0), 3u);
  EXPECT_TRUE(u.node(0).finalized);
  ScriptedStream more;
  more.heads(1);
  EXPECT_THROW(lazy_reveal(u, 0, spec, more), std::logic_error);
}

TEST(GaltonWatson, TruncationDominates) {
  const auto dist = DisplacementDist::heavy_tail(-1.0, Probability::from_double(0.7), 1.5, 0.5);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    AddressedStream s(seed);
    const auto key = AddressedStream::tree_root_key(seed);
    const auto full = generate_gw({0.55, dist, 12, 5000}, s, key).tree;
    const auto cut = generate_gw({0.55, truncate(dist, 2.0), 12, 5000}, s, key).tree;
    ASSERT_EQ(full.size(), cut.size());
    for (NodeId v = 0; v < cut.size(); ++v) {
      const auto w = find_by_path(full, path_of(cut, v));
      ASSERT_TRUE(w);
      EXPECT_LE(cut.label(v), full.label(*w));
    }
    const auto pruned_full = barrier(full, 0);
    const auto pruned_cut = barrier(cut, 0);
    for (NodeId v = 0; v < pruned_cut.size(); ++v) {
      EXPECT_TRUE(find_by_path(pruned_full, path_of(pruned_cut, v)));
    }
  }
}

// The incremental engine and the copy-based operators see the same tree when
// both read the same addressed draws.
TEST(PhiEngine, AgreesWithEagerOperators) {
  const auto dist = DisplacementDist::discrete({{-1, Probability::from_double(0.25)},
                                                {0, Probability::from_double(0.5)},
                                                {1, Probability::from_double(0.25)}});
  const GwSpec spec{0.45, dist, 1000, 1'000'000};
  std::size_t compared = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    AddressedStream s(31, i);
    const auto key = AddressedStream::tree_root_key(i);
    const auto eager = generate_gw(spec, s, key);
    ASSERT_FALSE(eager.truncated);
    PhiEngine engine(spec, key);
    ColoredTree t = eager.tree;
    for (std::size_t n = 0; n < 2 * eager.tree.size(); ++n) {
      ASSERT_EQ(engine.tree(), delete_white(t)) << "tree " << i << " step " << n;
      ASSERT_EQ(engine.green_book(), green_measure(t));
      ASSERT_EQ(engine.price_node().has_value(), t.green_count() > 0);
      ++compared;
      const auto kind = phi_in_place(t);
      const auto st = engine.step(s);
      ASSERT_EQ(st.kind, kind);
    }
  }
  EXPECT_GT(compared, 1000u);
}

TEST(PhiEngine, ResetStartsFresh) {
  PhiEngine e({0.7, law_quarters()}, 5);
  RandomStream s(1);
  for (int i = 0; i < 50; ++i) e.step(s);
  e.reset(6);
  EXPECT_EQ(e.tree(), ColoredTree{});
  EXPECT_EQ(e.green_book(), Book::delta(0));
  EXPECT_EQ(e.steps(), 0u);
}

TEST(Tree, SnapshotRoundTrip) {
  for (const auto& t : random_trees(100, 0.6, law_quarters(), 13)) {
    std::stringstream ss;
    write_snapshot(ss, t);
    const auto back = read_snapshot(ss);
    EXPECT_EQ(back.size(), t.size());
    EXPECT_EQ(green_measure(back), green_measure(t));
    std::stringstream again;
    write_snapshot(again, back);
    std::stringstream first;
    write_snapshot(first, t);
    EXPECT_EQ(again.str(), first.str());
  }
}
