#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lobtree/stats.hpp"

using namespace lobtree;

namespace {

// Sup distance between empirical CDFs evaluated at every breakpoint.
double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  double best = 0.0;
  for (double x : pts) {
    const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [&](double v) { return v <= x; })) / a.size();
    const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [&](double v) { return v <= x; })) / b.size();
    best = std::max(best, std::abs(fa - fb));
  }
  return best;
}

}  // namespace

TEST(Stats, KsExamples) {
  EXPECT_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}).statistic, 0.0);
  EXPECT_EQ(ks_two_sample({0, 0, 0}, {1, 1, 1}).statistic, 1.0);
  EXPECT_EQ(ks_two_sample({0, 1}, {1, 2}).statistic, 0.5);
  EXPECT_THROW(ks_two_sample({}, {1}), std::invalid_argument);
}

TEST(Stats, KsMatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> len(1, 40), val(-5, 5);
    std::vector<double> a(len(rng)), b(len(rng));
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng) + 0.5 * (trial % 2);
    EXPECT_NEAR(ks_two_sample(a, b).statistic, ks_brute(a, b), 1e-15);
  }
}

TEST(Stats, KolmogorovTail) {
  EXPECT_NEAR(kolmogorov_q(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_q(1.6276), 0.01, 1e-4);
  EXPECT_EQ(kolmogorov_q(0.0), 1.0);
  EXPECT_NEAR(ks_critical_value(100, 100, 0.05), 1.3581 * std::sqrt(0.02), 1e-4);
}

TEST(Stats, ChiSquareIdenticalTables) {
  const CountTable t{{0, 100}, {1, 200}, {2, 300}};
  const auto r = chi_square_two_sample(t, t, 0.01);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 2u);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_NEAR(r.critical, 9.210340371976184, 1e-9);
}

TEST(Stats, ChiSquareDetectsShift) {
  const CountTable a{{0, 500}, {1, 500}};
  const CountTable b{{0, 400}, {1, 600}};
  const auto r = chi_square_two_sample(a, b, 0.01);
  // 2x2 table: N (ad - bc)^2 / (row and column products)
  const double expected = 2000.0 * std::pow(500.0 * 600 - 500.0 * 400, 2) / (1000.0 * 1000 * 900 * 1100);
  EXPECT_NEAR(r.statistic, expected, 1e-9);
  EXPECT_GT(r.statistic, r.critical);
}

TEST(Stats, ChiSquareGofMergesSparseCells) {
  const std::vector<std::uint64_t> obs{50, 48, 2, 0};
  const std::vector<double> probs{0.5, 0.48, 0.015, 0.005};
  const auto r = chi_square_gof(obs, probs, 0.01);
  EXPECT_EQ(r.dof, 1u);
  EXPECT_LT(r.statistic, r.critical);
}

TEST(Stats, WilsonInterval) {
  // closed form for 0 successes: hi = z^2 / (n + z^2)
  const double z = 1.959963984540054;
  const auto zero = wilson_interval(0, 100);
  EXPECT_NEAR(zero.lo, 0.0, 1e-15);
  EXPECT_NEAR(zero.hi, z * z / (100 + z * z), 1e-12);
  const auto half = wilson_interval(50, 100);
  EXPECT_NEAR(half.lo + half.hi, 1.0, 1e-12);
  EXPECT_NEAR(half.center, 0.5, 1e-15);
  const auto all = wilson_interval(100, 100);
  EXPECT_NEAR(all.hi, 1.0, 1e-12);
}

TEST(Stats, MeanCi) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto ci = mean_ci95(v);
  EXPECT_EQ(ci.mean, 3.0);
  // t(0.975, 4) = 2.7764451051977987, sd = sqrt(2.5)
  EXPECT_NEAR(ci.half_width, 2.7764451051977987 * std::sqrt(2.5) / std::sqrt(5.0), 1e-9);
  const std::vector<double> flat{1, 1, 1};
  EXPECT_EQ(mean_ci95(flat).half_width, 0.0);
}
