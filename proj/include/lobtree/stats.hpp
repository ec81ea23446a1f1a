#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace lobtree {

struct KsResult {
  double statistic = 0.0;  // sup |F_a - F_b|
  double p_value = 1.0;    // asymptotic
  std::size_t n = 0, m = 0;
};

/// Two-sample Kolmogorov-Smirnov test. Throws std::invalid_argument on an
/// empty sample.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov limiting survival function Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

/// Asymptotic rejection threshold for the two-sample statistic at level alpha.
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  double critical = 0.0;  // upper alpha quantile for dof
};

using CountTable = std::map<std::int64_t, std::uint64_t>;

/// Homogeneity test of two count tables over the same categories. Adjacent
/// categories are merged until every expected count is at least 5.
ChiSquareResult chi_square_two_sample(const CountTable& a, const CountTable& b, double alpha);

/// Goodness of fit of observed counts to probabilities (same length, summing
/// to 1). Adjacent cells are merged until every expected count is at least 5.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probs, double alpha);

struct Interval {
  double center = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion at confidence 0.95.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;  // Student-t, 95%
};
MeanCi mean_ci95(std::span<const double> values);

}  // namespace lobtree
