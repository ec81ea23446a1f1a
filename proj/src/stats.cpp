#include "lobtree/stats.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lobtree {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form converges where the alternating series does not.
    const double y = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
    double s = 0.0;
    for (int k = 1; k < 50; k += 2) s += std::pow(y, k * k);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
  }
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size();
  r.m = b.size();
  const double ne = std::sqrt(n * m / (n + m));
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((nn + mm) / (nn * mm));
}

namespace {

ChiSquareResult finish(double statistic, std::size_t dof, double alpha) {
  ChiSquareResult r;
  r.statistic = statistic;
  r.dof = dof;
  if (dof == 0) {
    r.p_value = 1.0;
    r.critical = 0.0;
    return r;
  }
  r.p_value = gsl_cdf_chisq_Q(statistic, static_cast<double>(dof));
  r.critical = gsl_cdf_chisq_Qinv(alpha, static_cast<double>(dof));
  return r;
}

}  // namespace

ChiSquareResult chi_square_two_sample(const CountTable& a, const CountTable& b, double alpha) {
  CountTable all;
  for (const auto& [k, c] : a) all[k] += c;
  for (const auto& [k, c] : b) all[k] += c;
  double na = 0, nb = 0;
  for (const auto& [k, c] : a) na += static_cast<double>(c);
  for (const auto& [k, c] : b) nb += static_cast<double>(c);
  if (na == 0 || nb == 0) throw std::invalid_argument("chi_square_two_sample: empty sample");
  const double total = na + nb;
  const double min_share = std::min(na, nb) / total;

  // Merge adjacent categories so that the smaller row expects at least 5.
  std::vector<std::pair<double, double>> cells;  // (count a, count b)
  double ca = 0, cb = 0;
  auto count_in = [](const CountTable& t, std::int64_t k) {
    const auto it = t.find(k);
    return it == t.end() ? 0.0 : static_cast<double>(it->second);
  };
  for (const auto& [k, c] : all) {
    ca += count_in(a, k);
    cb += count_in(b, k);
    if ((ca + cb) * min_share >= 5.0) {
      cells.emplace_back(ca, cb);
      ca = cb = 0;
    }
  }
  if (ca + cb > 0) {
    if (cells.empty()) {
      cells.emplace_back(ca, cb);
    } else {
      cells.back().first += ca;
      cells.back().second += cb;
    }
  }
  double stat = 0.0;
  for (const auto& [x, y] : cells) {
    const double col = x + y;
    const double ea = col * na / total, eb = col * nb / total;
    stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  return finish(stat, cells.size() - 1, alpha);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probs, double alpha) {
  if (observed.size() != probs.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_gof: size mismatch");
  }
  const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double o = 0, e = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += static_cast<double>(observed[i]);
    e += probs[i] * n;
    if (e >= 5.0) {
      cells.emplace_back(o, e);
      o = e = 0;
    }
  }
  if (o > 0 || e > 0) {
    if (cells.empty()) {
      cells.emplace_back(o, e);
    } else {
      cells.back().first += o;
      cells.back().second += e;
    }
  }
  double stat = 0.0;
  for (const auto& [obs, exp] : cells) {
    if (exp > 0) {
      stat += (obs - exp) * (obs - exp) / exp;
    } else if (obs > 0) {
      stat = INFINITY;
    }
  }
  return finish(stat, cells.size() - 1, alpha);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0.0, 0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (ph + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / denom;
  return {ph, std::max(0.0, center - half), std::min(1.0, center + half)};
}

MeanCi mean_ci95(std::span<const double> values) {
  MeanCi r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  r.half_width = gsl_cdf_tdist_Pinv(0.975, n - 1.0) * sd / std::sqrt(n);
  return r;
}

}  // namespace lobtree
