#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lobtree/random_stream.hpp"
#include "lobtree/rational.hpp"

namespace lobtree {

struct Atom {
  double value = 0.0;
  Probability prob;
};

/// Finite pmf with distinct atoms kept in increasing order.
///
/// `cumulative[i]` is the inverse-CDF boundary of atom i. It is normally the
/// running sum of probabilities, but truncated laws inherit the boundaries of
/// the law they were clipped from, which makes
/// `truncate(d, K).quantile(u) == min(d.quantile(u), K)` hold exactly.
struct FiniteDiscrete {
  std::vector<Atom> atoms;
  std::vector<double> cumulative;
};

/// X = negative atom `neg_value` with probability `neg_prob`, otherwise a
/// positive integer N with P(N >= k) = (1 + (k-1)/scale)^-alpha, k >= 1
/// (the ceiling of a Lomax variable). E X is finite iff alpha > 1 and
/// E exp(theta X) = +inf for all theta > 0.
struct HeavyTail {
  double neg_value = -1.0;
  Probability neg_prob;
  double alpha = 2.0;
  double scale = 1.0;

  /// P(N > x) for the positive part, x >= 0.
  double tail_survival(double x) const;
  /// P(X <= k) for integer k >= 0.
  double cdf_at(std::size_t k) const;
  /// E[N], the conditional mean of the positive part.
  double tail_mean() const;
};

class DisplacementDist {
 public:
  /// Validates, sorts by value, rejects duplicate values and probabilities
  /// that do not sum to one (exactly if all are rational, else within 1e-12).
  static DisplacementDist discrete(std::vector<Atom> atoms);
  static DisplacementDist point(double value);
  static DisplacementDist heavy_tail(double neg_value, Probability neg_prob, double alpha,
                                     double scale);

  /// Parses `{"type":"discrete","atoms":[[v,"p"],...]}` or
  /// `{"type":"heavy_tail","neg":[v,"p"],"alpha":a,"scale":s}`.
  /// Throws SpecError naming the key path under `path`.
  static DisplacementDist from_json(const nlohmann::json& j, const std::string& path = "dist");
  nlohmann::json to_json() const;

  bool is_discrete() const { return std::holds_alternative<FiniteDiscrete>(law_); }
  const FiniteDiscrete& finite() const { return std::get<FiniteDiscrete>(law_); }
  const HeavyTail& heavy() const { return std::get<HeavyTail>(law_); }

  /// Inverse CDF. This is the only sampling path, so shared uniforms give
  /// monotone couplings between a law and its truncations.
  double quantile(double u) const;

 private:
  explicit DisplacementDist(FiniteDiscrete f) : law_(std::move(f)) {}
  explicit DisplacementDist(HeavyTail h) : law_(h) {}
  static DisplacementDist discrete_with_boundaries(std::vector<Atom> atoms,
                                                   std::vector<double> cumulative);
  friend DisplacementDist truncate(const DisplacementDist& dist, double cap);

  std::variant<FiniteDiscrete, HeavyTail> law_;
};

struct MgfAnalysis {
  double a = 1.0;
  double theta_star = 0.0;
  bool mgf_finite_somewhere = true;
  double threshold = 0.5;
  /// False when phi is still decreasing at the search limit (no positive
  /// atoms); a is then phi at the limit.
  bool attained = true;
};

inline constexpr double kThetaSearchLimit = 700.0;

double mean(const DisplacementDist& dist);
double prob_positive(const DisplacementDist& dist);
/// E exp(theta X); +inf where it diverges. Rejects theta < 0.
double mgf(const DisplacementDist& dist, double theta);
/// log E exp(theta X), evaluated without overflow for discrete laws.
double log_mgf(const DisplacementDist& dist, double theta);
MgfAnalysis infimum_mgf(const DisplacementDist& dist);
double threshold(const MgfAnalysis& analysis);
/// Law of min(X, cap). Always finite discrete. Rejects cap < 0.
DisplacementDist truncate(const DisplacementDist& dist, double cap);
double sample(const DisplacementDist& dist, DrawSource& stream);

}  // namespace lobtree
