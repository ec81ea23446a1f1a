#include "lobtree/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>
#include <nlohmann/json.hpp>

#include "lobtree/errors.hpp"

namespace lobtree {
namespace {

constexpr double kSumTolerance = 1e-12;
constexpr std::size_t kMaxTailIndex = std::size_t{1} << 52;
constexpr double kMaxHeavyTruncation = 1e7;

Probability parse_probability(const nlohmann::json& j, const std::string& path) {
  if (j.is_string()) {
    auto r = Rational::parse(j.get<std::string>());
    if (!r) throw SpecError(path, "cannot parse probability '" + j.get<std::string>() + "'");
    return Probability::from_rational(*r);
  }
  if (j.is_number()) return Probability::from_double(j.get<double>());
  throw SpecError(path, "probability must be a number or a fraction string");
}

double parse_real(const nlohmann::json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (auto r = Rational::parse(j.get<std::string>())) return r->to_double();
  }
  throw SpecError(path, "expected a real number");
}

nlohmann::json probability_json(const Probability& p) {
  if (p.exact) return p.exact->str();
  return p.value;
}

// Log-sum-exp of sum_i p_i exp(theta x_i).
double discrete_log_mgf(const FiniteDiscrete& f, double theta) {
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& a : f.atoms) {
    if (a.prob.value > 0.0) shift = std::max(shift, theta * a.value);
  }
  double s = 0.0;
  for (const auto& a : f.atoms) {
    if (a.prob.value > 0.0) s += a.prob.value * std::exp(theta * a.value - shift);
  }
  return shift + std::log(s);
}

// Sign-faithful multiple of phi'(theta).
double discrete_scaled_derivative(const FiniteDiscrete& f, double theta) {
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& a : f.atoms) {
    if (a.prob.value > 0.0) shift = std::max(shift, theta * a.value);
  }
  double s = 0.0;
  for (const auto& a : f.atoms) {
    if (a.prob.value > 0.0) s += a.prob.value * a.value * std::exp(theta * a.value - shift);
  }
  return s;
}

}  // namespace

double HeavyTail::tail_survival(double x) const {
  return std::pow(1.0 + x / scale, -alpha);
}

double HeavyTail::cdf_at(std::size_t k) const {
  if (k == 0) return neg_prob.value;
  return neg_prob.value + (1.0 - neg_prob.value) * (1.0 - tail_survival(static_cast<double>(k)));
}

double HeavyTail::tail_mean() const {
  // sum_{j>=0} (1 + j/s)^-alpha = s^alpha * zeta(alpha, s)
  gsl_sf_result r;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status = gsl_sf_hzeta_e(alpha, scale, &r);
  gsl_set_error_handler(old);
  if (status != GSL_SUCCESS) return std::numeric_limits<double>::infinity();
  return std::pow(scale, alpha) * r.val;
}

DisplacementDist DisplacementDist::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw SpecError("atoms", "at least one atom is required");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    const std::string where = "atoms[" + std::to_string(i) + "]";
    if (!std::isfinite(a.value)) throw SpecError(where, "atom value must be finite");
    if (!(a.prob.value >= 0.0) || a.prob.value > 1.0) throw SpecError(where, "probability outside [0,1]");
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& l, const Atom& r) { return l.value < r.value; });
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].value == atoms[i - 1].value) {
      throw SpecError("atoms", "duplicate atom value " + std::to_string(atoms[i].value));
    }
  }
  const bool all_exact = std::all_of(atoms.begin(), atoms.end(),
                                     [](const Atom& a) { return a.prob.exact.has_value(); });
  if (all_exact) {
    Rational total(0);
    for (const auto& a : atoms) total = total + *a.prob.exact;
    if (total != Rational(1)) {
      throw SpecError("atoms", "probabilities sum to " + total.str() + ", not 1");
    }
  }
  std::vector<double> cumulative;
  cumulative.reserve(atoms.size());
  double running = 0.0;
  for (const auto& a : atoms) {
    running += a.prob.value;
    cumulative.push_back(running);
  }
  if (std::abs(running - 1.0) > kSumTolerance) {
    throw SpecError("atoms", "probabilities sum to " + std::to_string(running) + ", not 1");
  }
  return DisplacementDist(FiniteDiscrete{std::move(atoms), std::move(cumulative)});
}

DisplacementDist DisplacementDist::discrete_with_boundaries(std::vector<Atom> atoms,
                                                            std::vector<double> cumulative) {
  return DisplacementDist(FiniteDiscrete{std::move(atoms), std::move(cumulative)});
}

DisplacementDist DisplacementDist::point(double value) {
  return discrete({Atom{value, Probability::from_rational(Rational(1))}});
}

DisplacementDist DisplacementDist::heavy_tail(double neg_value, Probability neg_prob, double alpha,
                                              double scale) {
  if (!(neg_value < 0.0) || !std::isfinite(neg_value)) {
    throw SpecError("neg", "negative atom must be a finite value < 0");
  }
  if (!(neg_prob.value >= 0.0 && neg_prob.value < 1.0)) {
    throw SpecError("neg", "negative atom probability must lie in [0,1)");
  }
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw SpecError("alpha", "alpha must exceed 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw SpecError("scale", "scale must be positive");
  return DisplacementDist(HeavyTail{neg_value, neg_prob, alpha, scale});
}

DisplacementDist DisplacementDist::from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw SpecError(path, "distribution must be an object");
  if (!j.contains("type") || !j.at("type").is_string()) {
    throw SpecError(path + ".type", "missing distribution type");
  }
  const auto type = j.at("type").get<std::string>();
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        throw SpecError(path + "." + key, "unknown key");
      }
    }
  };
  try {
    if (type == "discrete") {
      check_keys({"type", "atoms"});
      if (!j.contains("atoms") || !j.at("atoms").is_array()) {
        throw SpecError(path + ".atoms", "expected an array of [value, probability] pairs");
      }
      std::vector<Atom> atoms;
      const auto& arr = j.at("atoms");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = path + ".atoms[" + std::to_string(i) + "]";
        if (!arr[i].is_array() || arr[i].size() != 2) {
          throw SpecError(where, "expected [value, probability]");
        }
        atoms.push_back({parse_real(arr[i][0], where + "[0]"), parse_probability(arr[i][1], where + "[1]")});
      }
      return discrete(std::move(atoms));
    }
    if (type == "heavy_tail") {
      check_keys({"type", "neg", "alpha", "scale"});
      for (const char* key : {"neg", "alpha", "scale"}) {
        if (!j.contains(key)) throw SpecError(path + "." + key, "missing key");
      }
      const auto& neg = j.at("neg");
      if (!neg.is_array() || neg.size() != 2) throw SpecError(path + ".neg", "expected [value, probability]");
      return heavy_tail(parse_real(neg[0], path + ".neg[0]"), parse_probability(neg[1], path + ".neg[1]"),
                        parse_real(j.at("alpha"), path + ".alpha"),
                        parse_real(j.at("scale"), path + ".scale"));
    }
  } catch (const SpecError& e) {
    if (e.path().rfind(path, 0) == 0) throw;
    throw SpecError(path + "." + e.path(), std::string(e.what()).substr(e.path().size() + 2));
  }
  throw SpecError(path + ".type", "unknown distribution type '" + type + "'");
}

nlohmann::json DisplacementDist::to_json() const {
  if (is_discrete()) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : finite().atoms) atoms.push_back({a.value, probability_json(a.prob)});
    return {{"type", "discrete"}, {"atoms", atoms}};
  }
  const auto& h = heavy();
  return {{"type", "heavy_tail"},
          {"neg", {h.neg_value, probability_json(h.neg_prob)}},
          {"alpha", h.alpha},
          {"scale", h.scale}};
}

double DisplacementDist::quantile(double u) const {
  if (is_discrete()) {
    const auto& f = finite();
    const auto last = f.cumulative.end() - 1;
    const auto it = std::upper_bound(f.cumulative.begin(), last, u);
    return f.atoms[static_cast<std::size_t>(it - f.cumulative.begin())].value;
  }
  const auto& h = heavy();
  if (u < h.cdf_at(0)) return h.neg_value;
  // Smallest k >= 1 with u < cdf_at(k); analytic guess, then gallop and bisect
  // against cdf_at itself so truncations see the same boundaries.
  const double r = (u - h.neg_prob.value) / (1.0 - h.neg_prob.value);
  double guess = std::ceil(h.scale * (std::pow(1.0 - r, -1.0 / h.alpha) - 1.0));
  if (!(guess >= 1.0)) guess = 1.0;
  std::size_t k = guess >= static_cast<double>(kMaxTailIndex) ? kMaxTailIndex
                                                              : static_cast<std::size_t>(guess);
  std::size_t lo, hi;  // invariant: u >= cdf_at(lo), u < cdf_at(hi)
  if (u < h.cdf_at(k)) {
    hi = k;
    std::size_t step = 1;
    for (;;) {
      lo = hi > step ? hi - step : 0;
      if (lo == 0 || !(u < h.cdf_at(lo))) break;
      hi = lo;
      step *= 2;
    }
  } else {
    lo = k;
    std::size_t step = 1;
    for (;;) {
      hi = lo + step;
      if (hi >= kMaxTailIndex) return static_cast<double>(kMaxTailIndex);
      if (u < h.cdf_at(hi)) break;
      lo = hi;
      step *= 2;
    }
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (u < h.cdf_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return static_cast<double>(hi);
}

double mean(const DisplacementDist& dist) {
  if (dist.is_discrete()) {
    double m = 0.0;
    for (const auto& a : dist.finite().atoms) m += a.prob.value * a.value;
    return m;
  }
  const auto& h = dist.heavy();
  return h.neg_prob.value * h.neg_value + (1.0 - h.neg_prob.value) * h.tail_mean();
}

double prob_positive(const DisplacementDist& dist) {
  if (dist.is_discrete()) {
    double s = 0.0;
    for (const auto& a : dist.finite().atoms) {
      if (a.value > 0.0) s += a.prob.value;
    }
    return s;
  }
  return 1.0 - dist.heavy().neg_prob.value;
}

double mgf(const DisplacementDist& dist, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("mgf: theta must be >= 0");
  if (theta == 0.0) return 1.0;
  if (!dist.is_discrete()) {
    return dist.heavy().neg_prob.value < 1.0 ? std::numeric_limits<double>::infinity()
                                             : std::exp(theta * dist.heavy().neg_value);
  }
  double s = 0.0;
  for (const auto& a : dist.finite().atoms) s += a.prob.value * std::exp(theta * a.value);
  return s;
}

double log_mgf(const DisplacementDist& dist, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("log_mgf: theta must be >= 0");
  if (theta == 0.0) return 0.0;
  if (!dist.is_discrete()) return std::log(mgf(dist, theta));
  return discrete_log_mgf(dist.finite(), theta);
}

MgfAnalysis infimum_mgf(const DisplacementDist& dist) {
  MgfAnalysis out;
  if (!dist.is_discrete()) {
    out.mgf_finite_somewhere = false;
    out.threshold = threshold(out);
    return out;
  }
  const auto& f = dist.finite();
  if (mean(dist) >= 0.0) {
    out.threshold = threshold(out);
    return out;
  }

  auto deriv = [&](double t) { return discrete_scaled_derivative(f, t); };
  auto logphi = [&](double t) { return discrete_log_mgf(f, t); };

  double hi = 1.0;
  while (deriv(hi) < 0.0 && hi < kThetaSearchLimit) hi = std::min(2.0 * hi, kThetaSearchLimit);
  if (deriv(hi) < 0.0) {
    out.theta_star = hi;
    out.a = std::exp(logphi(hi));
    out.attained = false;
    out.threshold = threshold(out);
    return out;
  }

  // Golden-section on log phi (convex), then bisection on the sign of phi'
  // to get past the sqrt(eps) floor of comparison-based search.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = logphi(x1);
  double f2 = logphi(x2);
  while (hi - lo > 1e-6) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = logphi(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = logphi(x2);
    }
  }
  lo = std::max(0.0, lo - 1e-6);
  hi += 1e-6;
  while (deriv(lo) > 0.0 && lo > 0.0) lo = std::max(0.0, lo - 2.0 * (hi - lo));
  while (deriv(hi) < 0.0) hi += 2.0 * (hi - lo);
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (deriv(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.theta_star = 0.5 * (lo + hi);
  out.a = std::min(1.0, std::exp(logphi(out.theta_star)));
  out.threshold = threshold(out);
  return out;
}

double threshold(const MgfAnalysis& analysis) {
  return 1.0 / (1.0 + analysis.a);
}

DisplacementDist truncate(const DisplacementDist& dist, double cap) {
  if (!(cap >= 0.0) || !std::isfinite(cap)) throw std::invalid_argument("truncate: cap must be >= 0");
  std::vector<Atom> atoms;
  std::vector<double> cumulative;
  if (dist.is_discrete()) {
    const auto& f = dist.finite();
    double clipped = 0.0;
    std::optional<Rational> clipped_exact = Rational(0);
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
      const auto& a = f.atoms[i];
      if (a.value < cap) {
        atoms.push_back(a);
        cumulative.push_back(f.cumulative[i]);
      } else {
        clipped += a.prob.value;
        if (clipped_exact && a.prob.exact) {
          clipped_exact = *clipped_exact + *a.prob.exact;
        } else {
          clipped_exact.reset();
        }
      }
    }
    if (clipped > 0.0 || clipped_exact != Rational(0)) {
      Probability p{clipped, clipped_exact};
      if (clipped_exact) p.value = clipped_exact->to_double();
      atoms.push_back({cap, p});
      cumulative.push_back(1.0);
    }
    return DisplacementDist::discrete_with_boundaries(std::move(atoms), std::move(cumulative));
  }

  const auto& h = dist.heavy();
  if (cap > kMaxHeavyTruncation) throw std::invalid_argument("truncate: cap too large for heavy tail");
  atoms.push_back({h.neg_value, h.neg_prob});
  cumulative.push_back(h.cdf_at(0));
  double prev = h.cdf_at(0);
  for (std::size_t k = 1; static_cast<double>(k) < cap; ++k) {
    const double c = h.cdf_at(k);
    atoms.push_back({static_cast<double>(k), Probability::from_double(c - prev)});
    cumulative.push_back(c);
    prev = c;
  }
  atoms.push_back({cap, Probability::from_double(1.0 - prev)});
  cumulative.push_back(1.0);
  return DisplacementDist::discrete_with_boundaries(std::move(atoms), std::move(cumulative));
}

double sample(const DisplacementDist& dist, DrawSource& stream) {
  return stream.displacement(dist, {});
}

}  // namespace lobtree
