#include "lobtree/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lobtree/book.hpp"
#include "lobtree/parallel.hpp"
#include "lobtree/random_stream.hpp"

namespace lobtree {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Recurrent: return "Recurrent";
    case Regime::DivergesUp: return "DivergesUp";
    case Regime::DivergesDown: return "DivergesDown";
    case Regime::Boundary: return "Boundary";
  }
  return "?";
}

RegimeReport classify(double p, const DisplacementDist& dist) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
  RegimeReport r;
  r.p = p;
  r.mean_x = mean(dist);
  r.prob_positive = prob_positive(dist);
  const auto mgf = infimum_mgf(dist);
  r.a = mgf.a;
  r.theta_star = mgf.theta_star;
  r.threshold = mgf.threshold;
  r.mgf_finite_somewhere = mgf.mgf_finite_somewhere;
  if (!mgf.mgf_finite_somewhere) r.reasons.emplace_back("E exp(theta X) infinite for all theta > 0, so a = 1");

  if (p <= 0.5) {
    r.regime = Regime::Recurrent;
    r.reasons.emplace_back("p <= 1/2: the mass is a recurrent reflected walk");
    return r;
  }
  if (std::abs(r.mean_x) <= kBoundaryTolerance) {
    r.regime = Regime::Boundary;
    r.reasons.emplace_back("E X = 0");
    return r;
  }
  if (r.mean_x > 0.0) {
    r.regime = Regime::DivergesUp;
    r.reasons.emplace_back("p > 1/2 and E X > 0");
    return r;
  }
  if (r.prob_positive == 0.0) {
    r.regime = Regime::DivergesDown;
    r.outside_hypotheses = true;
    r.reasons.emplace_back("p > 1/2, E X < 0 and P(X > 0) = 0: the price never rises");
    return r;
  }
  if (std::abs(p - r.threshold) <= kBoundaryTolerance) {
    r.regime = Regime::Boundary;
    r.reasons.emplace_back("p = 1/(1+a)");
    return r;
  }
  if (p > r.threshold) {
    r.regime = Regime::DivergesUp;
    r.reasons.emplace_back("p > 1/2, E X < 0, P(X > 0) > 0 and p > 1/(1+a)");
  } else {
    r.regime = Regime::DivergesDown;
    r.reasons.emplace_back("p > 1/2, E X < 0, P(X > 0) > 0 and p < 1/(1+a)");
  }
  return r;
}

nlohmann::json to_json(const RegimeReport& r) {
  return {{"regime", to_string(r.regime)},
          {"p", r.p},
          {"meanX", r.mean_x},
          {"probPositive", r.prob_positive},
          {"a", r.a},
          {"thetaStar", r.theta_star},
          {"threshold", r.threshold},
          {"mgfFiniteSomewhere", r.mgf_finite_somewhere},
          {"outsideHypotheses", r.outside_hypotheses},
          {"reasons", r.reasons}};
}

DriftEstimate drift_estimate(double p, const DisplacementDist& dist, std::size_t horizon,
                             std::size_t replicas, std::uint64_t seed, unsigned threads) {
  if (horizon == 0 || replicas == 0) throw std::invalid_argument("drift_estimate: horizon and replicas must be positive");
  std::vector<double> slopes(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    RandomStream source(seed, i);
    slopes[i] = simulate_endpoint(p, dist, horizon, source).book.price() / static_cast<double>(horizon);
  });
  DriftEstimate d;
  const auto ci = mean_ci95(slopes);
  d.slope = ci.mean;
  d.ci95 = ci.half_width;
  d.horizon = horizon;
  d.replicas = replicas;
  d.fraction_positive =
      static_cast<double>(std::count_if(slopes.begin(), slopes.end(), [](double s) { return s > 0; })) /
      static_cast<double>(replicas);
  return d;
}

SurvivalSample barrier_depth(double p, const DisplacementDist& dist, std::size_t max_depth,
                             std::uint64_t seed, std::uint64_t replica, std::uint64_t node_budget) {
  struct Frame {
    std::uint64_t key;
    double label;
    std::uint32_t depth;
    std::uint32_t next_rank;
  };
  AddressedStream source(seed, replica);
  SurvivalSample s;
  std::vector<Frame> stack{{AddressedStream::tree_root_key(0), 0.0, 0, 0}};
  while (!stack.empty() && s.depth < max_depth) {
    Frame& f = stack.back();
    const DrawAddress at{f.key, f.next_rank};
    if (!source.coin(p, at)) {
      stack.pop_back();
      continue;
    }
    if (++s.nodes >= node_budget) {
      s.budget_hit = true;
      s.depth = max_depth;
      break;
    }
    ++f.next_rank;
    const double label = f.label + source.displacement(dist, at);
    if (label < 0.0) continue;
    const Frame child{child_key(at.node_key, at.rank), label, f.depth + 1, 0};
    s.depth = std::max<std::size_t>(s.depth, child.depth);
    stack.push_back(child);
  }
  return s;
}

namespace {

SurvivalEstimate summarize(std::vector<std::size_t> depths, std::vector<SurvivalSample> samples) {
  SurvivalEstimate est;
  est.depths = std::move(depths);
  est.replicas = samples.size();
  for (const auto& s : samples) est.budget_hits += s.budget_hit;
  for (std::size_t d : est.depths) {
    const auto reached = static_cast<std::uint64_t>(
        std::count_if(samples.begin(), samples.end(), [&](const SurvivalSample& s) { return s.depth >= d; }));
    est.q.push_back(wilson_interval(reached, est.replicas));
  }
  est.samples = std::move(samples);
  return est;
}

}  // namespace

SurvivalEstimate survival_estimate(double p, const DisplacementDist& dist,
                                   std::vector<std::size_t> depths, std::size_t replicas,
                                   std::uint64_t seed, unsigned threads, std::uint64_t node_budget) {
  if (depths.empty() || replicas == 0) throw std::invalid_argument("survival_estimate: need depths and replicas");
  const std::size_t deepest = *std::max_element(depths.begin(), depths.end());
  std::vector<SurvivalSample> samples(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    samples[i] = barrier_depth(p, dist, deepest, seed, i, node_budget);
  });
  return summarize(std::move(depths), std::move(samples));
}

TruncationStudy truncation_study(double p, const DisplacementDist& dist, const std::vector<double>& caps,
                                 std::size_t depth, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads, std::uint64_t node_budget) {
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (caps[i] < 0.0) throw std::invalid_argument("truncation_study: caps must be >= 0");
    if (i > 0 && !(caps[i] > caps[i - 1])) throw std::invalid_argument("truncation_study: caps must increase");
  }
  TruncationStudy study;
  std::vector<DisplacementDist> laws;
  for (double k : caps) laws.push_back(truncate(dist, k));
  laws.push_back(dist);
  for (std::size_t i = 0; i < laws.size(); ++i) {
    TruncationRow row;
    row.cap = i < caps.size() ? caps[i] : std::numeric_limits<double>::infinity();
    const auto mgf = infimum_mgf(laws[i]);
    row.a = mgf.a;
    row.threshold = mgf.threshold;
    row.survival = survival_estimate(p, laws[i], {depth}, replicas, seed, threads, node_budget);
    study.rows.push_back(std::move(row));
  }
  for (std::size_t r = 0; r < replicas; ++r) {
    for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
      const auto& lo = study.rows[i].survival.samples[r];
      const auto& hi = study.rows[i + 1].survival.samples[r];
      if (lo.depth >= depth && !lo.budget_hit && hi.depth < depth) ++study.dominance_violations;
    }
  }
  return study;
}

}  // namespace lobtree
