#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lobtree/displacement.hpp"
#include "lobtree/stats.hpp"

namespace lobtree {

enum class Regime : std::uint8_t { Recurrent, DivergesUp, DivergesDown, Boundary };

const char* to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::Boundary;
  double p = 0.0;
  double mean_x = 0.0;
  double prob_positive = 0.0;
  double a = 1.0;
  double theta_star = 0.0;
  double threshold = 0.5;
  bool mgf_finite_somewhere = true;
  bool outside_hypotheses = false;  // price can never rise; no threshold applies
  std::vector<std::string> reasons;
};

inline constexpr double kBoundaryTolerance = 1e-12;

/// Analytic regime. Precedence: p <= 1/2 is recurrent; then a vanishing mean
/// or p at the threshold is a boundary case; then a positive mean diverges
/// up; a negative mean with no positive mass diverges down; otherwise p is
/// compared with 1/(1+a).
RegimeReport classify(double p, const DisplacementDist& dist);
nlohmann::json to_json(const RegimeReport& r);

struct DriftEstimate {
  double slope = 0.0;  // mean of price / horizon across replicas
  double ci95 = 0.0;   // half-width
  std::size_t horizon = 0;
  std::size_t replicas = 0;
  double fraction_positive = 0.0;
};

DriftEstimate drift_estimate(double p, const DisplacementDist& dist, std::size_t horizon,
                             std::size_t replicas, std::uint64_t seed, unsigned threads = 1);

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/// Depth reached by the barrier-pruned tree of one replica.
struct SurvivalSample {
  std::size_t depth = 0;      // deepest node kept (capped at the target depth)
  std::uint64_t nodes = 0;    // nodes drawn, pruned ones included
  bool budget_hit = false;    // stopped by the node budget; counted as surviving
};

/// Explores the tree of replica `replica` depth first, keeping only nodes
/// with label >= 0, and stops once a kept node reaches `max_depth`. Draws
/// are addressed, so the explored tree is the same for every p and every
/// truncation level up to monotone coupling.
SurvivalSample barrier_depth(double p, const DisplacementDist& dist, std::size_t max_depth,
                             std::uint64_t seed, std::uint64_t replica,
                             std::uint64_t node_budget = kDefaultNodeBudget);

struct SurvivalEstimate {
  std::vector<std::size_t> depths;
  std::vector<Interval> q;  // per depth: fraction reaching it, Wilson 95%
  std::size_t replicas = 0;
  std::size_t budget_hits = 0;
  std::vector<SurvivalSample> samples;  // per replica

  double budget_fraction() const {
    return replicas == 0 ? 0.0 : static_cast<double>(budget_hits) / static_cast<double>(replicas);
  }
};

SurvivalEstimate survival_estimate(double p, const DisplacementDist& dist,
                                   std::vector<std::size_t> depths, std::size_t replicas,
                                   std::uint64_t seed, unsigned threads = 1,
                                   std::uint64_t node_budget = kDefaultNodeBudget);

struct TruncationRow {
  double cap = 0.0;  // +inf for the untruncated law
  double a = 1.0;
  double threshold = 0.5;
  SurvivalEstimate survival;
};

struct TruncationStudy {
  std::vector<TruncationRow> rows;  // one per cap, then the untruncated law
  /// Replicas where a truncated tree reached the depth but a tree with a
  /// larger cap did not.
  std::size_t dominance_violations = 0;
};

/// Rejects caps that are negative or not increasing.
TruncationStudy truncation_study(double p, const DisplacementDist& dist, const std::vector<double>& caps,
                                 std::size_t depth, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads = 1, std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace lobtree
