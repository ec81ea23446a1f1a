#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lobtree/book.hpp"
#include "lobtree/colored_tree.hpp"
#include "lobtree/galton_watson.hpp"
#include "lobtree/stats.hpp"

namespace lobtree {

struct CoupledRunOptions {
  bool store_books = false;             // keep every book and tree-side measure
  std::size_t full_check_every = 256;   // full multiset comparison cadence
  std::size_t scan_check_every = 4096;  // recompute the green measure from the tree
};

/// Book chain and lazily revealed tree driven side by side. Each step the
/// book's event (restart, add at label, remove at label) is compared with
/// the tree's (fresh tree, new green node, new red node), together with
/// price, mass and a full multiset comparison at the configured cadence.
struct CoupledRun {
  BookTrajectory book_traj;
  std::vector<Book> tree_books;
  std::vector<std::size_t> regeneration_steps;  // steps at which a fresh tree was drawn
  std::vector<std::size_t> kappas;               // per finished tree: steps until no green node
  std::vector<std::size_t> taus;                 // per finished segment: steps until an empty book
  std::optional<std::size_t> first_mismatch;
  std::size_t full_checks = 0;

  bool matched() const { return !first_mismatch.has_value(); }
};

CoupledRun coupled_run(double p, const DisplacementDist& dist, std::size_t horizon,
                       std::uint64_t seed, const CoupledRunOptions& options = {});
/// Same, with explicit sources for each side (e.g. two copies of one script).
CoupledRun coupled_run(double p, const DisplacementDist& dist, std::size_t horizon,
                       DrawSource& book_source, DrawSource& tree_source,
                       const CoupledRunOptions& options = {});

/// White-deleted trees along the dynamic from a fresh tree, starting at the
/// root-only green tree and stopping after the first tree without a green
/// node or after `horizon` steps. Requires a finite discrete law.
std::vector<ColoredTree> y_chain(double p, const DisplacementDist& dist, std::size_t horizon,
                                 DrawSource& source, std::uint64_t root_key = 0);

enum class YMove : std::uint8_t { stay, append, kill, invalid };

struct YTransition {
  YMove move = YMove::invalid;
  double edge = 0.0;  // for append
};

/// Identifies next as prev unchanged (no green node), prev with a green child
/// appended to its price node for some support point, or prev with its price
/// node killed.
YTransition classify_transition(const ColoredTree& prev, const ColoredTree& next,
                                const DisplacementDist& dist);

struct YTransitionCounts {
  std::vector<double> support;
  std::vector<std::uint64_t> append;  // per support point
  std::uint64_t kill = 0;
  std::uint64_t invalid = 0;
  std::uint64_t total = 0;  // transitions out of trees with a green node
  std::size_t chains = 0;
};

/// Runs independent chains of length `chain_horizon` until at least
/// `transitions` transitions out of trees with a green node are collected.
YTransitionCounts y_transition_counts(double p, const DisplacementDist& dist,
                                      std::uint64_t transitions, std::size_t chain_horizon,
                                      std::uint64_t seed);

/// Rebuilds the white-deleted trees from their green measures alone.
/// Throws std::invalid_argument if consecutive measures differ by more than
/// one order. Edge labels are recovered as differences of labels.
std::vector<ColoredTree> reconstruct_y(const std::vector<Book>& measures);

struct MarginalSamples {
  std::vector<double> prices;
  std::vector<std::uint64_t> masses;
};

/// Book state after n steps for m replicas; replica i uses stream (seed, i).
MarginalSamples sample_book_marginals(double p, const DisplacementDist& dist, std::size_t n,
                                      std::size_t m, std::uint64_t seed, unsigned threads = 1);
/// Green measure after n steps of the tree dynamic with a fresh tree drawn
/// whenever no green node is left; replica i uses addressed stream (seed, i).
MarginalSamples sample_tree_marginals(double p, const DisplacementDist& dist, std::size_t n,
                                      std::size_t m, std::uint64_t seed,
                                      OffspringLaw law = OffspringLaw::geometric,
                                      unsigned threads = 1);

struct TestReport {
  std::string test;
  std::size_t n = 0, m = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

nlohmann::json to_json(const TestReport& r);

/// KS on prices and chi-square on masses, each at level alpha / 2.
std::vector<TestReport> compare_marginals(const MarginalSamples& a, const MarginalSamples& b,
                                          std::size_t n, double alpha, const std::string& label);

/// Book samples from seed_book against tree samples from seed_tree.
std::vector<TestReport> distributional_test(double p, const DisplacementDist& dist, std::size_t n,
                                            std::size_t m, std::uint64_t seed_book,
                                            std::uint64_t seed_tree, double alpha = 0.01,
                                            OffspringLaw law = OffspringLaw::geometric,
                                            unsigned threads = 1);

}  // namespace lobtree
