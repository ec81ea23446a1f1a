#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lobtree/displacement.hpp"

namespace lobtree {

enum class Command : std::uint8_t {
  classify,
  simulate,
  couple_test,
  y_chain_test,
  phase_sweep,
  survival,
  truncation_study
};

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

enum class OutputFormat : std::uint8_t { csv, json };

/// Fully resolved run description. Every field has a default except the
/// command, the seed and (for every command) the displacement law.
struct RunConfig {
  Command command = Command::classify;
  std::vector<double> p;  // one value, or the grid for phase-sweep
  DisplacementDist dist = DisplacementDist::point(0.0);
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> seed_tree;  // couple-test tree side; defaults to seed + 1

  std::size_t horizon = 1000;     // simulate, phase-sweep, couple-test (pathwise)
  std::size_t replicas = 50;      // phase-sweep, survival, truncation-study
  std::size_t runs = 10;          // couple-test pathwise runs
  std::size_t steps = 30;         // couple-test distributional step n
  std::size_t samples = 10000;    // couple-test distributional m per side
  bool mutant = false;            // couple-test: also run the shifted-offspring control
  std::uint64_t transitions = 100000;  // y-chain-test
  std::size_t chain_horizon = 64;      // y-chain-test
  std::vector<std::size_t> depths{64};  // survival; truncation-study uses the last
  std::vector<double> caps;             // truncation-study; survival: optional single cap
  std::uint64_t node_budget = 10'000'000;
  double alpha = 0.01;

  OutputFormat format = OutputFormat::csv;
  std::string out;  // empty: standard output
  unsigned threads = 1;
};

/// Strict parse of a JSON run description. Unknown keys, missing required
/// keys and out-of-range values raise SpecError naming the key path.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& j);

/// The resolved configuration, defaults included.
nlohmann::json to_json(const RunConfig& c);

/// FNV-1a over the canonical dump of the configuration, excluding the output
/// path and the thread count, which do not affect results.
std::string config_hash(const RunConfig& c);

std::string software_version();

}  // namespace lobtree
