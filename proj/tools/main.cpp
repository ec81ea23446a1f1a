#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lobtree/config.hpp"
#include "lobtree/errors.hpp"
#include "lobtree/runner.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> p;
  std::string dist;
  std::optional<std::uint64_t> seed, seed_tree, horizon, replicas, runs, steps, samples, transitions,
      chain_horizon, node_budget, threads;
  std::vector<std::uint64_t> depths;
  std::vector<std::string> caps;
  std::string alpha, format, out;
  bool mutant = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON run description; its keys override flags");
  cmd->add_option("--p", f.p, "order probability (a list for phase-sweep)")->delimiter(',');
  cmd->add_option("--dist", f.dist, "displacement law as JSON");
  cmd->add_option("--seed", f.seed, "master seed (required)");
  cmd->add_option("--seed-tree", f.seed_tree, "couple-test: seed of the tree side");
  cmd->add_option("--horizon", f.horizon, "number of steps");
  cmd->add_option("--replicas", f.replicas, "independent replicas");
  cmd->add_option("--runs", f.runs, "couple-test: pathwise runs");
  cmd->add_option("--steps", f.steps, "couple-test: step compared in distribution");
  cmd->add_option("--samples", f.samples, "couple-test: samples per side");
  cmd->add_flag("--mutant", f.mutant, "couple-test: add the shifted-offspring control");
  cmd->add_option("--transitions", f.transitions, "y-chain-test: transitions to collect");
  cmd->add_option("--chain-horizon", f.chain_horizon, "y-chain-test: length of each chain");
  cmd->add_option("--depths", f.depths, "survival depths")->delimiter(',');
  cmd->add_option("--caps", f.caps, "truncation levels")->delimiter(',');
  cmd->add_option("--node-budget", f.node_budget, "nodes per survival replica");
  cmd->add_option("--alpha", f.alpha, "significance level");
  cmd->add_option("--format", f.format, "csv or json");
  cmd->add_option("--out", f.out, "output path (default: standard output)");
  cmd->add_option("--threads", f.threads, "worker threads");
}

nlohmann::json flags_to_json(const std::string& command, const Flags& f) {
  nlohmann::json j{{"command", command}};
  if (!f.p.empty()) j["p"] = f.p.size() == 1 && command != "phase-sweep" ? nlohmann::json(f.p.front()) : nlohmann::json(f.p);
  if (!f.dist.empty()) {
    try {
      j["dist"] = nlohmann::json::parse(f.dist);
    } catch (const nlohmann::json::parse_error&) {
      throw lobtree::SpecError("dist", "--dist is not valid JSON");
    }
  }
  auto put = [&](const char* key, const std::optional<std::uint64_t>& v) {
    if (v) j[key] = *v;
  };
  put("seed", f.seed);
  put("seedTree", f.seed_tree);
  put("horizon", f.horizon);
  put("replicas", f.replicas);
  put("runs", f.runs);
  put("steps", f.steps);
  put("samples", f.samples);
  put("transitions", f.transitions);
  put("chainHorizon", f.chain_horizon);
  put("nodeBudget", f.node_budget);
  put("threads", f.threads);
  if (f.mutant) j["mutant"] = true;
  if (!f.depths.empty()) j["depths"] = f.depths;
  if (!f.caps.empty()) j["caps"] = f.caps;
  if (!f.alpha.empty()) j["alpha"] = f.alpha;
  if (!f.format.empty()) j["format"] = f.format;
  if (!f.out.empty()) j["out"] = f.out;
  return j;
}

int fail(const std::string& path, const std::string& message) {
  const nlohmann::json err{{"error", {{"path", path}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order book chain, colored-tree coupling and phase studies"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"classify", "analytic regime of the price"},
      {"simulate", "one book trajectory as step,price,mass,event"},
      {"couple-test", "book against tree, pathwise and in distribution"},
      {"y-chain-test", "transition frequencies of the white-deleted tree chain"},
      {"phase-sweep", "regime and empirical drift over a grid of p"},
      {"survival", "probability that the barrier-pruned tree reaches depth d"},
      {"truncation-study", "survival and threshold under capped displacements"},
  };
  for (const auto& [name, about] : commands) add_flags(app.add_subcommand(name, about), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("", e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    nlohmann::json j = flags_to_json(command, flags);
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      if (!in) throw lobtree::SpecError("--config", "cannot open " + flags.config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      nlohmann::json file;
      try {
        file = nlohmann::json::parse(buf.str());
      } catch (const nlohmann::json::parse_error& e) {
        throw lobtree::SpecError("--config", std::string("invalid JSON: ") + e.what());
      }
      if (!file.is_object()) throw lobtree::SpecError("--config", "configuration must be a JSON object");
      if (file.contains("command") && file["command"] != command) {
        throw lobtree::SpecError("command", "configuration names a different command");
      }
      for (const auto& [key, value] : file.items()) j[key] = value;
    }
    lobtree::run(lobtree::parse_config(j), std::cout);
  } catch (const lobtree::SpecError& e) {
    const std::string what = e.what();
    const std::string prefix = e.path().empty() ? "" : e.path() + ": ";
    return fail(e.path(), what.substr(prefix.size()));
  } catch (const std::exception& e) {
    return fail("", e.what());
  }
  return 0;
}
