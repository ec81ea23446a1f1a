#include "lobtree/config.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <set>

#include "lobtree/errors.hpp"
#include "lobtree/rational.hpp"

#ifndef LOBTREE_VERSION
#define LOBTREE_VERSION "0.0.0"
#endif

namespace lobtree {

namespace {

constexpr std::array<std::pair<Command, const char*>, 7> kCommands{{
    {Command::classify, "classify"},
    {Command::simulate, "simulate"},
    {Command::couple_test, "couple-test"},
    {Command::y_chain_test, "y-chain-test"},
    {Command::phase_sweep, "phase-sweep"},
    {Command::survival, "survival"},
    {Command::truncation_study, "truncation-study"},
}};

const std::set<std::string> kKeys{
    "command", "p",       "dist",        "seed",         "seedTree",   "horizon",
    "replicas", "runs",   "steps",       "samples",      "mutant",     "transitions",
    "chainHorizon", "depths", "caps",    "nodeBudget",   "alpha",      "format",
    "out",     "threads"};

double real_at(const nlohmann::json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (auto r = Rational::parse(j.get<std::string>())) return r->to_double();
  }
  throw SpecError(path, "expected a real number or a fraction string");
}

std::uint64_t count_at(const nlohmann::json& j, const std::string& path, bool allow_zero = false) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw SpecError(path, "expected a non-negative integer");
  }
  const auto v = j.get<std::uint64_t>();
  if (!allow_zero && v == 0) throw SpecError(path, "must be positive");
  return v;
}

void check_probability(double p, const std::string& path, bool allow_one) {
  const bool ok = p > 0.0 && (p < 1.0 || (allow_one && p == 1.0));
  if (!ok) throw SpecError(path, allow_one ? "p must lie in (0,1]" : "p must lie in (0,1)");
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [cmd, n] : kCommands) {
    if (name == n) return cmd;
  }
  return std::nullopt;
}

RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("", "configuration must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw SpecError(key, "unknown key");
  }
  RunConfig c;

  if (!j.contains("command") || !j["command"].is_string()) throw SpecError("command", "missing command");
  const auto cmd = parse_command(j["command"].get<std::string>());
  if (!cmd) throw SpecError("command", "unknown command '" + j["command"].get<std::string>() + "'");
  c.command = *cmd;

  if (!j.contains("seed")) throw SpecError("seed", "a seed is required");
  c.seed = count_at(j["seed"], "seed", true);
  if (j.contains("seedTree")) c.seed_tree = count_at(j["seedTree"], "seedTree", true);

  if (!j.contains("dist")) throw SpecError("dist", "missing displacement law");
  c.dist = DisplacementDist::from_json(j["dist"], "dist");

  if (!j.contains("p")) throw SpecError("p", "missing p");
  const bool allow_one = c.command == Command::simulate;
  if (j["p"].is_array()) {
    if (j["p"].empty()) throw SpecError("p", "empty grid");
    for (std::size_t i = 0; i < j["p"].size(); ++i) {
      const std::string path = "p[" + std::to_string(i) + "]";
      c.p.push_back(real_at(j["p"][i], path));
      check_probability(c.p.back(), path, allow_one);
    }
    if (c.command != Command::phase_sweep && c.p.size() != 1) {
      throw SpecError("p", "a grid of p values is only accepted by phase-sweep");
    }
  } else {
    c.p.push_back(real_at(j["p"], "p"));
    check_probability(c.p.back(), "p", allow_one);
  }

  auto size_key = [&](const char* key, auto& field) {
    if (j.contains(key)) field = static_cast<std::remove_reference_t<decltype(field)>>(count_at(j[key], key));
  };
  size_key("horizon", c.horizon);
  size_key("replicas", c.replicas);
  size_key("runs", c.runs);
  size_key("steps", c.steps);
  size_key("samples", c.samples);
  size_key("transitions", c.transitions);
  size_key("chainHorizon", c.chain_horizon);
  size_key("nodeBudget", c.node_budget);
  size_key("threads", c.threads);

  if (j.contains("mutant")) {
    if (!j["mutant"].is_boolean()) throw SpecError("mutant", "expected a boolean");
    c.mutant = j["mutant"].get<bool>();
  }
  if (j.contains("depths")) {
    const auto& d = j["depths"];
    c.depths.clear();
    if (d.is_array()) {
      if (d.empty()) throw SpecError("depths", "empty list");
      for (std::size_t i = 0; i < d.size(); ++i) {
        c.depths.push_back(count_at(d[i], "depths[" + std::to_string(i) + "]", true));
      }
    } else {
      c.depths.push_back(count_at(d, "depths", true));
    }
  }
  if (j.contains("caps")) {
    const auto& k = j["caps"];
    if (!k.is_array()) throw SpecError("caps", "expected an array");
    for (std::size_t i = 0; i < k.size(); ++i) {
      const std::string path = "caps[" + std::to_string(i) + "]";
      c.caps.push_back(real_at(k[i], path));
      if (c.caps.back() < 0.0) throw SpecError(path, "caps must be >= 0");
      if (i > 0 && !(c.caps[i] > c.caps[i - 1])) throw SpecError(path, "caps must increase");
    }
  }
  if (c.command == Command::truncation_study && c.caps.empty()) throw SpecError("caps", "at least one cap is required");
  if (c.command == Command::survival && c.caps.size() > 1) throw SpecError("caps", "survival accepts at most one cap");
  if (j.contains("alpha")) {
    c.alpha = real_at(j["alpha"], "alpha");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw SpecError("alpha", "alpha must lie in (0,1)");
  }

  switch (c.command) {
    case Command::classify:
    case Command::couple_test:
    case Command::y_chain_test: c.format = OutputFormat::json; break;
    default: c.format = OutputFormat::csv; break;
  }
  if (j.contains("format")) {
    const auto& f = j["format"];
    if (f == "csv") {
      c.format = OutputFormat::csv;
    } else if (f == "json") {
      c.format = OutputFormat::json;
    } else {
      throw SpecError("format", "expected \"csv\" or \"json\"");
    }
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw SpecError("out", "expected a path");
    c.out = j["out"].get<std::string>();
  }
  if ((c.command == Command::y_chain_test) && !c.dist.is_discrete()) {
    throw SpecError("dist", "y-chain-test requires a discrete law");
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = to_string(c.command);
  if (c.command == Command::phase_sweep) {
    j["p"] = c.p;
  } else {
    j["p"] = c.p.front();
  }
  j["dist"] = c.dist.to_json();
  j["seed"] = c.seed;
  j["seedTree"] = c.seed_tree.value_or(c.seed + 1);
  j["horizon"] = c.horizon;
  j["replicas"] = c.replicas;
  j["runs"] = c.runs;
  j["steps"] = c.steps;
  j["samples"] = c.samples;
  j["mutant"] = c.mutant;
  j["transitions"] = c.transitions;
  j["chainHorizon"] = c.chain_horizon;
  j["depths"] = c.depths;
  j["caps"] = c.caps;
  j["nodeBudget"] = c.node_budget;
  j["alpha"] = c.alpha;
  j["format"] = c.format == OutputFormat::csv ? "csv" : "json";
  j["out"] = c.out;
  j["threads"] = c.threads;
  return j;
}

std::string config_hash(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("out");
  j.erase("threads");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string software_version() { return LOBTREE_VERSION; }

}  // namespace lobtree
