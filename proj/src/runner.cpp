#include "lobtree/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "lobtree/book.hpp"
#include "lobtree/coupling.hpp"
#include "lobtree/format.hpp"
#include "lobtree/parallel.hpp"
#include "lobtree/phase.hpp"

namespace lobtree {

namespace {

std::string reports_output(const std::vector<TestReport>& reports, OutputFormat format) {
  if (format == OutputFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "test,n,m,statistic,threshold,pass\n";
  for (const auto& r : reports) {
    os << r.test << ',' << r.n << ',' << r.m << ',' << format_real(r.statistic) << ','
       << format_real(r.threshold) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string run_classify(const RunConfig& c) {
  const auto r = classify(c.p.front(), c.dist);
  if (c.format == OutputFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  os << "p,meanX,probPositive,a,thetaStar,threshold,regime\n"
     << format_real(r.p) << ',' << format_real(r.mean_x) << ',' << format_real(r.prob_positive) << ','
     << format_real(r.a) << ',' << format_real(r.theta_star) << ',' << format_real(r.threshold) << ','
     << to_string(r.regime) << '\n';
  return os.str();
}

std::string run_simulate(const RunConfig& c) {
  RandomStream stream(c.seed, 0);
  const auto traj = simulate(c.p.front(), c.dist, c.horizon, stream);
  if (c.format == OutputFormat::csv) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    return os.str();
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t n = 0; n < traj.prices.size(); ++n) {
    rows.push_back({{"step", n}, {"price", traj.prices[n]}, {"mass", traj.masses[n]},
                    {"event", to_string(traj.events[n])}});
  }
  nlohmann::json out{{"trajectory", rows}};
  out["tau"] = traj.tau ? nlohmann::json(*traj.tau) : nlohmann::json();
  return out.dump(2) + "\n";
}

std::string run_couple_test(const RunConfig& c) {
  const double p = c.p.front();
  std::vector<TestReport> reports;

  // Pathwise: run i is seeded with seed + i.
  std::vector<char> matched(c.runs), kappa_ok(c.runs);
  parallel_for(c.runs, c.threads, [&](std::size_t i) {
    const auto run = coupled_run(p, c.dist, c.horizon, c.seed + i);
    matched[i] = run.matched();
    kappa_ok[i] = run.kappas == run.taus;
  });
  const auto count_bad = [](const std::vector<char>& v) {
    return static_cast<double>(std::count(v.begin(), v.end(), 0));
  };
  reports.push_back({"pathwise", c.horizon, c.runs, count_bad(matched), 0.0, count_bad(matched) == 0});
  reports.push_back({"kappa-equals-tau", c.horizon, c.runs, count_bad(kappa_ok), 0.0, count_bad(kappa_ok) == 0});

  const std::uint64_t seed_tree = c.seed_tree.value_or(c.seed + 1);
  const auto book = sample_book_marginals(p, c.dist, c.steps, c.samples, c.seed, c.threads);
  const auto tree = sample_tree_marginals(p, c.dist, c.steps, c.samples, seed_tree, OffspringLaw::geometric, c.threads);
  for (auto& r : compare_marginals(book, tree, c.steps, c.alpha, "book-vs-tree")) reports.push_back(r);
  if (c.mutant) {
    const auto bad = sample_tree_marginals(p, c.dist, c.steps, c.samples, seed_tree,
                                           OffspringLaw::geometric_from_one, c.threads);
    for (auto& r : compare_marginals(book, bad, c.steps, c.alpha, "book-vs-shifted-offspring")) reports.push_back(r);
  }
  return reports_output(reports, c.format);
}

std::string run_y_chain_test(const RunConfig& c) {
  const double p = c.p.front();
  const auto counts = y_transition_counts(p, c.dist, c.transitions, c.chain_horizon, c.seed);
  const double total = static_cast<double>(counts.total);
  std::vector<TestReport> reports;
  auto band = [&](const std::string& name, std::uint64_t observed, double prob) {
    const double sd = std::sqrt(total * prob * (1.0 - prob));
    const double z = sd > 0 ? (static_cast<double>(observed) - total * prob) / sd : 0.0;
    reports.push_back({name, counts.total, counts.chains, z, 3.0, std::abs(z) <= 3.0});
  };
  const auto& atoms = c.dist.finite().atoms;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    band("append:" + format_real(atoms[k].value), counts.append[k], p * atoms[k].prob.value);
  }
  band("kill", counts.kill, 1.0 - p);
  reports.push_back({"invalid-transitions", counts.total, counts.chains, static_cast<double>(counts.invalid), 0.0,
                     counts.invalid == 0});
  return reports_output(reports, c.format);
}

std::string run_phase_sweep(const RunConfig& c) {
  std::ostringstream os;
  nlohmann::json rows = nlohmann::json::array();
  if (c.format == OutputFormat::csv) os << "p,meanX,probPositive,a,threshold,regime,slope,ci95,fractionPositive\n";
  for (double p : c.p) {
    const auto r = classify(p, c.dist);
    const auto d = drift_estimate(p, c.dist, c.horizon, c.replicas, c.seed, c.threads);
    if (c.format == OutputFormat::csv) {
      os << format_real(p) << ',' << format_real(r.mean_x) << ',' << format_real(r.prob_positive) << ','
         << format_real(r.a) << ',' << format_real(r.threshold) << ',' << to_string(r.regime) << ','
         << format_real(d.slope) << ',' << format_real(d.ci95) << ',' << format_real(d.fraction_positive) << '\n';
    } else {
      auto row = to_json(r);
      row["slope"] = d.slope;
      row["ci95"] = d.ci95;
      row["fractionPositive"] = d.fraction_positive;
      row["horizon"] = d.horizon;
      row["replicas"] = d.replicas;
      rows.push_back(row);
    }
  }
  return c.format == OutputFormat::csv ? os.str() : rows.dump(2) + "\n";
}

nlohmann::json real_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json();
}

std::string run_survival(const RunConfig& c) {
  const double p = c.p.front();
  const double cap = c.caps.empty() ? INFINITY : c.caps.front();
  const auto dist = c.caps.empty() ? c.dist : truncate(c.dist, cap);
  const auto est = survival_estimate(p, dist, c.depths, c.replicas, c.seed, c.threads, c.node_budget);
  std::ostringstream os;
  nlohmann::json rows = nlohmann::json::array();
  if (c.format == OutputFormat::csv) os << "p,K,d,q_d,ci95,budgetFraction\n";
  for (std::size_t i = 0; i < est.depths.size(); ++i) {
    const auto& q = est.q[i];
    const double half = (q.hi - q.lo) / 2.0;
    if (c.format == OutputFormat::csv) {
      os << format_real(p) << ',' << (c.caps.empty() ? "" : format_real(cap)) << ',' << est.depths[i] << ','
         << format_real(q.center) << ',' << format_real(half) << ',' << format_real(est.budget_fraction()) << '\n';
    } else {
      rows.push_back({{"p", p}, {"K", real_or_null(cap)}, {"d", est.depths[i]}, {"q_d", q.center},
                      {"ci95", half}, {"lo", q.lo}, {"hi", q.hi}, {"budgetFraction", est.budget_fraction()}});
    }
  }
  return c.format == OutputFormat::csv ? os.str() : rows.dump(2) + "\n";
}

std::string run_truncation_study(const RunConfig& c) {
  const double p = c.p.front();
  const std::size_t depth = c.depths.back();
  const auto study = truncation_study(p, c.dist, c.caps, depth, c.replicas, c.seed, c.threads, c.node_budget);
  std::ostringstream os;
  nlohmann::json rows = nlohmann::json::array();
  if (c.format == OutputFormat::csv) os << "p,K,a,threshold,d,q_d,ci95,budgetFraction\n";
  for (const auto& row : study.rows) {
    const auto& q = row.survival.q.front();
    const double half = (q.hi - q.lo) / 2.0;
    if (c.format == OutputFormat::csv) {
      os << format_real(p) << ',' << format_real(row.cap) << ',' << format_real(row.a) << ','
         << format_real(row.threshold) << ',' << depth << ',' << format_real(q.center) << ','
         << format_real(half) << ',' << format_real(row.survival.budget_fraction()) << '\n';
    } else {
      rows.push_back({{"p", p}, {"K", real_or_null(row.cap)}, {"a", row.a}, {"threshold", row.threshold},
                      {"d", depth}, {"q_d", q.center}, {"ci95", half}, {"lo", q.lo}, {"hi", q.hi},
                      {"budgetFraction", row.survival.budget_fraction()}});
    }
  }
  if (c.format == OutputFormat::json) {
    return nlohmann::json{{"rows", rows}, {"dominanceViolations", study.dominance_violations}}.dump(2) + "\n";
  }
  return os.str();
}

}  // namespace

std::string execute(const RunConfig& c) {
  switch (c.command) {
    case Command::classify: return run_classify(c);
    case Command::simulate: return run_simulate(c);
    case Command::couple_test: return run_couple_test(c);
    case Command::y_chain_test: return run_y_chain_test(c);
    case Command::phase_sweep: return run_phase_sweep(c);
    case Command::survival: return run_survival(c);
    case Command::truncation_study: return run_truncation_study(c);
  }
  throw std::logic_error("execute: unknown command");
}

void write_file_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

void run(const RunConfig& c, std::ostream& console) {
  const std::string output = execute(c);
  if (c.out.empty()) {
    console << output;
    return;
  }
  write_file_atomically(c.out, output);
  const nlohmann::json meta{{"config", to_json(c)},
                            {"configHash", config_hash(c)},
                            {"seed", c.seed},
                            {"version", software_version()}};
  write_file_atomically(c.out + ".meta.json", meta.dump(2) + "\n");
}

}  // namespace lobtree
