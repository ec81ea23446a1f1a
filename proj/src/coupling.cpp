#include "lobtree/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "lobtree/parallel.hpp"
#include "lobtree/phi_engine.hpp"
#include "lobtree/tree_ops.hpp"

namespace lobtree {

namespace {

GwSpec engine_spec(double p, const DisplacementDist& dist, OffspringLaw law = OffspringLaw::geometric) {
  GwSpec spec;
  spec.p = p;
  spec.dist = dist;
  spec.law = law;
  return spec;
}

bool events_agree(BookEvent book_event, double book_label, const PhiStep& tree_step, bool regenerated) {
  switch (book_event) {
    case BookEvent::restart: return regenerated;
    case BookEvent::add: return !regenerated && tree_step.kind == PhiKind::grew && tree_step.label == book_label;
    case BookEvent::remove: return !regenerated && tree_step.kind == PhiKind::killed && tree_step.label == book_label;
    case BookEvent::none: break;
  }
  return false;
}

}  // namespace

CoupledRun coupled_run(double p, const DisplacementDist& dist, std::size_t horizon,
                       std::uint64_t seed, const CoupledRunOptions& options) {
  RandomStream book_source(seed, 0);
  RandomStream tree_source(seed, 0);
  return coupled_run(p, dist, horizon, book_source, tree_source, options);
}

CoupledRun coupled_run(double p, const DisplacementDist& dist, std::size_t horizon,
                       DrawSource& book_source, DrawSource& tree_source,
                       const CoupledRunOptions& options) {
  CoupledRun run;
  auto& traj = run.book_traj;
  traj.prices.reserve(horizon + 1);
  traj.masses.reserve(horizon + 1);
  traj.events.reserve(horizon + 1);

  Book book = Book::delta(0.0);
  std::uint64_t trees_drawn = 0;
  PhiEngine engine(engine_spec(p, dist), AddressedStream::tree_root_key(trees_drawn));
  std::size_t segment_start = 0;

  auto record = [&](BookEvent e) {
    traj.prices.push_back(book.price());
    traj.masses.push_back(book.mass());
    traj.events.push_back(e);
    if (options.store_books) {
      traj.states.push_back(book);
      run.tree_books.push_back(engine.green_book());
    }
  };
  record(BookEvent::none);
  if (!(engine.green_book() == book)) run.first_mismatch = 0;

  for (std::size_t n = 1; n <= horizon && run.matched(); ++n) {
    // Book side: restart, or one coin then one displacement on heads.
    BookEvent event;
    double event_label = 0.0;
    if (book.empty()) {
      book.add(0.0);
      event = BookEvent::restart;
    } else {
      const bool heads = book_source.coin(p, {});
      const double x = heads ? book_source.displacement(dist, {}) : 0.0;
      event_label = heads ? book.price() + x : book.price();
      event = step_in_place(book, heads, x);
    }

    // Tree side: fresh tree once no green node is left, else one step.
    PhiStep tree_step;
    const bool regenerated = !engine.price_node().has_value();
    if (regenerated) {
      engine.reset(AddressedStream::tree_root_key(++trees_drawn));
      run.regeneration_steps.push_back(n);
      segment_start = n;
    } else {
      tree_step = engine.step(tree_source);
      if (!engine.price_node()) {
        run.kappas.push_back(engine.steps());
        run.taus.push_back(n - segment_start);
      }
    }
    record(event);

    const Book& measure = engine.green_book();
    bool ok = events_agree(event, event_label, tree_step, regenerated) &&
              measure.mass() == book.mass() && measure.price() == book.price();
    const bool full = n % options.full_check_every == 0 || n == horizon || regenerated;
    if (ok && full) {
      ok = measure == book;
      ++run.full_checks;
    }
    if (ok && (n % options.scan_check_every == 0 || n == horizon)) {
      ok = green_measure(engine.tree()) == book;
    }
    if (!ok) run.first_mismatch = n;
  }
  for (std::size_t n = 0; n < traj.masses.size(); ++n) {
    if (traj.masses[n] == 0) {
      traj.tau = n;
      break;
    }
  }
  return run;
}

std::vector<ColoredTree> y_chain(double p, const DisplacementDist& dist, std::size_t horizon,
                                 DrawSource& source, std::uint64_t root_key) {
  if (!dist.is_discrete()) throw std::invalid_argument("y_chain: displacement law must be discrete");
  PhiEngine engine(engine_spec(p, dist), root_key);
  std::vector<ColoredTree> ys{engine.tree()};
  for (std::size_t n = 0; n < horizon && engine.price_node(); ++n) {
    engine.step(source);
    ys.push_back(engine.tree());
  }
  return ys;
}

YTransition classify_transition(const ColoredTree& prev, const ColoredTree& next,
                                const DisplacementDist& dist) {
  if (prev.green_count() == 0) return {next == prev ? YMove::stay : YMove::invalid, 0.0};
  if (next.size() == prev.size()) {
    return {next == kill_price_node(prev) ? YMove::kill : YMove::invalid, 0.0};
  }
  for (const auto& atom : dist.finite().atoms) {
    if (next == append_green_child(prev, atom.value)) return {YMove::append, atom.value};
  }
  return {YMove::invalid, 0.0};
}

YTransitionCounts y_transition_counts(double p, const DisplacementDist& dist,
                                      std::uint64_t transitions, std::size_t chain_horizon,
                                      std::uint64_t seed) {
  if (!dist.is_discrete()) throw std::invalid_argument("y_transition_counts: displacement law must be discrete");
  YTransitionCounts counts;
  for (const auto& atom : dist.finite().atoms) counts.support.push_back(atom.value);
  counts.append.assign(counts.support.size(), 0);
  while (counts.total < transitions) {
    RandomStream source(seed, counts.chains);
    const auto ys = y_chain(p, dist, chain_horizon, source, AddressedStream::tree_root_key(counts.chains));
    ++counts.chains;
    for (std::size_t n = 0; n + 1 < ys.size() && counts.total < transitions; ++n) {
      if (ys[n].green_count() == 0) continue;
      ++counts.total;
      const auto t = classify_transition(ys[n], ys[n + 1], dist);
      switch (t.move) {
        case YMove::append:
          for (std::size_t k = 0; k < counts.support.size(); ++k) {
            if (counts.support[k] == t.edge) ++counts.append[k];
          }
          break;
        case YMove::kill: ++counts.kill; break;
        default: ++counts.invalid; break;
      }
    }
  }
  return counts;
}

std::vector<ColoredTree> reconstruct_y(const std::vector<Book>& measures) {
  if (measures.empty()) return {};
  if (!(measures.front() == Book::delta(0.0))) {
    throw std::invalid_argument("reconstruct_y: sequence must start at delta_0");
  }
  std::vector<ColoredTree> ys{ColoredTree()};
  for (std::size_t n = 1; n < measures.size(); ++n) {
    const Book& before = measures[n - 1];
    const Book& after = measures[n];
    const ColoredTree& y = ys.back();
    if (after == before) {
      if (y.green_count() != 0) throw std::invalid_argument("reconstruct_y: unchanged measure with a green node");
      ys.push_back(y);
      continue;
    }
    if (y.green_count() == 0) throw std::invalid_argument("reconstruct_y: change without a green node");
    if (after.mass() == before.mass() + 1) {
      // The new order sits where the counts differ.
      double added = NAN;
      for (const auto& [x, c] : after.orders()) {
        if (before.count_at(x) + 1 == c) {
          added = x;
          break;
        }
      }
      if (std::isnan(added)) throw std::invalid_argument("reconstruct_y: no added order found");
      ys.push_back(append_green_child(y, added - y.label(price_node(y))));
    } else if (after.mass() + 1 == before.mass()) {
      ys.push_back(kill_price_node(y));
    } else {
      throw std::invalid_argument("reconstruct_y: measures differ by more than one order");
    }
    if (!(green_measure(ys.back()) == after)) {
      throw std::invalid_argument("reconstruct_y: measure not reproduced at step " + std::to_string(n));
    }
  }
  return ys;
}

MarginalSamples sample_book_marginals(double p, const DisplacementDist& dist, std::size_t n,
                                      std::size_t m, std::uint64_t seed, unsigned threads) {
  MarginalSamples out;
  out.prices.resize(m);
  out.masses.resize(m);
  parallel_for(m, threads, [&](std::size_t i) {
    RandomStream source(seed, i);
    const auto end = simulate_endpoint(p, dist, n, source);
    out.prices[i] = end.book.price();
    out.masses[i] = end.book.mass();
  });
  return out;
}

MarginalSamples sample_tree_marginals(double p, const DisplacementDist& dist, std::size_t n,
                                      std::size_t m, std::uint64_t seed, OffspringLaw law,
                                      unsigned threads) {
  MarginalSamples out;
  out.prices.resize(m);
  out.masses.resize(m);
  parallel_for(m, threads, [&](std::size_t i) {
    AddressedStream source(seed, i);
    std::uint64_t trees = 0;
    PhiEngine engine(engine_spec(p, dist, law), AddressedStream::tree_root_key(trees));
    for (std::size_t k = 0; k < n; ++k) {
      if (engine.price_node()) {
        engine.step(source);
      } else {
        engine.reset(AddressedStream::tree_root_key(++trees));
      }
    }
    out.prices[i] = engine.green_book().price();
    out.masses[i] = engine.green_book().mass();
  });
  return out;
}

nlohmann::json to_json(const TestReport& r) {
  return {{"test", r.test}, {"n", r.n}, {"m", r.m}, {"statistic", r.statistic},
          {"threshold", r.threshold}, {"pass", r.pass}};
}

std::vector<TestReport> compare_marginals(const MarginalSamples& a, const MarginalSamples& b,
                                          std::size_t n, double alpha, const std::string& label) {
  const double level = alpha / 2.0;
  std::vector<TestReport> reports;

  const auto ks = ks_two_sample(a.prices, b.prices);
  TestReport price{label + ":price-ks", n, a.prices.size(), ks.statistic,
                   ks_critical_value(a.prices.size(), b.prices.size(), level), false};
  price.pass = ks.statistic <= price.threshold;
  reports.push_back(price);

  CountTable ca, cb;
  for (auto v : a.masses) ++ca[static_cast<std::int64_t>(v)];
  for (auto v : b.masses) ++cb[static_cast<std::int64_t>(v)];
  const auto chi = chi_square_two_sample(ca, cb, level);
  TestReport mass{label + ":mass-chisq", n, a.masses.size(), chi.statistic, chi.critical, false};
  mass.pass = chi.statistic <= mass.threshold;
  reports.push_back(mass);
  return reports;
}

std::vector<TestReport> distributional_test(double p, const DisplacementDist& dist, std::size_t n,
                                            std::size_t m, std::uint64_t seed_book,
                                            std::uint64_t seed_tree, double alpha, OffspringLaw law,
                                            unsigned threads) {
  const auto book = sample_book_marginals(p, dist, n, m, seed_book, threads);
  const auto tree = sample_tree_marginals(p, dist, n, m, seed_tree, law, threads);
  return compare_marginals(book, tree, n, alpha, "book-vs-tree");
}

}  // namespace lobtree
