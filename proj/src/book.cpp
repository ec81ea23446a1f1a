#include "lobtree/book.hpp"

#include <ostream>
#include <stdexcept>

#include "lobtree/format.hpp"

namespace lobtree {

Book::Book(std::initializer_list<std::pair<double, std::uint64_t>> orders) {
  for (const auto& [x, n] : orders) add(x, n);
}

void Book::add(double x, std::uint64_t count) {
  if (count == 0) return;
  orders_[x] += count;
  mass_ += count;
}

void Book::remove_one(double x) {
  auto it = orders_.find(x);
  if (it == orders_.end()) throw std::out_of_range("no order at " + format_real(x));
  if (--it->second == 0) orders_.erase(it);
  --mass_;
}

std::uint64_t Book::count_at(double x) const {
  auto it = orders_.find(x);
  return it == orders_.end() ? 0 : it->second;
}

std::ostream& operator<<(std::ostream& os, const Book& book) {
  os << '{';
  bool first = true;
  for (const auto& [x, n] : book.orders()) {
    if (!first) os << ", ";
    first = false;
    os << format_real(x);
    if (n != 1) os << 'x' << n;
  }
  return os << '}';
}

const char* to_string(BookEvent e) {
  switch (e) {
    case BookEvent::add: return "add";
    case BookEvent::remove: return "remove";
    case BookEvent::restart: return "restart";
    case BookEvent::none: break;
  }
  return "";
}

BookEvent step_in_place(Book& book, bool heads, double x) {
  if (book.empty()) {
    book.add(0.0);
    return BookEvent::restart;
  }
  const double p = book.price();
  if (heads) {
    book.add(p + x);
    return BookEvent::add;
  }
  book.remove_one(p);
  return BookEvent::remove;
}

Book step(const Book& book, bool heads, double x) {
  Book next = book;
  step_in_place(next, heads, x);
  return next;
}

double price(const Book& book) {
  return book.price();
}

namespace {

BookEvent advance(Book& book, double p, const DisplacementDist& dist, DrawSource& stream) {
  if (book.empty()) return step_in_place(book, false, 0.0);
  const bool heads = stream.coin(p, {});
  const double x = heads ? stream.displacement(dist, {}) : 0.0;
  return step_in_place(book, heads, x);
}

}  // namespace

BookTrajectory simulate(double p, const DisplacementDist& dist, std::size_t horizon,
                        DrawSource& stream, SimulateOptions options) {
  BookTrajectory traj;
  traj.prices.reserve(horizon + 1);
  traj.masses.reserve(horizon + 1);
  traj.events.reserve(horizon + 1);
  Book book = Book::delta(0.0);
  auto record = [&](BookEvent e) {
    traj.prices.push_back(book.price());
    traj.masses.push_back(book.mass());
    traj.events.push_back(e);
    if (options.store_states) traj.states.push_back(book);
    if (book.empty() && !traj.tau) traj.tau = traj.prices.size() - 1;
  };
  record(BookEvent::none);
  for (std::size_t n = 0; n < horizon; ++n) record(advance(book, p, dist, stream));
  return traj;
}

BookEndpoint simulate_endpoint(double p, const DisplacementDist& dist, std::size_t horizon,
                               DrawSource& stream) {
  BookEndpoint out{Book::delta(0.0), std::nullopt};
  for (std::size_t n = 1; n <= horizon; ++n) {
    advance(out.book, p, dist, stream);
    if (out.book.empty() && !out.tau) out.tau = n;
  }
  return out;
}

std::optional<std::size_t> extinction_time(const BookTrajectory& traj) {
  for (std::size_t n = 0; n < traj.masses.size(); ++n) {
    if (traj.masses[n] == 0) return n;
  }
  return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const BookTrajectory& traj) {
  os << "step,price,mass,event\n";
  for (std::size_t n = 0; n < traj.prices.size(); ++n) {
    os << n << ',' << format_real(traj.prices[n]) << ',' << traj.masses[n] << ','
       << to_string(traj.events[n]) << '\n';
  }
}

}  // namespace lobtree
