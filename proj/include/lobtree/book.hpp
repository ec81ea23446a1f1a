#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "lobtree/displacement.hpp"
#include "lobtree/random_stream.hpp"

namespace lobtree {

/// Finite point measure on the line: resting buy orders with multiplicity.
/// Orders at bit-identical positions share one entry.
class Book {
 public:
  Book() = default;
  Book(std::initializer_list<std::pair<double, std::uint64_t>> orders);

  static Book delta(double x) { return Book{{x, 1}}; }

  /// Rightmost order; 0 for the empty book.
  double price() const { return orders_.empty() ? 0.0 : orders_.rbegin()->first; }
  std::uint64_t mass() const { return mass_; }
  bool empty() const { return mass_ == 0; }

  void add(double x, std::uint64_t count = 1);
  /// Removes one order at x; throws std::out_of_range if there is none.
  void remove_one(double x);
  std::uint64_t count_at(double x) const;

  const std::map<double, std::uint64_t>& orders() const { return orders_; }

  friend bool operator==(const Book&, const Book&) = default;

 private:
  std::map<double, std::uint64_t> orders_;
  std::uint64_t mass_ = 0;
};

std::ostream& operator<<(std::ostream& os, const Book& book);

enum class BookEvent : std::uint8_t { none, add, remove, restart };

const char* to_string(BookEvent e);

/// One transition of the chain. An empty book restarts at delta_0; otherwise
/// heads adds an order at price + x and tails removes one order at the price.
Book step(const Book& book, bool heads, double x);

/// In-place form of `step`; returns what happened.
BookEvent step_in_place(Book& book, bool heads, double x);

double price(const Book& book);

struct BookTrajectory {
  std::vector<double> prices;
  std::vector<std::uint64_t> masses;
  std::vector<BookEvent> events;  // events[n] produced state n; events[0] = none
  std::vector<Book> states;       // filled only when requested
  std::optional<std::size_t> tau;
};

struct SimulateOptions {
  bool store_states = false;
};

/// Runs the chain from delta_0 for `horizon` steps. A coin is drawn only when
/// the book is nonempty, followed by one displacement on heads.
BookTrajectory simulate(double p, const DisplacementDist& dist, std::size_t horizon,
                        DrawSource& stream, SimulateOptions options = {});

/// Final state only; no per-step storage.
struct BookEndpoint {
  Book book;
  std::optional<std::size_t> tau;
};
BookEndpoint simulate_endpoint(double p, const DisplacementDist& dist, std::size_t horizon,
                               DrawSource& stream);

std::optional<std::size_t> extinction_time(const BookTrajectory& traj);

/// CSV with header `step,price,mass,event`.
void write_trajectory_csv(std::ostream& os, const BookTrajectory& traj);

}  // namespace lobtree
