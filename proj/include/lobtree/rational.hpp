#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lobtree {

/// Exact fraction num/den with den > 0, always stored in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Parses "2/3", "-1", "0.25" or "1e-3" style decimal text exactly.
  static std::optional<Rational> parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// A probability carried as a double, plus its exact value when it was given
/// as a fraction or decimal string.
struct Probability {
  double value = 0.0;
  std::optional<Rational> exact;

  static Probability from_double(double v) { return {v, std::nullopt}; }
  static Probability from_rational(const Rational& r) { return {r.to_double(), r}; }
};

}  // namespace lobtree
