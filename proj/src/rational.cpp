#include "lobtree/rational.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace lobtree {
namespace {

__extension__ typedef __int128 i128;

Rational reduce(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 lim = INT64_MAX;
  if (num > lim || num < -lim || den > lim) throw std::overflow_error("rational overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Rational> parse_decimal(std::string_view s) {
  int exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    auto ev = parse_int(s.substr(e + 1));
    if (!ev || *ev > 18 || *ev < -18) return std::nullopt;
    exp10 = static_cast<int>(*ev);
    s = s.substr(0, e);
  }
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  i128 mant = 0;
  int digits = 0;
  bool seen_dot = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    mant = mant * 10 + (c - '0');
    if (seen_dot) --exp10;
    if (++digits > 30) return std::nullopt;
  }
  if (digits == 0) return std::nullopt;
  if (neg) mant = -mant;
  i128 den = 1;
  for (; exp10 > 0; --exp10) mant *= 10;
  for (; exp10 < 0; ++exp10) den *= 10;
  try {
    return reduce(mant, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ == 0) throw std::domain_error("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (const auto g = std::gcd(num_, den_); g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::optional<Rational> Rational::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = parse_int(text.substr(0, slash));
    auto d = parse_int(text.substr(slash + 1));
    if (!n || !d || *d == 0) return std::nullopt;
    return reduce(*n, *d);
  }
  return parse_decimal(text);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const i128 lhs = static_cast<i128>(a.num_) * b.den_;
  const i128 rhs = static_cast<i128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace lobtree
