#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>

namespace lobtree {

class DisplacementDist;

using Philox4x64Counter = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

/// Philox4x64-10 block function (Salmon et al., SC'11).
Philox4x64Counter philox4x64(Philox4x64Counter ctr, Philox4x64Key key);

/// Maps 64 random bits onto [0, 1) with 53 bits of resolution.
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Bijective 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Key of the rank-th child of a node, used to address per-node randomness.
inline std::uint64_t child_key(std::uint64_t parent, std::uint32_t rank) {
  return mix64(parent ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(rank) + 1)));
}

/// Where in a tree a draw is made: the node's key and the rank of the child
/// whose existence/edge label is being decided. Sequential sources ignore it.
struct DrawAddress {
  std::uint64_t node_key = 0;
  std::uint32_t rank = 0;
};

/// Source of the two kinds of randomness the model consumes: Bernoulli(p)
/// coins and draws of the displacement X.
class DrawSource {
 public:
  virtual ~DrawSource() = default;
  virtual bool coin(double p, DrawAddress at) = 0;
  virtual double displacement(const DisplacementDist& dist, DrawAddress at) = 0;
};

/// Sequential counter-based stream. Coins and displacements live on disjoint
/// lanes, so a consumer that draws (coin, then x on heads) sees the same
/// values regardless of how the two lanes interleave.
class RandomStream final : public DrawSource {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key_{seed, stream_id} {}

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return key_[1]; }
  std::uint64_t coins_drawn() const { return coin_index_; }
  std::uint64_t displacements_drawn() const { return x_index_; }

  /// Independent stream for replica `index` nested under this one.
  RandomStream substream(std::uint64_t index) const;

  double next_coin_uniform();
  double next_displacement_uniform();

  bool coin(double p, DrawAddress at = {}) override;
  double displacement(const DisplacementDist& dist, DrawAddress at = {}) override;

 private:
  Philox4x64Key key_;
  std::uint64_t coin_index_ = 0;
  std::uint64_t x_index_ = 0;
};

/// Node-addressed stream: the coin deciding whether node v has a child of
/// rank r, and that child's edge label, depend only on (seed, stream, v, r).
/// Trees built from it are therefore identical no matter the exploration
/// order, and nested in p under a shared seed.
class AddressedStream final : public DrawSource {
 public:
  AddressedStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key_{seed, stream_id} {}

  /// Root key of the `index`-th tree drawn by this stream.
  static std::uint64_t tree_root_key(std::uint64_t index) { return mix64(index + 0x5851F42D4C957F2DULL); }

  double coin_uniform(DrawAddress at) const;
  double displacement_uniform(DrawAddress at) const;

  bool coin(double p, DrawAddress at) override;
  double displacement(const DisplacementDist& dist, DrawAddress at) override;

 private:
  Philox4x64Key key_;
};

/// Replays a fixed script of coins and displacements; throws
/// std::out_of_range once a script runs dry.
class ScriptedStream final : public DrawSource {
 public:
  ScriptedStream() = default;
  ScriptedStream& heads(double x) {
    coins_.push_back(true);
    xs_.push_back(x);
    return *this;
  }
  ScriptedStream& tails() {
    coins_.push_back(false);
    return *this;
  }

  std::size_t remaining_coins() const { return coins_.size(); }

  bool coin(double p, DrawAddress at) override;
  double displacement(const DisplacementDist& dist, DrawAddress at) override;

 private:
  std::deque<bool> coins_;
  std::deque<double> xs_;
};

}  // namespace lobtree
