#include "lobtree/random_stream.hpp"

#include <stdexcept>

#include "lobtree/displacement.hpp"

namespace lobtree {
namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

enum Lane : std::uint64_t {
  kSeqCoin = 0,
  kSeqDisplacement = 1,
  kNodeCoin = 2,
  kNodeDisplacement = 3,
};

__extension__ typedef unsigned __int128 u128;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const u128 prod = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(prod >> 64);
  lo = static_cast<std::uint64_t>(prod);
}

}  // namespace

Philox4x64Counter philox4x64(Philox4x64Counter ctr, Philox4x64Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::substream(std::uint64_t index) const {
  return RandomStream(key_[0], mix64(key_[1] ^ mix64(index)));
}

double RandomStream::next_coin_uniform() {
  return to_unit(philox4x64({coin_index_++, kSeqCoin, 0, 0}, key_)[0]);
}

double RandomStream::next_displacement_uniform() {
  return to_unit(philox4x64({x_index_++, kSeqDisplacement, 0, 0}, key_)[0]);
}

bool RandomStream::coin(double p, DrawAddress) {
  return next_coin_uniform() < p;
}

double RandomStream::displacement(const DisplacementDist& dist, DrawAddress) {
  return dist.quantile(next_displacement_uniform());
}

double AddressedStream::coin_uniform(DrawAddress at) const {
  return to_unit(philox4x64({at.node_key, at.rank, kNodeCoin, 0}, key_)[0]);
}

double AddressedStream::displacement_uniform(DrawAddress at) const {
  return to_unit(philox4x64({at.node_key, at.rank, kNodeDisplacement, 0}, key_)[0]);
}

bool AddressedStream::coin(double p, DrawAddress at) {
  return coin_uniform(at) < p;
}

double AddressedStream::displacement(const DisplacementDist& dist, DrawAddress at) {
  return dist.quantile(displacement_uniform(at));
}

bool ScriptedStream::coin(double, DrawAddress) {
  if (coins_.empty()) throw std::out_of_range("scripted stream: no coins left");
  const bool c = coins_.front();
  coins_.pop_front();
  return c;
}

double ScriptedStream::displacement(const DisplacementDist&, DrawAddress) {
  if (xs_.empty()) throw std::out_of_range("scripted stream: no displacements left");
  const double x = xs_.front();
  xs_.pop_front();
  return x;
}

}  // namespace lobtree
