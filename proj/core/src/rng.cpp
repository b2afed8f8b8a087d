#include "smoothwass/rng.hpp"

#include <cmath>
#include <numbers>

#include "smoothwass/errors.hpp"

namespace smoothwass {

namespace {

inline std::uint64_t splitmix64_next(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t chain(std::uint64_t state, std::string_view label) {
  std::uint64_t x = state ^ fnv1a64(label);
  // Two splitmix rounds decorrelate label hashes that differ in few bits.
  splitmix64_next(x);
  return splitmix64_next(x);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

SeedPath::SeedPath(std::uint64_t master) : master_(master) {
  std::uint64_t x = master;
  state_ = splitmix64_next(x);
}

SeedPath SeedPath::child(std::string_view label) const {
  SeedPath out = *this;
  out.state_ = chain(state_, label);
  out.labels_.emplace_back(label);
  return out;
}

SeedPath SeedPath::child(std::uint64_t index) const {
  return child(std::to_string(index));
}

std::string SeedPath::to_string() const {
  std::string out = std::to_string(master_) + ":";
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i) out += '/';
    out += labels_[i];
  }
  return out;
}

SeedPath derive_seed(std::uint64_t master_seed,
                     const std::vector<std::string>& labels) {
  SeedPath path(master_seed);
  for (const auto& l : labels) path = path.child(l);
  return path;
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix64_next(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform01_open_left() { return 1.0 - uniform01(); }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform01_open_left();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw ConfigError("uniform_index: n must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

}  // namespace smoothwass
