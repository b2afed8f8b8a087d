#ifndef SMOOTHWASS_RNG_HPP_
#define SMOOTHWASS_RNG_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace smoothwass {

// Hierarchical, collision-resistant stream derivation.  A SeedPath is a
// master seed plus an ordered list of labels; every (master, labels) pair
// maps to one 64-bit stream seed via a hash chain, so disjoint label paths
// give independent streams and reruns are reproducible.
class SeedPath {
 public:
  SeedPath() = default;
  explicit SeedPath(std::uint64_t master);

  SeedPath child(std::string_view label) const;
  SeedPath child(std::uint64_t index) const;

  std::uint64_t master() const { return master_; }
  std::uint64_t stream() const { return state_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // "12345:a/b/3" — used in reports and CSV rows.
  std::string to_string() const;

 private:
  std::uint64_t master_ = 0;
  std::uint64_t state_ = 0;
  std::vector<std::string> labels_;
};

SeedPath derive_seed(std::uint64_t master_seed,
                     const std::vector<std::string>& labels);

// xoshiro256++ with splitmix64 seeding.  All sampling goes through this
// generator (never <random> distributions) so streams are identical across
// standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  explicit Rng(const SeedPath& path) : Rng(path.stream()) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform on (0, 1] (never zero; safe under log).
  double uniform01_open_left();

  // Standard normal via Box-Muller; the paired value is cached.
  double normal();

  // Index uniform on {0, ..., n-1} by rejection (unbiased).
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace smoothwass

#endif  // SMOOTHWASS_RNG_HPP_
