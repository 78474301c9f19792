#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace tacgraph {

// Seeded random stream with explicit scalar conversions.
//
// std::uniform_real_distribution and std::normal_distribution are
// implementation-defined, which would break byte-identical scenario
// generation across standard libraries. All conversions here are done by
// hand on top of mt19937_64 so a seed always yields the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range via rejection-free modulo of a wide draw.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  // Standard normal via Box-Muller. One fresh pair per call keeps the
  // stream position independent of call history.
  double normal();

  Eigen::Vector3d normal3() {
    Eigen::Vector3d v;
    v << normal(), normal(), normal();
    return v;
  }

  // Uniformly distributed unit quaternion (Shoemake).
  Eigen::Quaterniond random_rotation();

 private:
  std::mt19937_64 gen_;
};

}  // namespace tacgraph
