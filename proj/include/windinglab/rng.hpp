// Deterministic per-path random streams. Every path draws from its own
// xoshiro256++ generator whose state is a pure function of
// (master_seed, path_index), so batch results do not depend on how paths are
// scheduled across lanes or workers.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace winding::rng {

struct SeedStream {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
};

// SplitMix64 finalizer (Stafford's mix13 variant).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

class Xoshiro256pp {
 public:
  Xoshiro256pp() : Xoshiro256pp(SeedStream{}) {}

  explicit Xoshiro256pp(SeedStream seed) {
    // Two mixing rounds decorrelate structured (seed, index) pairs before
    // the splitmix chain expands them into generator state.
    std::uint64_t z = mix64(seed.master_seed ^ mix64(seed.path_index ^ 0x5851F42D4C957F2DULL));
    for (auto& w : s_) {
      z = mix64(z);
      w = z;
    }
    // All-zero state is invalid for xoshiro; unreachable from mix64 chains in
    // practice, guarded anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t operator()() {
    const std::uint64_t result = rotl64(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl64(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return double(((*this)() >> 11) + 1) * 0x1.0p-53; }

  const std::array<std::uint64_t, 4>& state() const { return s_; }

 private:
  std::array<std::uint64_t, 4> s_;
};

// Standard normal pair via the polar (Marsaglia) method.
class NormalPairSource {
 public:
  explicit NormalPairSource(SeedStream seed) : gen_(seed) {}

  void pair(double& z1, double& z2) {
    double u, v, q;
    do {
      u = 2.0 * gen_.uniform() - 1.0;
      v = 2.0 * gen_.uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    z1 = u * f;
    z2 = v * f;
  }

  double one() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double a, b;
    pair(a, b);
    spare_ = b;
    have_ = true;
    return a;
  }

  Xoshiro256pp& generator() { return gen_; }

 private:
  Xoshiro256pp gen_;
  double spare_ = 0.0;
  bool have_ = false;
};

// Standard Cauchy draw by inverse transform.
inline double cauchy_draw(Xoshiro256pp& g, double gamma = 1.0) {
  // uniform() < 1 strictly, so the tangent stays finite.
  return gamma * std::tan(3.14159265358979323846 * (g.uniform() - 0.5));
}

}  // namespace winding::rng
