// Fixed-width 8-lane math kernels for the path engine. Every kernel always
// processes exactly kLanes elements through one code path, so a path's
// arithmetic is identical no matter which lane it occupies or how many lanes
// are active.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

#include "windinglab/rng.hpp"

namespace winding::lanes {

inline constexpr int kLanes = 8;

using Arr = Eigen::Array<double, kLanes, 1>;
using Map = Eigen::Map<Arr, Eigen::Aligned64>;
using CMap = Eigen::Map<const Arr, Eigen::Aligned64>;

struct alignas(64) Doubles {
  double v[kLanes];
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
};

struct alignas(64) U64s {
  std::uint64_t v[kLanes];
};

// kLanes independent xoshiro256++ streams, stored structure-of-arrays.
class XoshiroLanes {
 public:
  void seed_lane(int lane, rng::SeedStream seed) {
    rng::Xoshiro256pp g(seed);
    for (int j = 0; j < 4; ++j) s_[j].v[lane] = g.state()[j];
  }

  void next(U64s& out) {
    for (int l = 0; l < kLanes; ++l) {
      const std::uint64_t r = rng::rotl64(s_[0].v[l] + s_[3].v[l], 23) + s_[0].v[l];
      const std::uint64_t t = s_[1].v[l] << 17;
      s_[2].v[l] ^= s_[0].v[l];
      s_[3].v[l] ^= s_[1].v[l];
      s_[1].v[l] ^= s_[2].v[l];
      s_[0].v[l] ^= s_[3].v[l];
      s_[2].v[l] ^= t;
      s_[3].v[l] = rng::rotl64(s_[3].v[l], 45);
      out.v[l] = r;
    }
  }

 private:
  U64s s_[4] = {};
};

inline void lanes_exp(const Doubles& in, Doubles& out) {
  Map(out.v) = CMap(in.v).exp();
}

// sin(2 pi u), cos(2 pi u) for u in [0, 1). Branchless quadrant reduction with
// Taylor kernels on [-pi/4, pi/4]; max abs error ~1e-15 (checked against libm
// in the unit tests).
inline void lanes_sincos2pi(const Doubles& u, Doubles& sn, Doubles& cs) {
  constexpr double kHalfPi = 1.57079632679489661923;
  for (int l = 0; l < kLanes; ++l) {
    const double w = 4.0 * u.v[l];                 // angle = (pi/2) * w, w in [0, 4)
    const double q = std::nearbyint(w);            // q in {0,...,4}
    const double phi = kHalfPi * (w - q);          // in [-pi/4, pi/4]
    const int iq = int(q) & 3;
    const double p2 = phi * phi;

    double sp = 7.6471637318198164e-13;
    sp = 1.6059043836821613e-10 - p2 * sp;
    sp = 2.5052108385441719e-08 - p2 * sp;
    sp = 2.7557319223985893e-06 - p2 * sp;
    sp = 1.9841269841269841e-04 - p2 * sp;
    sp = 8.3333333333333332e-03 - p2 * sp;
    sp = 1.6666666666666666e-01 - p2 * sp;
    sp = phi * (1.0 - p2 * sp);                    // sin(phi)

    double cq = 4.7794773323873853e-14;
    cq = 1.1470745597729725e-11 - p2 * cq;
    cq = 2.0876756987868099e-09 - p2 * cq;
    cq = 2.7557319223985888e-07 - p2 * cq;
    cq = 2.4801587301587302e-05 - p2 * cq;
    cq = 1.3888888888888889e-03 - p2 * cq;
    cq = 4.1666666666666664e-02 - p2 * cq;
    cq = 0.5 - p2 * cq;
    cq = 1.0 - p2 * cq;                            // cos(phi)

    const bool swap = iq & 1;
    const double s_base = swap ? cq : sp;
    const double c_base = swap ? sp : cq;
    sn.v[l] = (iq & 2) ? -s_base : s_base;
    cs.v[l] = ((iq + 1) & 2) ? -c_base : c_base;
  }
}

// One standard-normal pair per lane (Box-Muller). Consumes two raw draws per
// lane; u1 lands in (0, 1] so the log argument never vanishes.
inline void lanes_normal_pair(const U64s& raw1, const U64s& raw2, Doubles& z1, Doubles& z2) {
  Doubles u1, u2, r;
  for (int l = 0; l < kLanes; ++l) u1.v[l] = double((raw1.v[l] >> 11) + 1) * 0x1.0p-53;
  for (int l = 0; l < kLanes; ++l) u2.v[l] = double(raw2.v[l] >> 11) * 0x1.0p-53;
  Map(r.v) = (-2.0 * CMap(u1.v).log()).sqrt();
  Doubles sn, cs;
  lanes_sincos2pi(u2, sn, cs);
  for (int l = 0; l < kLanes; ++l) z1.v[l] = r.v[l] * cs.v[l];
  for (int l = 0; l < kLanes; ++l) z2.v[l] = r.v[l] * sn.v[l];
}

}  // namespace winding::lanes
