#include <doctest.h>

#include <cmath>
#include <vector>

#include "windinglab/analytic.hpp"
#include "windinglab/lane_math.hpp"
#include "windinglab/rng.hpp"
#include "windinglab/stats.hpp"

using namespace winding;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("per-path streams are deterministic and distinct") {
  rng::Xoshiro256pp a({1234, 7});
  rng::Xoshiro256pp b({1234, 7});
  rng::Xoshiro256pp c({1234, 8});
  bool same = true, differ = false;
  for (int i = 0; i < 64; ++i) {
    const auto av = a();
    same = same && (av == b());
    differ = differ || (av != c());
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("uniform draws stay inside their ranges") {
  rng::Xoshiro256pp g({5, 5});
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform_pos();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("lane xoshiro streams replay the scalar generator") {
  lanes::XoshiroLanes lx;
  std::vector<rng::Xoshiro256pp> scalar;
  for (int l = 0; l < lanes::kLanes; ++l) {
    rng::SeedStream s{77, std::uint64_t(l * 13 + 1)};
    lx.seed_lane(l, s);
    scalar.emplace_back(s);
  }
  lanes::U64s out;
  for (int step = 0; step < 256; ++step) {
    lx.next(out);
    for (int l = 0; l < lanes::kLanes; ++l) CHECK(out.v[l] == scalar[l]());
  }
}

TEST_CASE("lane sincos2pi matches libm to 1e-14") {
  double max_err = 0.0;
  for (int i = 0; i < 100000; ++i) {
    lanes::Doubles u, sn, cs;
    for (int l = 0; l < lanes::kLanes; ++l)
      u.v[l] = (i * lanes::kLanes + l) / double(100000 * lanes::kLanes);
    lanes::lanes_sincos2pi(u, sn, cs);
    for (int l = 0; l < lanes::kLanes; ++l) {
      const double ang = 2.0 * std::numbers::pi * u.v[l];
      max_err = std::max(max_err, std::abs(sn.v[l] - std::sin(ang)));
      max_err = std::max(max_err, std::abs(cs.v[l] - std::cos(ang)));
    }
  }
  CHECK(max_err < 1e-14);
  // exact quarter turns
  lanes::Doubles u{{0.0, 0.25, 0.5, 0.75, 0.125, 0.375, 0.625, 0.875}}, sn, cs;
  lanes::lanes_sincos2pi(u, sn, cs);
  CHECK(sn.v[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cs.v[0] == doctest::Approx(1.0));
  CHECK(sn.v[1] == doctest::Approx(1.0));
  CHECK(std::abs(cs.v[1]) < 1e-15);
  CHECK(std::abs(sn.v[2]) < 1e-15);
  CHECK(cs.v[2] == doctest::Approx(-1.0));
  CHECK(sn.v[3] == doctest::Approx(-1.0));
  CHECK(std::abs(cs.v[3]) < 1e-15);
}

TEST_CASE("lane exp matches libm across the full double range") {
  double max_rel = 0.0;
  for (int i = 0; i <= 14000; ++i) {
    lanes::Doubles x, y;
    for (int l = 0; l < lanes::kLanes; ++l)
      x.v[l] = -700.0 + (i * lanes::kLanes + l) * 1400.0 / (14000.0 * lanes::kLanes);
    lanes::lanes_exp(x, y);
    for (int l = 0; l < lanes::kLanes; ++l) {
      const double ref = std::exp(x.v[l]);
      if (ref > 0.0 && std::isfinite(ref))
        max_rel = std::max(max_rel, std::abs(y.v[l] - ref) / ref);
    }
  }
  CHECK(max_rel < 1e-13);
  lanes::Doubles x{{-800.0, 800.0, 0.0, 1.0, -1.0, 100.0, -100.0, 700.0}}, y;
  lanes::lanes_exp(x, y);
  CHECK(y.v[0] == 0.0);
  CHECK(std::isinf(y.v[1]));
  CHECK(y.v[2] == 1.0);
}

TEST_CASE("normal pair kernels pass marginal normality checks") {
  lanes::XoshiroLanes lx;
  for (int l = 0; l < lanes::kLanes; ++l) lx.seed_lane(l, {2024, std::uint64_t(l)});
  const int steps = 125000;
  std::vector<double> zs;
  zs.reserve(2 * steps * lanes::kLanes);
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  lanes::U64s a, b;
  lanes::Doubles z1, z2;
  double cross = 0.0;
  for (int i = 0; i < steps; ++i) {
    lx.next(a);
    lx.next(b);
    lanes::lanes_normal_pair(a, b, z1, z2);
    for (int l = 0; l < lanes::kLanes; ++l) {
      for (double z : {z1.v[l], z2.v[l]}) {
        zs.push_back(z);
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
      }
      cross += z1.v[l] * z2.v[l];
    }
  }
  const double n = double(zs.size());
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double kurt = sum4 / n / (var * var);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
  CHECK(kurt == doctest::Approx(3.0).epsilon(0.05));
  // the two components of a pair are uncorrelated
  CHECK(std::abs(cross / (n / 2)) < 4.0 / std::sqrt(n / 2));

  auto rep = stats::ks_one_sample(stats::EmpiricalCdf::from_samples(zs), normal_cdf, 1e-4);
  CHECK(rep.p_value > 1e-4);
}

TEST_CASE("polar pair source is also standard normal") {
  rng::NormalPairSource src({11, 3});
  std::vector<double> zs(200000);
  for (std::size_t i = 0; i < zs.size(); i += 2) src.pair(zs[i], zs[i + 1]);
  auto rep = stats::ks_one_sample(stats::EmpiricalCdf::from_samples(zs), normal_cdf, 1e-4);
  CHECK(rep.p_value > 1e-4);
}
