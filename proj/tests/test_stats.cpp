#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "windinglab/analytic.hpp"
#include "windinglab/rng.hpp"
#include "windinglab/stats.hpp"

using namespace winding;
using stats::EmpiricalCdf;

namespace {

std::vector<double> cauchy_samples(std::size_t n, std::uint64_t seed, double gamma = 1.0) {
  rng::Xoshiro256pp g({seed, 0});
  std::vector<double> out(n);
  for (auto& x : out) x = rng::cauchy_draw(g, gamma);
  return out;
}

}  // namespace

TEST_CASE("ecdf evaluation contract") {
  auto e = EmpiricalCdf::from_samples(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(e(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(e(0.0) == 0.0);
  CHECK(e(3.0) == 1.0);
  auto single = EmpiricalCdf::from_samples(std::vector<double>{5.0});
  CHECK(single(4.9) == 0.0);
  CHECK(single(5.0) == 1.0);
  CHECK_THROWS_AS(EmpiricalCdf::from_samples(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalCdf::from_samples(std::vector<double>{1.0, std::nan("")}),
                  std::invalid_argument);
}

TEST_CASE("ecdf is a non-decreasing right-continuous step function") {
  rng::Xoshiro256pp g({99, 1});
  std::vector<double> xs(500);
  for (auto& x : xs) x = std::floor(20.0 * g.uniform());  // forces ties
  auto e = EmpiricalCdf::from_samples(xs);
  double prev = 0.0;
  for (double q = -1.0; q <= 21.0; q += 0.05) {
    const double v = e(q);
    CHECK(v >= prev);
    prev = v;
  }
  for (double x : {0.0, 5.0, 19.0}) {
    CHECK(e(x) == e(std::nextafter(x, 1e9)));     // right-continuous
    CHECK(e(std::nextafter(x, -1e9)) <= e(x));
  }
}

TEST_CASE("kolmogorov tail: branch continuity and limits") {
  // The two evaluation branches are algebraically the same function.
  for (double lam : {0.74, 0.75, 0.755, 0.76, 0.77}) {
    double direct = 0.0, sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
      direct += sign * 2.0 * std::exp(-2.0 * k * k * lam * lam);
      sign = -sign;
    }
    CHECK(stats::kolmogorov_tail(lam) == doctest::Approx(direct).epsilon(1e-10));
  }
  CHECK(stats::kolmogorov_tail(0.05) == 1.0);
  CHECK(stats::kolmogorov_tail(4.0) < 1e-12);
  double prev = 1.0;
  for (double lam = 0.3; lam < 3.0; lam += 0.05) {
    const double q = stats::kolmogorov_tail(lam);
    CHECK(q <= prev + 1e-15);
    prev = q;
  }
}

TEST_CASE("ks one-sample: inverse-transform self test") {
  rng::Xoshiro256pp g({123, 5});
  std::vector<double> xs(10000);
  for (auto& x : xs) x = std::tan(std::numbers::pi * (g.uniform() - 0.5));
  auto rep = stats::ks_one_sample(EmpiricalCdf::from_samples(xs),
                                  [](double x) { return analytic::spitzer_cdf(x); }, 0.001);
  CHECK(rep.p_value > 0.001);
  CHECK(rep.passed);
  CHECK(rep.n1 == 10000);
  CHECK_FALSE(rep.n2.has_value());
}

TEST_CASE("ks one-sample: statistic bounded by 1/n when F matches the sample grid") {
  const std::size_t n = 64;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = (double(i) + 0.5) / double(n);
  auto rep = stats::ks_one_sample(EmpiricalCdf::from_samples(xs),
                                  [](double x) { return std::clamp(x, 0.0, 1.0); }, 0.05);
  CHECK(rep.statistic <= 1.0 / double(n) + 1e-12);
}

TEST_CASE("ks one-sample: brute-force enumeration and dense-grid oracle") {
  auto check_against_grid = [](const std::vector<double>& xs) {
    auto e = EmpiricalCdf::from_samples(xs);
    auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    auto rep = stats::ks_one_sample(e, cdf, 0.05);
    // Enumerated gaps at sample points.
    std::vector<double> s = xs;
    std::sort(s.begin(), s.end());
    double brute = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      brute = std::max(brute, std::abs(double(i + 1) / double(s.size()) - cdf(s[i])));
      brute = std::max(brute, std::abs(cdf(s[i]) - double(i) / double(s.size())));
    }
    CHECK(rep.statistic == doctest::Approx(brute).epsilon(1e-12));
    // Dense sweep of sup|F_hat - F| as a second, formula-free route.
    double sup = 0.0;
    for (int k = 0; k <= 1000000; ++k) {
      const double x = double(k) / 1000000.0;
      sup = std::max(sup, std::abs(e(x) - cdf(x)));
    }
    CHECK(rep.statistic == doctest::Approx(sup).epsilon(3e-6));
  };
  // Spec's scale: a 16-point sample, plus a tiny hand-built one padded to the
  // n >= 10 precondition.
  rng::Xoshiro256pp g({7, 3});
  std::vector<double> xs(16);
  for (auto& x : xs) x = g.uniform();
  check_against_grid(xs);
  check_against_grid({0.05, 0.2, 0.2, 0.33, 0.41, 0.5, 0.62, 0.62, 0.8, 0.8, 0.97});
}

TEST_CASE("ks one-sample: contract violations") {
  auto e = EmpiricalCdf::from_samples(cauchy_samples(100, 17));
  CHECK_THROWS_AS(stats::ks_one_sample(e, [](double) { return 1.5; }, 0.01),
                  std::invalid_argument);
  auto tiny = EmpiricalCdf::from_samples(std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(stats::ks_one_sample(tiny, [](double) { return 0.5; }, 0.01),
                  std::invalid_argument);
}

TEST_CASE("ks two-sample: identical, disjoint, and null-hypothesis samples") {
  auto a = cauchy_samples(10000, 31);
  auto ea = EmpiricalCdf::from_samples(a);
  auto same = stats::ks_two_sample(ea, ea, 0.001);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  std::vector<double> lo(50), hi(50);
  for (int i = 0; i < 50; ++i) {
    lo[i] = i;
    hi[i] = 1000 + i;
  }
  auto disjoint = stats::ks_two_sample(EmpiricalCdf::from_samples(lo),
                                       EmpiricalCdf::from_samples(hi), 0.001);
  CHECK(disjoint.statistic == doctest::Approx(1.0));

  auto b = cauchy_samples(10000, 32);
  auto null_rep = stats::ks_two_sample(ea, EmpiricalCdf::from_samples(b), 0.001);
  CHECK(null_rep.p_value > 0.001);
  CHECK(null_rep.passed);
}

TEST_CASE("ks statistics are invariant under increasing transformations") {
  auto a = cauchy_samples(2000, 41);
  auto b = cauchy_samples(3000, 42);
  auto base = stats::ks_two_sample(EmpiricalCdf::from_samples(a),
                                   EmpiricalCdf::from_samples(b), 0.01);
  auto expa = a, expb = b;
  for (auto& x : expa) x = std::exp(std::atan(x));  // strictly increasing map
  for (auto& x : expb) x = std::exp(std::atan(x));
  auto mapped = stats::ks_two_sample(EmpiricalCdf::from_samples(expa),
                                     EmpiricalCdf::from_samples(expb), 0.01);
  CHECK(base.statistic == mapped.statistic);
  CHECK(base.p_value == mapped.p_value);
}

TEST_CASE("ks p-value decreases in the statistic at fixed n") {
  const std::size_t n = 500;
  double prev_p = 1.1;
  for (double d : {0.02, 0.04, 0.08, 0.16, 0.32}) {
    const double p = stats::kolmogorov_tail(std::sqrt(double(n)) * d);
    CHECK(p < prev_p);
    prev_p = p;
  }
}

TEST_CASE("proportion_check: exact ratio, degenerate, and error cases") {
  auto exact = stats::proportion_check(5000, 10000, 2500, 10000, 2.0);
  CHECK(exact.passed);
  CHECK(exact.z == doctest::Approx(0.0).epsilon(1e-12));

  auto degenerate = stats::proportion_check(0, 1000, 0, 1000, 2.0);
  CHECK(degenerate.passed);
  CHECK(degenerate.degenerate);

  CHECK_THROWS_AS(stats::proportion_check(11, 10, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(stats::proportion_check(1, 0, 1, 10), std::invalid_argument);

  // A gross violation of the doubled ratio fails at 3 sigma.
  auto off = stats::proportion_check(5000, 10000, 5000, 10000, 2.0);
  CHECK_FALSE(off.passed);
}

TEST_CASE("dkw band: closed form and limits") {
  CHECK(stats::dkw_band(10000, 0.99) == doctest::Approx(0.016276).epsilon(1e-3));
  CHECK(stats::dkw_band(100000000, 0.99) < 2e-4);
  // confidence -> 0+ approaches sqrt(ln 2 / 2n)
  CHECK(stats::dkw_band(100, 1e-12) ==
        doctest::Approx(std::sqrt(std::log(2.0) / 200.0)).epsilon(1e-6));
  CHECK_THROWS_AS(stats::dkw_band(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(stats::dkw_band(10, 1.0), std::invalid_argument);
}
