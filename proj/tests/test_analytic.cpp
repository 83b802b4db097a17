#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "windinglab/analytic.hpp"
#include "windinglab/rng.hpp"

using namespace winding;
using analytic::v_of;
namespace {
constexpr double kPi = std::numbers::pi;

// Independent 2D route for V(a): midpoint counting of the region
// {tan(v) <= a tan(u)} on the (u,v) square, which never forms the inner
// arctan reduction used by the implementation.
double v_region_count(double a, int n) {
  std::vector<double> tans(n);
  const double h = (kPi / 2.0) / n;
  for (int i = 0; i < n; ++i) tans[i] = std::tan((i + 0.5) * h);
  double cells = 0;
  for (int i = 0; i < n; ++i) {
    const double lim = a * tans[i];
    cells += std::upper_bound(tans.begin(), tans.end(), lim) - tans.begin();
  }
  return 4.0 / (kPi * kPi) * cells * h * h;
}

// Rejection oracle: V(a) = 4 P(0 <= C2 <= a C1) for iid standard Cauchy.
struct CauchyOracle {
  double estimate = 0.0;
  double se = 0.0;
};
CauchyOracle v_cauchy_mc(double a, std::size_t draws, std::uint64_t seed) {
  rng::Xoshiro256pp g({seed, 7});
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double c1 = rng::cauchy_draw(g);
    const double c2 = rng::cauchy_draw(g);
    hits += (c2 >= 0.0 && c2 <= a * c1);
  }
  const double p = double(hits) / double(draws);
  return {4.0 * p, 4.0 * std::sqrt(p * (1.0 - p) / double(draws))};
}

}  // namespace

TEST_CASE("v_of boundary and symmetry values") {
  CHECK(v_of(0.0) == 0.0);
  CHECK(v_of(1.0) == doctest::Approx(0.5).epsilon(1e-9));
  // V(a) + V(1/a) = 1 (swap the integration variables).
  for (double a : {0.1, 0.37, 0.5, 2.0, 10.0, 55.0})
    CHECK(std::abs(v_of(a) + v_of(1.0 / a) - 1.0) < 2e-10);
}

TEST_CASE("v_of matches the iid-Cauchy rejection oracle at a=2") {
  const auto mc = v_cauchy_mc(2.0, 10'000'000, 20250801);
  CHECK(std::abs(v_of(2.0) - mc.estimate) < 3.0 * mc.se);
}

TEST_CASE("v_of matches the 2D region count (no inner reduction)") {
  for (double a : {0.5, 1.0, 2.0, 5.0})
    CHECK(v_of(a) == doctest::Approx(v_region_count(a, 20000)).epsilon(2e-3));
}

TEST_CASE("v_of is monotone and in [0,1] on a wide grid") {
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double a = 100.0 * i / 1000.0;
    const double v = v_of(a);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v >= prev - 2e-10);
    prev = v;
  }
}

TEST_CASE("v_of domain errors") {
  CHECK_THROWS_AS(v_of(-0.1), std::domain_error);
  CHECK_THROWS_AS(v_of(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(v_of(std::numeric_limits<double>::infinity()), std::domain_error);
  CHECK_THROWS_AS(v_of(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(v_of(1.0, 1e-3), std::domain_error);
}

TEST_CASE("maxtime_cdf values and endpoint conventions") {
  CHECK(analytic::maxtime_cdf(0.0) == 0.0);
  CHECK(analytic::maxtime_cdf(1.0) == 1.0);
  CHECK(analytic::maxtime_cdf(0.5) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(analytic::maxtime_cdf(0.25) + analytic::maxtime_cdf(0.75) - 1.0) < 2e-10);
  CHECK_THROWS_AS(analytic::maxtime_cdf(-0.01), std::domain_error);
  CHECK_THROWS_AS(analytic::maxtime_cdf(1.01), std::domain_error);
}

TEST_CASE("maxtime_density: removable singularity, symmetry, normalization") {
  CHECK(analytic::maxtime_density(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  // Taylor branch continuous against the direct formula.
  CHECK(analytic::maxtime_density(0.5 + 1.1e-4) ==
        doctest::Approx(analytic::maxtime_density(0.5 + 0.9e-4)).epsilon(1e-7));
  for (double u : {0.05, 0.1, 0.3, 0.42})
    CHECK(std::abs(analytic::maxtime_density(u) - analytic::maxtime_density(1.0 - u)) <=
          1e-12);
  const double mass = analytic::adaptive_simpson(
      [](double u) { return analytic::maxtime_density(u); }, 1e-12, 1.0 - 1e-12, 1e-10);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(analytic::maxtime_density(0.0), std::domain_error);
  CHECK_THROWS_AS(analytic::maxtime_density(1.0), std::domain_error);
}

TEST_CASE("maxtime_density matches the finite difference of maxtime_cdf") {
  const double h = 1e-4;
  for (double u = 0.1; u < 0.95; u += 0.1) {
    const double fd =
        (analytic::maxtime_cdf(u + h, 1e-12) - analytic::maxtime_cdf(u - h, 1e-12)) /
        (2.0 * h);
    CHECK(fd == doctest::Approx(analytic::maxtime_density(u)).epsilon(1e-5));
  }
}

TEST_CASE("v_prime closed form, limit, and finite-difference oracle") {
  CHECK(analytic::v_prime(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(analytic::v_prime(std::exp(1.0)) ==
        doctest::Approx(1.0 / (std::exp(2.0) - 1.0)).epsilon(1e-12));
  const double h = 1e-4;
  for (double c : {0.5, 0.9, 1.0, 1.1, 2.0, 10.0}) {
    const double fd = (v_of(c + h, 1e-12) - v_of(c - h, 1e-12)) / (2.0 * h);
    CHECK(std::abs(fd - analytic::v_prime(c)) < 1e-6);
  }
  CHECK_THROWS_AS(analytic::v_prime(0.0), std::domain_error);
  CHECK_THROWS_AS(analytic::v_prime(-1.0), std::domain_error);
}

TEST_CASE("cauchy_cdf values and exact reflection") {
  CHECK(analytic::cauchy_cdf(0.0, 3.7) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(analytic::cauchy_cdf(2.0, 2.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(analytic::cauchy_cdf(-2.0, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
  for (double x : {0.3, 1.0, 17.0, 1e6})
    CHECK(std::abs(analytic::cauchy_cdf(x, 1.3) + analytic::cauchy_cdf(-x, 1.3) - 1.0) <=
          1e-15);
  // strictly increasing
  CHECK(analytic::cauchy_cdf(1.0, 1.0) > analytic::cauchy_cdf(0.999, 1.0));
  CHECK_THROWS_AS(analytic::cauchy_cdf(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(analytic::cauchy_cdf(0.0, -1.0), std::domain_error);
}

TEST_CASE("spitzer_cdf is the standard Cauchy CDF") {
  CHECK(analytic::spitzer_cdf(0.0) == doctest::Approx(0.5));
  CHECK(analytic::spitzer_cdf(1.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(analytic::spitzer_cdf(-1.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("q_prob basics and the scaled-Cauchy oracle") {
  const double e1 = std::exp(1.0), e2 = std::exp(2.0);
  CHECK(analytic::q_prob(e1, e1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(analytic::q_prob(e2, e1) == doctest::Approx(v_of(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(analytic::q_prob(1.0, e1), std::domain_error);
  CHECK_THROWS_AS(analytic::q_prob(e1, 0.5), std::domain_error);

  // P(|C_1| > |C_2|) with scales 1 and 2 equals q_prob(e, e^2) = V(1/2).
  rng::Xoshiro256pp g({42, 11});
  const std::size_t draws = 10'000'000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double c1 = rng::cauchy_draw(g, 1.0);
    const double c2 = rng::cauchy_draw(g, 2.0);
    hits += std::abs(c1) > std::abs(c2);
  }
  const double p = double(hits) / double(draws);
  const double se = std::sqrt(p * (1 - p) / double(draws));
  CHECK(std::abs(analytic::q_prob(e1, e2) - p) < 3.0 * se);
}

TEST_CASE("integral_test: verdicts of the three reference families") {
  const auto limits = analytic::default_integral_test_limits();

  auto fam_a = analytic::AlphaFamily::inv_log_log_pow(1.0, 2.0);
  auto va = analytic::integral_test(fam_a, limits);
  CHECK(va.classification == analytic::Convergence::kConverges);
  CHECK(va.assumption_holds);

  auto fam_b = analytic::AlphaFamily::inv_log_log_pow(1.0, 1.0);
  auto vb = analytic::integral_test(fam_b, limits);
  CHECK(vb.classification == analytic::Convergence::kDiverges);
  CHECK(vb.assumption_holds);

  auto fam_c = analytic::AlphaFamily::inv_log_pow(1.0, 1.0);
  auto vc = analytic::integral_test(fam_c, limits);
  CHECK(vc.classification == analytic::Convergence::kConverges);
  // 2 alpha(t^e) = (2/e) alpha(t) < alpha(t): the doubling condition fails
  // identically for 1/log t.
  CHECK_FALSE(vc.assumption_holds);
}

TEST_CASE("integral_test: partial integrals match closed-form antiderivatives") {
  const auto limits = analytic::default_integral_test_limits();
  const double s0 = 3.0;

  // alpha = s^-2: integrand 2 ln s / s^2, antiderivative -2(ln s + 1)/s.
  auto va = analytic::integral_test(analytic::AlphaFamily::inv_log_log_pow(1.0, 2.0), limits);
  auto anti_a = [](double s) { return -2.0 * (std::log(s) + 1.0) / s; };
  for (std::size_t i = 0; i < limits.size(); ++i)
    CHECK(va.tail_estimates[i].second ==
          doctest::Approx(anti_a(limits[i]) - anti_a(s0)).epsilon(1e-7));

  // alpha = 1/s: integrand ln s / s, antiderivative ln(s)^2 / 2.
  auto vb = analytic::integral_test(analytic::AlphaFamily::inv_log_log_pow(1.0, 1.0), limits);
  for (std::size_t i = 0; i < limits.size(); ++i) {
    const double expect = 0.5 * (std::pow(std::log(limits[i]), 2) - std::pow(std::log(s0), 2));
    CHECK(vb.tail_estimates[i].second == doctest::Approx(expect).epsilon(1e-9));
  }

  // alpha = e^-s: integrand s e^-s, antiderivative -(s+1) e^-s.
  auto vc = analytic::integral_test(analytic::AlphaFamily::inv_log_pow(1.0, 1.0), limits);
  auto anti_c = [](double s) { return -(s + 1.0) * std::exp(-s); };
  CHECK(vc.tail_estimates.back().second ==
        doctest::Approx(anti_c(limits.back()) - anti_c(s0)).epsilon(1e-9));
}

TEST_CASE("integral_test: partial integrals are non-decreasing") {
  const auto limits = analytic::default_integral_test_limits();
  for (auto fam : {analytic::AlphaFamily::inv_log_log_pow(1.0, 2.0),
                   analytic::AlphaFamily::inv_log_log_pow(1.0, 1.0),
                   analytic::AlphaFamily::inv_log_pow(1.0, 1.0)}) {
    auto v = analytic::integral_test(fam, limits);
    double prev = 0.0;
    for (const auto& [lim, partial] : v.tail_estimates) {
      CHECK(partial >= prev - 1e-15);
      prev = partial;
    }
  }
}

TEST_CASE("integral_test: inconclusive family and custom tables") {
  const auto limits = analytic::default_integral_test_limits();
  auto slow = analytic::AlphaFamily::inv_log_log_pow(1.0, 1.2);
  CHECK(analytic::integral_test(slow, limits).classification ==
        analytic::Convergence::kInconclusive);

  // Tabulated version of s^-2 on a log grid reproduces the verdict.
  std::vector<std::pair<double, double>> table;
  for (double s = 3.0; s <= 1.1e9; s *= 1.35) table.emplace_back(s, 1.0 / (s * s));
  auto custom = analytic::AlphaFamily::custom(table);
  auto v = analytic::integral_test(custom, limits);
  CHECK(v.classification == analytic::Convergence::kConverges);

  // Increasing table violates monotonicity.
  auto bad = analytic::AlphaFamily::custom({{3.0, 0.1}, {10.0, 0.2}, {100.0, 0.3}});
  CHECK_THROWS_AS(analytic::integral_test(bad, limits), std::invalid_argument);

  CHECK_THROWS_AS(analytic::integral_test(slow, {}), std::invalid_argument);
  CHECK_THROWS_AS(analytic::integral_test(slow, {5.0, 4.0}), std::invalid_argument);
}
