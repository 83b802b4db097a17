#include "windinglab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace winding::stats {

EmpiricalCdf EmpiricalCdf::from_samples(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ecdf: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  for (double x : s)
    if (!std::isfinite(x)) throw std::invalid_argument("ecdf: non-finite sample value");
  std::sort(s.begin(), s.end());
  return EmpiricalCdf(std::move(s));
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return double(it - sorted_.begin()) / double(sorted_.size());
}

double kolmogorov_tail(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 0.2) return 1.0;  // tail indistinguishable from 1 in doubles
  if (lambda < 0.755) {
    // Theta-dual of the same series; the direct form converges too slowly here.
    const double v = 1.0 / (lambda * lambda);
    constexpr double kSqrt2Pi = 2.50662827463100050242;
    const double t = std::exp(-std::numbers::pi * std::numbers::pi * v / 8.0);
    const double sum = t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0);
    return std::clamp(1.0 - kSqrt2Pi / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsReport ks_one_sample(const EmpiricalCdf& e,
                       const std::function<double(double)>& cdf, double level) {
  const auto& xs = e.sorted_samples();
  const std::size_t n = xs.size();
  if (n < 10) throw std::invalid_argument("ks_one_sample: need n >= 10");

  double d = 0.0;
  std::size_t i = 0;
  while (i < n) {
    // Group ties so F_hat jumps once per distinct value.
    std::size_t j = i;
    while (j + 1 < n && xs[j + 1] == xs[i]) ++j;
    const double f = cdf(xs[i]);
    if (!(f >= 0.0 && f <= 1.0))
      throw std::invalid_argument("ks_one_sample: cdf returned a value outside [0,1]");
    const double lo = double(i) / double(n);      // F_hat just below x_i
    const double hi = double(j + 1) / double(n);  // F_hat at x_i
    d = std::max({d, std::abs(hi - f), std::abs(f - lo)});
    i = j + 1;
  }

  KsReport r;
  r.statistic = d;
  r.n1 = n;
  r.level = level;
  r.p_value = kolmogorov_tail(std::sqrt(double(n)) * d);
  r.passed = r.p_value > level;
  return r;
}

KsReport ks_two_sample(const EmpiricalCdf& e1, const EmpiricalCdf& e2, double level) {
  const auto& a = e1.sorted_samples();
  const auto& b = e2.sorted_samples();
  const std::size_t n1 = a.size(), n2 = b.size();
  if (n1 < 10 || n2 < 10) throw std::invalid_argument("ks_two_sample: need n >= 10");

  double d = 0.0, diff = 0.0;
  const double sa = 1.0 / double(n1), sb = 1.0 / double(n2);
  std::size_t i = 0, j = 0;
  while (i < n1 && j < n2) {
    const double x = std::min(a[i], b[j]);
    while (i < n1 && a[i] == x) { diff += sa; ++i; }
    while (j < n2 && b[j] == x) { diff -= sb; ++j; }
    d = std::max(d, std::abs(diff));
  }
  // Once one sample is exhausted diff moves monotonically to 0, so the
  // remainder cannot add a new maximum.

  KsReport r;
  r.statistic = d;
  r.n1 = n1;
  r.n2 = n2;
  r.level = level;
  const double ne = double(n1) * double(n2) / double(n1 + n2);
  r.p_value = kolmogorov_tail(std::sqrt(ne) * d);
  r.passed = r.p_value > level;
  return r;
}

ProportionReport proportion_check(std::size_t k1, std::size_t n1, std::size_t k2,
                                  std::size_t n2, double ratio) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("proportion_check: empty sample");
  if (k1 > n1 || k2 > n2) throw std::invalid_argument("proportion_check: k > n");
  if (!(ratio > 0.0)) throw std::invalid_argument("proportion_check: ratio must be > 0");

  ProportionReport r;
  r.ratio = ratio;
  r.p1_hat = double(k1) / double(n1);
  r.p2_hat = double(k2) / double(n2);
  if (k1 == 0 && k2 == 0) {
    r.degenerate = true;
    r.z = 0.0;
    r.passed = true;
    return r;
  }
  // Under H0 both counts estimate the same p2 = p: E[k1 + k2] = (ratio n1 + n2) p.
  const double p = double(k1 + k2) / (ratio * double(n1) + double(n2));
  const double var = ratio * p * (1.0 - std::min(1.0, ratio * p)) / double(n1) +
                     ratio * ratio * p * (1.0 - p) / double(n2);
  const double se = std::sqrt(std::max(var, 1e-300));
  r.z = (r.p1_hat - ratio * r.p2_hat) / se;
  r.passed = std::abs(r.z) <= 3.0;
  return r;
}

double dkw_band(std::size_t n, double confidence) {
  if (n == 0) throw std::invalid_argument("dkw_band: n must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("dkw_band: confidence must be in (0,1)");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * double(n)));
}

}  // namespace winding::stats
