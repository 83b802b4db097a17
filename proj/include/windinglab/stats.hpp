// Empirical distribution machinery and the hypothesis tests that turn
// simulated samples plus analytic CDFs into pass/fail reports.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace winding::stats {

class EmpiricalCdf {
 public:
  // Sorts a copy of the samples. Rejects empty or non-finite input.
  static EmpiricalCdf from_samples(std::span<const double> samples);

  // P_hat(X <= x): right-continuous step function.
  double operator()(double x) const;

  std::size_t n() const { return sorted_.size(); }
  const std::vector<double>& sorted_samples() const { return sorted_; }

 private:
  explicit EmpiricalCdf(std::vector<double> sorted) : sorted_(std::move(sorted)) {}
  std::vector<double> sorted_;
};

struct KsReport {
  double statistic = 0.0;                // sup distance, in [0, 1]
  std::size_t n1 = 0;
  std::optional<std::size_t> n2;         // absent for one-sample tests
  double p_value = 1.0;                  // asymptotic Kolmogorov tail
  bool passed = false;                   // p_value > level
  double level = 0.0;
};

// Tail of the asymptotic Kolmogorov distribution,
//   Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
// evaluated through its theta-dual form for small lambda.
double kolmogorov_tail(double lambda);

// One-sample KS against a monotone CDF. The statistic compares the CDF to the
// empirical distribution from both sides at every sample point; lambda =
// sqrt(n) * D feeds the asymptotic p-value.
KsReport ks_one_sample(const EmpiricalCdf& e,
                       const std::function<double(double)>& cdf, double level);

// Two-sample KS over the merged support; effective n = n1 n2 / (n1 + n2).
KsReport ks_two_sample(const EmpiricalCdf& e1, const EmpiricalCdf& e2, double level);

struct ProportionReport {
  double z = 0.0;            // signed score for H0: p1 = ratio * p2
  double p1_hat = 0.0;
  double p2_hat = 0.0;
  double ratio = 2.0;
  bool degenerate = false;   // no events on either side
  bool passed = false;       // |z| <= 3
};

// Tests H0: p1 = ratio * p2 from two binomial counts via a normal
// approximation with a pooled standard error. Passes at the 3 sigma level.
ProportionReport proportion_check(std::size_t k1, std::size_t n1, std::size_t k2,
                                  std::size_t n2, double ratio = 2.0);

// Dvoretzky-Kiefer-Wolfowitz half-width: sup|F_hat - F| <= eps with the given
// confidence; eps = sqrt(log(2 / (1 - confidence)) / (2n)).
double dkw_band(std::size_t n, double confidence);

}  // namespace winding::stats
