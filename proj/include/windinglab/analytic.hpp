// Closed-form and quadrature evaluation of the limit distributions of the
// winding-angle laws: the kernel V, the maximum-time CDF/density, Cauchy
// hitting CDFs, and a numeric convergence classifier for slowly-varying
// rate functions.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace winding::analytic {

// Absolute tolerance used when none is given.
inline constexpr double kDefaultTol = 1e-10;

// V(a) = (4/pi^2) * iint_{0 <= y <= a x} dx dy / ((1+x^2)(1+y^2)).
// Evaluated through the reduced form (4/pi^2) * int_0^{pi/2} atan(a tan(phi)) dphi
// by adaptive Simpson quadrature to absolute tolerance `tol`.
// Domain: a >= 0 finite, 0 < tol <= 1e-6. Result clamped to [0, 1].
double v_of(double a, double tol = kDefaultTol);

// d/da V(a) = log(a) / (a^2 - 1), extended by continuity to 1/2 at a = 1.
// Domain: a > 0.
double v_prime(double a);

// Limit CDF of log(M_t)/log(t): V(u/(1-u)) for u in [0,1], with the
// convention maxtime_cdf(1) = 1.
double maxtime_cdf(double u, double tol = kDefaultTol);

// Density of the limit law of log(M_t)/log(t):
//   log(u/(1-u)) / (2u - 1)  on (0,1),
// with the removable singularity at u = 1/2 filled by its limit 2.
double maxtime_density(double u);

// Cauchy CDF with location 0 and scale gamma > 0.
double cauchy_cdf(double x, double gamma);

// Limit CDF of 2 theta(t)/log t: the standard Cauchy CDF.
double spitzer_cdf(double x);

// Probability that the winding angle accumulated while |W| first reaches
// radius a exceeds (in absolute value) an independent copy run to radius b:
// V(log a / log b). Domain: a > 1, b > 1.
double q_prob(double a, double b, double tol = kDefaultTol);

// --------------------------------------------------------------------------
// Rate-function families alpha(t) for the liminf integral test.
//
// All evaluation happens in the variable s = log log t, the natural scale of
// the test: substituting s turns  int alpha(t)|log alpha(t)| / (t log t) dt
// into  int alpha(e^{e^s}) |log alpha(e^{e^s})| ds.
// --------------------------------------------------------------------------

class AlphaFamily {
 public:
  // alpha(t) = c * (log log t)^(-p)
  static AlphaFamily inv_log_log_pow(double c, double p, double loglog_t0 = 3.0);
  // alpha(t) = c * (log t)^(-q)
  static AlphaFamily inv_log_pow(double c, double q, double loglog_t0 = 3.0);
  // Tabulated (log log t, alpha) pairs, interpolated linearly in those
  // coordinates and clamped outside the table.
  static AlphaFamily custom(std::vector<std::pair<double, double>> table);

  // alpha evaluated at s = log log t.
  double alpha(double s) const;
  // log alpha at s, computed without forming alpha first (the parametric
  // families stay finite long after alpha itself underflows).
  double log_alpha(double s) const;

  double domain_start() const { return domain_start_; }
  const std::string& name() const { return name_; }

 private:
  enum class Kind { kInvLogLogPow, kInvLogPow, kCustom };
  AlphaFamily(Kind k, double c, double e, double s0, std::string name)
      : kind_(k), coeff_(c), expo_(e), domain_start_(s0), name_(std::move(name)) {}
  explicit AlphaFamily(std::vector<std::pair<double, double>> table);

  Kind kind_;
  double coeff_ = 1.0;
  double expo_ = 1.0;
  double domain_start_ = 3.0;
  std::string name_;
  std::vector<std::pair<double, double>> table_;
};

enum class Convergence { kConverges, kDiverges, kInconclusive };

const char* to_string(Convergence c);

struct IntegralTestVerdict {
  Convergence classification = Convergence::kInconclusive;
  // (upper limit of integration in s = log log t, partial integral from the
  // family's domain start). Non-decreasing in the second component.
  std::vector<std::pair<double, double>> tail_estimates;
  // Grid check of the doubling condition 2 alpha(t^e) >= alpha(t), i.e.
  // 2 alpha(s+1) >= alpha(s) in s-coordinates.
  bool assumption_holds = false;
};

// Default upper limits (s = log log t values) used by the built-in runs.
std::vector<double> default_integral_test_limits();

// Classifies int alpha(t)|log alpha(t)|/(t log t) dt as convergent/divergent
// from its partial integrals over the given increasing limits.
//
// Thresholds (pinned): Converges when the last increment is below 1e-6 and
// the increments at least halve across the final three limits; Diverges when
// the partial integral exceeds 1e3 or the final three increments never
// shrink; otherwise Inconclusive.
IntegralTestVerdict integral_test(const AlphaFamily& family,
                                  const std::vector<double>& limits);

// --------------------------------------------------------------------------
// Quadrature helper, exposed for reuse by tests and the classifier.
// --------------------------------------------------------------------------

// Adaptive Simpson on [a, b] to absolute tolerance tol.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 60);

namespace detail {
template <class F>
double simpson_rec(F& f, double a, double m, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace winding::analytic
