#include "windinglab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace winding::analytic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * kPi;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + " must be finite");
}

}  // namespace

double v_of(double a, double tol) {
  require_finite(a, "v_of: a");
  if (a < 0.0) throw std::domain_error("v_of: a must be >= 0");
  if (tol <= 0.0 || tol > 1e-6) throw std::domain_error("v_of: tol must be in (0, 1e-6]");
  if (a == 0.0) return 0.0;

  // x = tan(phi) maps the half-line integral of atan(a x)/(1+x^2) onto
  // [0, pi/2]; the integrand extends continuously to atan-value pi/2 at the
  // right endpoint.
  auto f = [a](double phi) {
    if (phi >= kHalfPi) return kHalfPi;
    return std::atan(a * std::tan(phi));
  };
  const double integral = adaptive_simpson(f, 0.0, kHalfPi, 0.25 * tol);
  return std::clamp(4.0 / (kPi * kPi) * integral, 0.0, 1.0);
}

double v_prime(double a) {
  require_finite(a, "v_prime: a");
  if (a <= 0.0) throw std::domain_error("v_prime: a must be > 0");
  const double e = a - 1.0;
  if (std::abs(e) < 1e-4) {
    // log(1+e)/(e(2+e)) with the log series divided through by e; avoids the
    // 0/0 cancellation at a = 1.
    const double series =
        1.0 + e * (-1.0 / 2 + e * (1.0 / 3 + e * (-1.0 / 4 + e * (1.0 / 5))));
    return series / (2.0 + e);
  }
  return std::log(a) / (a * a - 1.0);
}

double maxtime_cdf(double u, double tol) {
  require_finite(u, "maxtime_cdf: u");
  if (u < 0.0 || u > 1.0) throw std::domain_error("maxtime_cdf: u must be in [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  return v_of(u / (1.0 - u), tol);
}

double maxtime_density(double u) {
  require_finite(u, "maxtime_density: u");
  if (u <= 0.0 || u >= 1.0) throw std::domain_error("maxtime_density: u must be in (0,1)");
  const double s = 2.0 * u - 1.0;
  if (std::abs(s) < 2e-4) {
    // log(u/(1-u)) = 2 atanh(s); the ratio to s expands in even powers.
    const double s2 = s * s;
    return 2.0 * (1.0 + s2 * (1.0 / 3 + s2 * (1.0 / 5 + s2 * (1.0 / 7 + s2 / 9))));
  }
  return std::log(u / (1.0 - u)) / s;
}

double cauchy_cdf(double x, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::domain_error("cauchy_cdf: gamma must be positive");
  return 0.5 + std::atan(x / gamma) / kPi;
}

double spitzer_cdf(double x) { return cauchy_cdf(x, 1.0); }

double q_prob(double a, double b, double tol) {
  require_finite(a, "q_prob: a");
  require_finite(b, "q_prob: b");
  if (a <= 1.0 || b <= 1.0)
    throw std::domain_error("q_prob: hitting radii must exceed the start radius 1");
  return v_of(std::log(a) / std::log(b), tol);
}

// ---------------------------------------------------------------------------
// AlphaFamily
// ---------------------------------------------------------------------------

AlphaFamily AlphaFamily::inv_log_log_pow(double c, double p, double loglog_t0) {
  if (!(c > 0.0) || !(p > 0.0)) throw std::invalid_argument("inv_log_log_pow: c, p must be > 0");
  if (!(loglog_t0 > 1.0)) throw std::invalid_argument("alpha family: domain must start past e^e");
  return AlphaFamily(Kind::kInvLogLogPow, c, p, loglog_t0,
                     "invloglogpow(" + std::to_string(c) + "," + std::to_string(p) + ")");
}

AlphaFamily AlphaFamily::inv_log_pow(double c, double q, double loglog_t0) {
  if (!(c > 0.0) || !(q > 0.0)) throw std::invalid_argument("inv_log_pow: c, q must be > 0");
  if (!(loglog_t0 > 1.0)) throw std::invalid_argument("alpha family: domain must start past e^e");
  return AlphaFamily(Kind::kInvLogPow, c, q, loglog_t0,
                     "invlogpow(" + std::to_string(c) + "," + std::to_string(q) + ")");
}

AlphaFamily AlphaFamily::custom(std::vector<std::pair<double, double>> table) {
  return AlphaFamily(std::move(table));
}

AlphaFamily::AlphaFamily(std::vector<std::pair<double, double>> table)
    : kind_(Kind::kCustom), name_("custom"), table_(std::move(table)) {
  if (table_.size() < 2) throw std::invalid_argument("custom alpha family: need >= 2 points");
  for (size_t i = 0; i < table_.size(); ++i) {
    if (!std::isfinite(table_[i].first) || !std::isfinite(table_[i].second) ||
        table_[i].second <= 0.0)
      throw std::invalid_argument("custom alpha family: non-finite or non-positive entry");
    if (i > 0 && table_[i].first <= table_[i - 1].first)
      throw std::invalid_argument("custom alpha family: abscissae must increase");
  }
  domain_start_ = table_.front().first;
  if (domain_start_ <= 1.0)
    throw std::invalid_argument("custom alpha family: domain must start past e^e");
}

double AlphaFamily::alpha(double s) const {
  switch (kind_) {
    case Kind::kInvLogLogPow:
      return coeff_ * std::pow(s, -expo_);
    case Kind::kInvLogPow:
      return coeff_ * std::exp(-expo_ * s);
    case Kind::kCustom: {
      if (s <= table_.front().first) return table_.front().second;
      if (s >= table_.back().first) return table_.back().second;
      auto it = std::upper_bound(table_.begin(), table_.end(), s,
                                 [](double v, const auto& p) { return v < p.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (s - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double AlphaFamily::log_alpha(double s) const {
  switch (kind_) {
    case Kind::kInvLogLogPow:
      return std::log(coeff_) - expo_ * std::log(s);
    case Kind::kInvLogPow:
      return std::log(coeff_) - expo_ * s;
    case Kind::kCustom:
      return std::log(alpha(s));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(Convergence c) {
  switch (c) {
    case Convergence::kConverges: return "Converges";
    case Convergence::kDiverges: return "Diverges";
    case Convergence::kInconclusive: return "Inconclusive";
  }
  return "?";
}

std::vector<double> default_integral_test_limits() {
  return {1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9};
}

namespace {

// Integrand after the substitution s = log log t:
// alpha(s) |log alpha(s)|, assembled from log alpha so that nothing blows up
// once alpha underflows (exp(-745) * 745 is simply 0).
double substituted_integrand(const AlphaFamily& fam, double s) {
  const double la = fam.log_alpha(s);
  return std::exp(la) * std::abs(la);
}

void validate_family(const AlphaFamily& fam, double s_end) {
  const double s0 = fam.domain_start();
  const int n = 257;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double s = s0 + (s_end - s0) * i / (n - 1);
    const double a = fam.alpha(s);
    if (!std::isfinite(a) || a <= 0.0)
      throw std::invalid_argument("alpha family invalid: non-positive value at s=" +
                                  std::to_string(s));
    if (a > prev * (1.0 + 1e-12))
      throw std::invalid_argument("alpha family invalid: not non-increasing at s=" +
                                  std::to_string(s));
    prev = a;
  }
  if (!(fam.alpha(s_end) < fam.alpha(s0)))
    throw std::invalid_argument("alpha family invalid: does not decay over the grid");
}

bool assumption_grid_check(const AlphaFamily& fam, double s_end) {
  // 2 alpha(t^e) >= alpha(t)  <=>  2 alpha(s + 1) >= alpha(s).
  const double s0 = fam.domain_start();
  const int n = 513;
  for (int i = 0; i < n; ++i) {
    const double s = s0 + (s_end - s0) * i / (n - 1);
    if (2.0 * fam.alpha(s + 1.0) < fam.alpha(s) * (1.0 - 1e-12)) return false;
  }
  return true;
}

}  // namespace

IntegralTestVerdict integral_test(const AlphaFamily& family,
                                  const std::vector<double>& limits) {
  if (limits.empty()) throw std::invalid_argument("integral_test: no limits");
  double prev = family.domain_start();
  for (double lim : limits) {
    if (!(lim > 1.0) || !(lim > prev))
      throw std::invalid_argument("integral_test: limits must be increasing and > 1");
    prev = lim;
  }
  validate_family(family, limits.back());

  IntegralTestVerdict out;
  out.assumption_holds = assumption_grid_check(family, limits.back());

  auto f = [&family](double s) { return substituted_integrand(family, s); };
  std::vector<double> increments;
  increments.reserve(limits.size());
  double total = 0.0, lo = family.domain_start();
  for (double hi : limits) {
    const double inc = adaptive_simpson(f, lo, hi, 1e-10);
    increments.push_back(inc);
    total += inc;
    out.tail_estimates.emplace_back(hi, total);
    lo = hi;
  }

  const size_t n = increments.size();
  const double last = increments.back();
  bool halving = false, non_shrinking = false;
  if (n >= 3) {
    const double i1 = increments[n - 3], i2 = increments[n - 2], i3 = increments[n - 1];
    halving = (i2 <= 0.5 * i1) && (i3 <= 0.5 * i2);
    non_shrinking = (i2 >= i1) && (i3 >= i2);
  }
  if (last < 1e-6 && halving) {
    out.classification = Convergence::kConverges;
  } else if (total > 1e3 || non_shrinking) {
    out.classification = Convergence::kDiverges;
  } else {
    out.classification = Convergence::kInconclusive;
  }
  return out;
}

}  // namespace winding::analytic
