#include "windinglab/euler_oracle.hpp"

#include <cmath>
#include <limits>
#include <thread>

namespace winding::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = 1.57079632679489661923;
constexpr double kMinRadius = 1e-6;

}  // namespace

sim::WindingObservables simulate_direct(rng::SeedStream seed, double t_end, double h0) {
  if (!(t_end > 0.0) || t_end > 1e3)
    throw std::invalid_argument("simulate_direct: t_end must be in (0, 1e3]");
  if (!(h0 > 0.0) || h0 > 1e-3)
    throw std::invalid_argument("simulate_direct: h0 must be in (0, 1e-3]");

  rng::NormalPairSource gauss(seed);

  double x = 1.0, y = 0.0, t = 0.0, theta = 0.0;
  double clock_h = 0.0;  // int_0^t ds/|W|^2, trapezoid
  double inv_r2 = 1.0;

  // Running max of theta (earliest tie) and last zero crossing, on real time.
  double max_theta = 0.0, max_time = 0.0;
  double zero_time = 0.0;
  bool have_max_time = false;  // max still at t = 0 -> log M = -inf
  bool have_zero = false;

  while (t < t_end) {
    double h = h0 * std::min(1.0, x * x + y * y);
    h = std::min(h, t_end - t);
    int halvings = 0;
    for (;;) {
      double z1, z2;
      gauss.pair(z1, z2);
      const double s = std::sqrt(h);
      const double xn = x + s * z1, yn = y + s * z2;
      const double r2n = xn * xn + yn * yn;
      if (r2n < kMinRadius * kMinRadius) {
        h *= 0.5;
        if (++halvings >= 60) throw PathAbortError("simulate_direct: stuck at the origin");
        continue;
      }
      const double dth = std::atan2(x * yn - y * xn, x * xn + y * yn);
      if (std::abs(dth) >= kHalfPi) {
        h *= 0.5;
        if (++halvings >= 60) throw PathAbortError("simulate_direct: angle step too large");
        continue;
      }
      const double theta_prev = theta;
      x = xn;
      y = yn;
      theta += dth;
      const double inv_r2n = 1.0 / r2n;
      clock_h += 0.5 * h * (inv_r2 + inv_r2n);
      inv_r2 = inv_r2n;
      t += h;
      if (theta_prev * theta < 0.0) {
        zero_time = t - h + h * theta_prev / (theta_prev - theta);
        have_zero = true;
      }
      if (theta > max_theta) {
        max_theta = theta;
        max_time = t;
        have_max_time = true;
      }
      break;
    }
  }

  sim::WindingObservables o;
  o.log_t = std::log(t_end);
  o.theta_t = theta;
  o.n_t = max_theta;
  o.log_m_t = have_max_time ? std::log(max_time) : -kInf;
  o.log_l_t = have_zero ? std::log(zero_time) : -kInf;
  o.h_t = clock_h;
  o.censored = false;
  return o;
}

EulerBatchResult euler_batch(std::uint64_t master_seed, std::uint64_t first_path_index,
                             std::size_t paths, double t_end, double h0, int workers) {
  EulerBatchResult result;
  result.obs.resize(paths);
  if (paths == 0) return result;

  const int nw = int(std::min<std::size_t>(sim::resolve_workers(workers), paths));
  std::vector<std::size_t> aborted(nw, 0);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) {
    const std::size_t lo = paths * w / nw, hi = paths * (w + 1) / nw;
    if (lo == hi) continue;
    pool.emplace_back([&, w, lo, hi]() {
      for (std::size_t i = lo; i < hi; ++i) {
        // On abort, retry the slot under index + paths; the replacement is a
        // pure function of the slot, so worker count cannot change results.
        std::uint64_t idx = first_path_index + i;
        for (;;) {
          try {
            result.obs[i] = simulate_direct({master_seed, idx}, t_end, h0);
            break;
          } catch (const PathAbortError&) {
            ++aborted[w];
            idx += paths;
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t a : aborted) result.aborted += a;
  return result;
}

}  // namespace winding::oracle
