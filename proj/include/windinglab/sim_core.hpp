// Skew-product simulation engine. Drives the two independent linear Brownian
// motions on the internal clock, carries the time-change integral
// A(u) = int_0^u exp(2 B_hat) ds in log space, and extracts the winding
// observables (theta, running max, max time, last zero) at requested
// horizons, plus the winding angle at first passage of a radius.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "windinglab/rng.hpp"

namespace winding::sim {

// Discretized pair of driving Brownian motions with the log-space clock.
// Grid point k sits at internal time u = k * step; index 0 is the start
// (B_hat = B = 0, log A = -inf).
struct ClockPath {
  double step = 0.0;
  std::vector<double> b_hat;
  std::vector<double> b;
  std::vector<double> log_clock;
  bool censored = false;
};

// Per-path, per-horizon extract. M_t and L_t are reported in logs only; the
// clock spans e^(+-300) and the raw values have no double representation.
// A path whose running max (or last zero) stays at the start point reports
// log_m_t (log_l_t) = -inf.
struct WindingObservables {
  double log_t = 0.0;
  double theta_t = 0.0;
  double n_t = 0.0;
  double log_m_t = 0.0;
  double log_l_t = 0.0;
  double h_t = 0.0;  // internal-clock value H(t)
  bool censored = false;
};

class CensoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of worker threads to use: `requested` if positive, otherwise the
// hardware count; always capped by the WINDINGLAB_THREADS environment
// variable when set.
int resolve_workers(int requested);

// Default internal-clock cap for a clock target: 400 * factor * (target/2)^2.
// The driving radial motion must reach about target/2, whose first-passage
// time has median ~2.2 (target/2)^2 and a heavy sqrt tail; the cap trades a
// few percent of censored paths against unbounded worst-case cost.
double default_u_cap(double max_log_horizon, double factor = 1.0);

// Default cap for the hitting sampler: 40000 * factor * (log r)^2, keeping
// the expected censored fraction around 0.4%.
double default_hit_u_cap(double log_r, double factor = 1.0);

// Simulates the driving pair until log A(u) exceeds target_log_clock, or the
// grid reaches u_cap with censored = true. Memory grows with the step count;
// intended for moderate targets (tests, cross-checks). target_log_clock of
// -inf degenerates to a minimal two-point path.
ClockPath simulate_clock_path(rng::SeedStream seed, double delta,
                              double target_log_clock, double u_cap);

// Extracts observables at horizon log_t from a stored path. Throws if the
// path never reaches log_t and is not flagged censored; censored paths yield
// a censored record.
WindingObservables observables_at(const ClockPath& path, double log_t);

// Winding angle at the first passage of radius r > 1: runs B_hat to the grid
// crossing of log r (refined by linear interpolation) and returns B there.
// nullopt when the cap is reached first (censored sample).
std::optional<double> sample_theta_at_hit(rng::SeedStream seed, double r,
                                          double delta, double u_cap);

struct HitBatchResult {
  std::vector<double> samples;  // accepted draws, ordered by path index
  std::size_t censored = 0;
};

HitBatchResult hit_batch(std::uint64_t master_seed, std::uint64_t first_path_index,
                         std::size_t n, double r, double delta, double u_cap,
                         int workers = 0);

struct BatchParams {
  std::uint64_t master_seed = 0;
  std::uint64_t first_path_index = 0;
  std::size_t paths = 0;
  std::vector<double> log_horizons;  // strictly increasing, positive
  double delta = 1e-3;
  double u_cap = 0.0;  // 0 -> default_u_cap(last horizon)
  int workers = 0;
};

struct BatchResult {
  // by_horizon[h][i]: observables of path (first_path_index + i) at horizon h.
  std::vector<std::vector<WindingObservables>> by_horizon;
  std::size_t censored_paths = 0;
  bool censor_warning = false;  // censored fraction above 1%

  double censored_fraction(std::size_t paths) const {
    return paths == 0 ? 0.0 : double(censored_paths) / double(paths);
  }
};

// Runs `paths` independent paths and collects observables at every horizon.
// Results are bit-identical for fixed (master_seed, delta, horizons)
// regardless of worker count. Censored fraction above 5% raises
// CensoringError; above 1% sets censor_warning.
BatchResult batch_run(const BatchParams& params);

}  // namespace winding::sim
