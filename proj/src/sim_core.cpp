#include "windinglab/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "windinglab/sim_engine.hpp"

namespace winding::sim {

namespace {

using detail::kInf;

void validate_step(double delta) {
  if (!(delta > 0.0) || !(delta <= 0.01))
    throw std::invalid_argument("sim: delta must be in (0, 0.01]");
}

std::int64_t cap_to_steps(double u_cap, double delta) {
  if (!(u_cap > 0.0) || !std::isfinite(u_cap))
    throw std::invalid_argument("sim: u_cap must be positive and finite");
  const double steps = std::ceil(u_cap / delta);
  if (steps > 9.0e15) throw std::invalid_argument("sim: u_cap/delta too large");
  return std::max<std::int64_t>(2, std::int64_t(steps));
}

}  // namespace

int resolve_workers(int requested) {
  int w = requested > 0 ? requested : int(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (const char* env = std::getenv("WINDINGLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) w = std::min(w, cap);
  }
  return w;
}

double default_u_cap(double max_log_horizon, double factor) {
  const double half = 0.5 * max_log_horizon;
  return std::max(400.0 * factor * half * half, 1.0);
}

double default_hit_u_cap(double log_r, double factor) {
  return std::max(40000.0 * factor * log_r * log_r, 1.0);
}

ClockPath simulate_clock_path(rng::SeedStream seed, double delta,
                              double target_log_clock, double u_cap) {
  validate_step(delta);
  if (std::isnan(target_log_clock) || target_log_clock == kInf)
    throw std::invalid_argument("sim: target_log_clock must be finite or -inf");
  const std::int64_t cap_steps = cap_to_steps(u_cap, delta);

  ClockPath path;
  path.step = delta;
  path.b_hat.push_back(0.0);
  path.b.push_back(0.0);
  path.log_clock.push_back(-kInf);

  struct Sink {
    bool censored = false;
    void emit(std::uint64_t, std::size_t, const WindingObservables&) {}
    void path_done(std::uint64_t, bool c) { censored = c; }
  } sink;

  detail::EngineParams params;
  params.master_seed = seed.master_seed;
  params.first_path_index = seed.path_index;
  params.paths = 1;
  params.log_horizons = {target_log_clock};
  params.delta = delta;
  params.cap_steps = cap_steps;

  detail::GaussianSource src;
  detail::Lane0Recorder rec{&path.b_hat, &path.b, &path.log_clock};
  detail::run_lane_engine(src, params, sink, rec);
  path.censored = sink.censored;
  return path;
}

WindingObservables observables_at(const ClockPath& path, double log_t) {
  const auto& lc = path.log_clock;
  const std::size_t n = lc.size();
  if (n < 2 || path.b.size() != n || path.b_hat.size() != n || !(path.step > 0.0))
    throw std::invalid_argument("observables_at: malformed path");
  if (std::isnan(log_t)) throw std::invalid_argument("observables_at: log_t is NaN");

  // First grid index whose clock value reaches the horizon.
  const auto it = std::lower_bound(lc.begin() + 1, lc.end(), log_t);
  if (it == lc.end()) {
    if (path.censored) return detail::censored_observables(log_t);
    throw std::logic_error("observables_at: path does not reach log_t and is not censored");
  }
  const std::int64_t kc = it - lc.begin();

  detail::MaxRecord mx;
  detail::ZeroRecord z_last, z_prev;
  const double delta = path.step;
  for (std::int64_t k = 1; k <= kc; ++k) {
    const double bp = path.b[k - 1], bc = path.b[k];
    if (bc == 0.0) {
      z_prev = z_last;
      z_last = detail::ZeroRecord{double(k) * delta, lc[k]};
    } else if (bp * bc < 0.0) {
      z_prev = z_last;
      z_last = detail::make_zero_record(k, delta, bp, bc, lc[k - 1], lc[k]);
    }
    if (k == kc)
      return detail::emit_at_horizon(log_t, k, delta, bp, bc, lc[k - 1], lc[k], mx,
                                     z_last, z_prev);
    if (bc > mx.b) {
      mx.b = bc;
      mx.u = double(k) * delta;
      mx.log_a = lc[k];
    }
  }
  throw std::logic_error("observables_at: unreachable");
}

std::optional<double> sample_theta_at_hit(rng::SeedStream seed, double r, double delta,
                                          double u_cap) {
  HitBatchResult res = hit_batch(seed.master_seed, seed.path_index, 1, r, delta, u_cap, 1);
  if (res.samples.empty()) return std::nullopt;
  return res.samples.front();
}

namespace {

struct HitSink {
  std::vector<double>* values;  // NaN marks censored
  std::uint64_t first;
  void emit_hit(std::uint64_t pi, double theta) { (*values)[pi - first] = theta; }
  void emit_censored(std::uint64_t pi) { (*values)[pi - first] = detail::kNaN; }
};

}  // namespace

HitBatchResult hit_batch(std::uint64_t master_seed, std::uint64_t first_path_index,
                         std::size_t n, double r, double delta, double u_cap,
                         int workers) {
  if (!(r > 1.0)) throw std::invalid_argument("hit_batch: radius must exceed 1");
  validate_step(delta);
  const std::int64_t cap_steps = cap_to_steps(u_cap, delta);
  const double log_r = std::log(r);

  std::vector<double> values(n, detail::kNaN);
  const int nw = std::min<std::size_t>(std::max(1, resolve_workers(workers)),
                                       std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) {
    const std::size_t lo = n * w / nw, hi = n * (w + 1) / nw;
    if (lo == hi) continue;
    pool.emplace_back([&, lo, hi]() {
      detail::GaussianSource src;
      HitSink sink{&values, first_path_index};
      detail::run_hit_engine(src, master_seed, first_path_index + lo, hi - lo, log_r,
                             delta, cap_steps, sink);
    });
  }
  for (auto& t : pool) t.join();

  HitBatchResult out;
  out.samples.reserve(n);
  for (double v : values) {
    if (std::isnan(v))
      ++out.censored;
    else
      out.samples.push_back(v);
  }
  return out;
}

namespace {

struct BatchSink {
  std::vector<std::vector<WindingObservables>>* out;
  std::uint64_t first;
  std::size_t censored = 0;
  void emit(std::uint64_t pi, std::size_t h, const WindingObservables& o) {
    (*out)[h][pi - first] = o;
  }
  void path_done(std::uint64_t, bool c) { censored += std::size_t(c); }
};

}  // namespace

BatchResult batch_run(const BatchParams& params) {
  validate_step(params.delta);
  if (params.log_horizons.empty())
    throw std::invalid_argument("batch_run: need at least one horizon");
  double prev = 0.0;
  for (double h : params.log_horizons) {
    if (!(h > prev) || !std::isfinite(h))
      throw std::invalid_argument("batch_run: horizons must be positive and increasing");
    prev = h;
  }

  const double u_cap = params.u_cap > 0.0
                           ? params.u_cap
                           : default_u_cap(params.log_horizons.back(), 1.0);
  const std::int64_t cap_steps = cap_to_steps(u_cap, params.delta);

  BatchResult result;
  result.by_horizon.assign(params.log_horizons.size(),
                           std::vector<WindingObservables>(params.paths));
  if (params.paths == 0) return result;

  const int nw = int(std::min<std::size_t>(resolve_workers(params.workers), params.paths));
  std::vector<std::size_t> censored_per_worker(nw, 0);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) {
    const std::size_t lo = params.paths * w / nw, hi = params.paths * (w + 1) / nw;
    if (lo == hi) continue;
    pool.emplace_back([&, w, lo, hi]() {
      detail::EngineParams ep;
      ep.master_seed = params.master_seed;
      ep.first_path_index = params.first_path_index + lo;
      ep.paths = hi - lo;
      ep.log_horizons = params.log_horizons;
      ep.delta = params.delta;
      ep.cap_steps = cap_steps;
      detail::GaussianSource src;
      BatchSink sink{&result.by_horizon, params.first_path_index};
      detail::run_lane_engine(src, ep, sink);
      censored_per_worker[w] = sink.censored;
    });
  }
  for (auto& t : pool) t.join();

  for (std::size_t c : censored_per_worker) result.censored_paths += c;
  const double frac = result.censored_fraction(params.paths);
  if (frac > 0.05)
    throw CensoringError("batch_run: censored fraction " + std::to_string(frac) +
                         " exceeds 5%; increase u_cap (u_cap_factor)");
  result.censor_warning = frac > 0.01;
  return result;
}

}  // namespace winding::sim
