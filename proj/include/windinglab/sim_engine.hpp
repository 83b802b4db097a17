// Lane-parallel stepping core of the skew-product engine. Eight paths advance
// in lockstep through fixed-width kernels; per-path results depend only on
// (master_seed, path_index), never on lane assignment or worker scheduling.
//
// The clock A(u) = int_0^u exp(2 B_hat) ds is carried as S * exp(c): plain
// trapezoid additions on S with a per-lane offset c that rescales whenever
// 2 B_hat drifts 350 above it. Logarithms are only taken at events (maxima,
// sign changes, horizon crossings), which are O(sqrt(steps)) per path.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "windinglab/lane_math.hpp"
#include "windinglab/rng.hpp"
#include "windinglab/sim_core.hpp"

namespace winding::sim::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kRescaleSpan = 350.0;

struct MaxRecord {
  double b = 0.0;      // running max of B over grid points (start included)
  double u = 0.0;
  double log_a = -kInf;
};

struct ZeroRecord {
  double u = 0.0;      // interpolated location of a sign change of B
  double log_a = -kInf;
};

// Interpolated log A at the sign change inside grid step k-1 -> k.
inline ZeroRecord make_zero_record(std::int64_t k, double delta, double b_prev,
                                   double b_cur, double log_a_prev, double log_a_cur) {
  const double frac = b_prev / (b_prev - b_cur);
  ZeroRecord z;
  z.u = (double(k - 1) + frac) * delta;
  z.log_a = log_a_prev + frac * (log_a_cur - log_a_prev);
  return z;
}

// Observables at the horizon crossing that happened inside step k-1 -> k.
// log_a_prev = -inf (first interval) falls back to log-linear interpolation
// in u itself, exact when the radial driver is flat.
inline WindingObservables emit_at_horizon(double target, std::int64_t k, double delta,
                                          double b_prev, double b_cur,
                                          double log_a_prev, double log_a_cur,
                                          const MaxRecord& mx, const ZeroRecord& z_last,
                                          const ZeroRecord& z_prev) {
  double frac;
  if (log_a_prev == -kInf) {
    frac = std::exp(target - log_a_cur);
  } else {
    frac = (target - log_a_prev) / (log_a_cur - log_a_prev);
  }
  const double u_h = (double(k - 1) + frac) * delta;
  const double theta = b_prev + (b_cur - b_prev) * frac;

  WindingObservables o;
  o.log_t = target;
  o.theta_t = theta;
  o.h_t = u_h;
  if (theta > mx.b) {
    // Max attained at the horizon itself (within the final partial step).
    o.n_t = theta;
    o.log_m_t = target;
  } else {
    o.n_t = mx.b;
    o.log_m_t = mx.log_a;
  }
  if (theta == 0.0) {
    // The horizon point itself is a zero of B; the last zero is t.
    o.log_l_t = target;
  } else {
    const ZeroRecord& z = (z_last.u <= u_h) ? z_last : z_prev;
    o.log_l_t = z.log_a;
  }
  o.censored = false;
  return o;
}

inline WindingObservables censored_observables(double target) {
  WindingObservables o;
  o.log_t = target;
  o.theta_t = kNaN;
  o.n_t = kNaN;
  o.log_m_t = kNaN;
  o.log_l_t = kNaN;
  o.h_t = kNaN;
  o.censored = true;
  return o;
}

// Production increment source: one Box-Muller pair per step per lane from the
// lane's own xoshiro stream.
class GaussianSource {
 public:
  void seed_lane(int lane, rng::SeedStream seed) { rng_.seed_lane(lane, seed); }
  void step(lanes::Doubles& z1, lanes::Doubles& z2) {
    lanes::U64s a, b;
    rng_.next(a);
    rng_.next(b);
    lanes::lanes_normal_pair(a, b, z1, z2);
  }

 private:
  lanes::XoshiroLanes rng_;
};

struct EngineParams {
  std::uint64_t master_seed = 0;
  std::uint64_t first_path_index = 0;
  std::size_t paths = 0;
  std::vector<double> log_horizons;
  double delta = 1e-3;
  std::int64_t cap_steps = 0;
};

// Sink interface (duck-typed):
//   void emit(uint64_t path_index, size_t horizon_index, const WindingObservables&);
//   void path_done(uint64_t path_index, bool censored);
struct NullRecorder {
  void record(double /*bhat*/, double /*b*/, double /*c*/, double /*s*/) {}
};

// Records the full trajectory of lane 0 (used to build ClockPath).
struct Lane0Recorder {
  std::vector<double>* b_hat;
  std::vector<double>* b;
  std::vector<double>* log_clock;
  void record(double bhat_v, double b_v, double c_v, double s_v) {
    b_hat->push_back(bhat_v);
    b->push_back(b_v);
    log_clock->push_back(s_v > 0.0 ? c_v + std::log(s_v) : -kInf);
  }
};

template <class Source, class Sink, class Recorder = NullRecorder>
void run_lane_engine(Source& src, const EngineParams& p, Sink& sink,
                     Recorder rec = NullRecorder{}) {
  using lanes::kLanes;
  if (p.paths == 0) return;

  const double delta = p.delta;
  const double half_delta = 0.5 * delta;
  const double sqrt_delta = std::sqrt(delta);
  const std::size_t n_hz = p.log_horizons.size();

  // Hot state, structure-of-arrays.
  alignas(64) double bhat[kLanes] = {}, b[kLanes] = {}, b_prev[kLanes] = {};
  alignas(64) double S[kLanes] = {}, S_prev[kLanes] = {}, offs[kLanes] = {};
  alignas(64) double e_prev[kLanes], s_target[kLanes], gate[kLanes], max_b[kLanes];
  alignas(64) std::int64_t k[kLanes] = {}, cap[kLanes];

  // Cold per-lane bookkeeping.
  struct LaneCold {
    std::uint64_t path_index = 0;
    std::size_t hz = 0;
    bool active = false;
    MaxRecord mx;
    ZeroRecord z_last, z_prev;
  } cold[kLanes];

  std::uint64_t next_path = p.first_path_index;
  const std::uint64_t end_path = p.first_path_index + p.paths;
  int active_lanes = 0;

  auto retire_lane = [&](int l) {
    cold[l].active = false;
    --active_lanes;
    // Zombie guards: no further events fire except harmless rescales.
    max_b[l] = kInf;
    s_target[l] = kInf;
    cap[l] = std::numeric_limits<std::int64_t>::max();
    b[l] = 0.0;
    b_prev[l] = 0.0;
  };

  auto refill_lane = [&](int l) {
    if (next_path >= end_path) {
      retire_lane(l);
      return;
    }
    LaneCold& c = cold[l];
    c.path_index = next_path++;
    c.hz = 0;
    c.active = true;
    c.mx = MaxRecord{};
    c.z_last = ZeroRecord{};
    c.z_prev = ZeroRecord{};
    bhat[l] = 0.0;
    b[l] = 0.0;
    b_prev[l] = 0.0;
    S[l] = 0.0;
    S_prev[l] = 0.0;
    offs[l] = 0.0;
    e_prev[l] = 1.0;
    max_b[l] = 0.0;
    k[l] = 0;
    cap[l] = p.cap_steps;
    s_target[l] = std::exp(p.log_horizons[0]);
    gate[l] = 0.5 * kRescaleSpan;
    src.seed_lane(l, rng::SeedStream{p.master_seed, c.path_index});
  };

  for (int l = 0; l < kLanes; ++l) {
    cold[l].active = true;  // so retire_lane's decrement balances
    ++active_lanes;
    refill_lane(l);
  }

  auto log_a_of = [](double off_v, double s_v) {
    return s_v > 0.0 ? off_v + std::log(s_v) : -kInf;
  };

  auto handle_lane = [&](int l) {
    LaneCold& c = cold[l];
    const bool zombie = !c.active;
    if (!zombie) {
      // 1. Zero of B inside (or at the end of) this step.
      if (b[l] == 0.0) {
        c.z_prev = c.z_last;
        c.z_last = ZeroRecord{double(k[l]) * delta, log_a_of(offs[l], S[l])};
      } else if (b_prev[l] * b[l] < 0.0) {
        c.z_prev = c.z_last;
        c.z_last = make_zero_record(k[l], delta, b_prev[l], b[l],
                                    log_a_of(offs[l], S_prev[l]), log_a_of(offs[l], S[l]));
      }
      // 2. Horizon crossings (possibly several in one step). Uses the max
      // state excluding the current grid point, folded below.
      while (S[l] >= s_target[l]) {
        const double target = p.log_horizons[c.hz];
        sink.emit(c.path_index, c.hz,
                  emit_at_horizon(target, k[l], delta, b_prev[l], b[l],
                                  log_a_of(offs[l], S_prev[l]), log_a_of(offs[l], S[l]),
                                  c.mx, c.z_last, c.z_prev));
        if (++c.hz == n_hz) {
          sink.path_done(c.path_index, false);
          refill_lane(l);
          return;
        }
        s_target[l] = std::exp(p.log_horizons[c.hz] - offs[l]);
      }
      // 3. Fold the new grid point into the running max (strict: earliest
      // index wins ties).
      if (b[l] > max_b[l]) {
        max_b[l] = b[l];
        c.mx.b = b[l];
        c.mx.u = double(k[l]) * delta;
        c.mx.log_a = log_a_of(offs[l], S[l]);
      }
      // 4. Cap: censor the remaining horizons.
      if (k[l] >= cap[l]) {
        for (std::size_t h = c.hz; h < n_hz; ++h)
          sink.emit(c.path_index, h, censored_observables(p.log_horizons[h]));
        sink.path_done(c.path_index, true);
        refill_lane(l);
        return;
      }
    }
    // 5. Rescale the clock representation (zombies included, to stay finite).
    if (bhat[l] > gate[l]) {
      const double c_new = 2.0 * bhat[l];
      const double f = std::exp(offs[l] - c_new);
      S[l] *= f;
      S_prev[l] *= f;
      e_prev[l] *= f;
      offs[l] = c_new;
      gate[l] = 0.5 * (c_new + kRescaleSpan);
      if (!zombie)
        s_target[l] = std::exp(p.log_horizons[c.hz] - c_new);
    }
  };

  lanes::Doubles z1, z2, arg, e_cur;
  while (active_lanes > 0) {
    src.step(z1, z2);
    for (int l = 0; l < kLanes; ++l) b_prev[l] = b[l];
    for (int l = 0; l < kLanes; ++l) bhat[l] += sqrt_delta * z1.v[l];
    for (int l = 0; l < kLanes; ++l) b[l] += sqrt_delta * z2.v[l];
    for (int l = 0; l < kLanes; ++l) arg.v[l] = 2.0 * bhat[l] - offs[l];
    lanes::lanes_exp(arg, e_cur);
    for (int l = 0; l < kLanes; ++l) S_prev[l] = S[l];
    for (int l = 0; l < kLanes; ++l) S[l] += half_delta * (e_prev[l] + e_cur.v[l]);
    for (int l = 0; l < kLanes; ++l) e_prev[l] = e_cur.v[l];
    for (int l = 0; l < kLanes; ++l) ++k[l];
    if constexpr (!std::is_same_v<Recorder, NullRecorder>)
      rec.record(bhat[0], b[0], offs[0], S[0]);
    unsigned mask = 0;
    for (int l = 0; l < kLanes; ++l) {
      const bool ev = (b_prev[l] * b[l] < 0.0) | (b[l] == 0.0) | (b[l] > max_b[l]) |
                      (S[l] >= s_target[l]) | (bhat[l] > gate[l]) | (k[l] >= cap[l]);
      mask |= unsigned(ev) << l;
    }
    if (mask) {
      for (int l = 0; l < kLanes; ++l)
        if (mask & (1u << l)) handle_lane(l);
    }
  }
}

// Leaner lockstep loop for the hitting sampler: no clock, stop at the first
// grid crossing of B_hat over log r.
template <class Source, class Sink>
void run_hit_engine(Source& src, std::uint64_t master_seed, std::uint64_t first_path,
                    std::size_t n, double log_r, double delta, std::int64_t cap_steps,
                    Sink& sink) {
  using lanes::kLanes;
  if (n == 0) return;
  const double sqrt_delta = std::sqrt(delta);

  alignas(64) double bhat[kLanes] = {}, bhat_prev[kLanes] = {};
  alignas(64) double b[kLanes] = {}, b_prev[kLanes] = {};
  alignas(64) std::int64_t k[kLanes] = {}, cap[kLanes];
  struct { std::uint64_t path_index; bool active; } cold[kLanes];

  std::uint64_t next_path = first_path;
  const std::uint64_t end_path = first_path + n;
  int active_lanes = kLanes;

  auto refill = [&](int l) {
    if (next_path >= end_path) {
      cold[l].active = false;
      --active_lanes;
      cap[l] = std::numeric_limits<std::int64_t>::max();
      bhat[l] = -kInf;  // never crosses, exp-free loop so -inf is harmless
      return;
    }
    cold[l].path_index = next_path++;
    cold[l].active = true;
    bhat[l] = 0.0;
    b[l] = 0.0;
    k[l] = 0;
    cap[l] = cap_steps;
    src.seed_lane(l, rng::SeedStream{master_seed, cold[l].path_index});
  };
  for (int l = 0; l < kLanes; ++l) refill(l);

  lanes::Doubles z1, z2;
  while (active_lanes > 0) {
    src.step(z1, z2);
    for (int l = 0; l < kLanes; ++l) bhat_prev[l] = bhat[l];
    for (int l = 0; l < kLanes; ++l) b_prev[l] = b[l];
    for (int l = 0; l < kLanes; ++l) bhat[l] += sqrt_delta * z1.v[l];
    for (int l = 0; l < kLanes; ++l) b[l] += sqrt_delta * z2.v[l];
    for (int l = 0; l < kLanes; ++l) ++k[l];
    unsigned mask = 0;
    for (int l = 0; l < kLanes; ++l)
      mask |= unsigned((bhat[l] >= log_r) | (k[l] >= cap[l])) << l;
    if (!mask) continue;
    for (int l = 0; l < kLanes; ++l) {
      if (!(mask & (1u << l)) || !cold[l].active) continue;
      if (bhat[l] >= log_r) {
        const double frac = (log_r - bhat_prev[l]) / (bhat[l] - bhat_prev[l]);
        sink.emit_hit(cold[l].path_index, b_prev[l] + frac * (b[l] - b_prev[l]));
      } else {
        sink.emit_censored(cold[l].path_index);
      }
      refill(l);
    }
  }
}

}  // namespace winding::sim::detail
