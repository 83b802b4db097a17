// Independent direct sampler of the planar motion, used to cross-validate the
// skew-product engine at small horizons. Steps the two coordinates with
// adaptive Gaussian increments and unwinds the angle continuously.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "windinglab/rng.hpp"
#include "windinglab/sim_core.hpp"

namespace winding::oracle {

class PathAbortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simulates W from (1, 0) to real time t_end with step variance
// h = h0 * min(1, |W|^2), matching the clock density so the angular
// resolution per step stays uniform. Steps that would enter the disk of
// radius 1e-6, or sweep an angle of pi/2 or more, are rejected with halved h;
// sixty consecutive halvings abort the path.
//
// Preconditions: 0 < t_end <= 1e3 and 0 < h0 <= 1e-3.
// The returned observables live on the real clock: log_m_t/log_l_t are logs
// of real times, h_t accumulates int dt/|W|^2.
sim::WindingObservables simulate_direct(rng::SeedStream seed, double t_end, double h0);

struct EulerBatchResult {
  std::vector<sim::WindingObservables> obs;  // ordered by original path slot
  std::size_t aborted = 0;
};

// Batched direct sampling. An aborted path is recorded and deterministically
// resampled under index + paths (independent of worker count).
EulerBatchResult euler_batch(std::uint64_t master_seed, std::uint64_t first_path_index,
                             std::size_t paths, double t_end, double h0, int workers = 0);

}  // namespace winding::oracle
