// Experiment configuration, claim orchestration, and machine-readable
// reports. Each claim reproduces one statistical statement at desk scale and
// reports a pass/fail verdict with its full configuration echoed.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "windinglab/analytic.hpp"
#include "windinglab/sim_core.hpp"
#include "windinglab/stats.hpp"

namespace winding::run {

enum class Sampler { kSkewProduct, kDirectEuler };

struct ExperimentConfig {
  std::uint64_t master_seed = 20250801;
  std::size_t paths = 10000;
  std::vector<double> log_horizons = {50.0};
  double delta = 1e-3;
  double u_cap_factor = 1.0;
  Sampler sampler = Sampler::kSkewProduct;
  int workers = 0;  // 0 = auto
  std::string output_dir = ".";
  double ks_level = 0.001;

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config_file(const std::string& path);

enum class ClaimId {
  kMaxtimeLaw,
  kLastzeroEqualsMaxtime,
  kSpitzerLaw,
  kCauchyHit,
  kLemmaReflection,
  kLemmaLevy,
  kSamplerCross,
  kIntegralTest,
};

// Canonical identifier as it appears in reports ("MaxtimeLaw", ...).
const char* claim_name(ClaimId id);
// CLI spelling ("law-maxtime", "cauchy-hit", ...).
const char* claim_cli_name(ClaimId id);
std::optional<ClaimId> parse_claim(const std::string& name);
std::vector<ClaimId> all_claims();

// Per-claim defaults (horizon, path count) for when the caller does not pin
// them; claim code otherwise consumes the config as given.
ExperimentConfig claim_default_config(ClaimId id);

// Pinned thresholds.
inline constexpr double kMaxtimeSupTolerance = 0.03;
inline constexpr double kSpitzerSupTolerance = 0.05;
inline constexpr double kCauchyHitRadiusLog = 2.0;  // r = e^2
inline constexpr double kSamplerCrossTime = 10.0;   // theta(10)

struct ClaimReport {
  ClaimId id = ClaimId::kMaxtimeLaw;
  bool passed = false;
  double censored_fraction = 0.0;
  double wall_time_s = 0.0;
  ExperimentConfig config;   // echoed so the report reproduces itself
  nlohmann::json result;     // claim-specific numbers

  nlohmann::json to_json() const;
};

nlohmann::json ks_to_json(const stats::KsReport& r);

ClaimReport run_claim(ClaimId id, const ExperimentConfig& config);

// Writes samples.csv under config.output_dir:
//   path_index,log_t,theta_t,n_t,log_m_t,log_l_t,censored
// Bytes are a pure function of the config. Returns the file path.
std::string emit_samples(const ExperimentConfig& config);

// Qualitative liminf demo: log M_{t_n} - alpha(t_n) log t_n along
// t_n = exp(e^n), n = 1..max_n, one row per (path, n). Returns the CSV path.
std::string emit_liminf_demo(const ExperimentConfig& config, int max_n = 6);

}  // namespace winding::run
