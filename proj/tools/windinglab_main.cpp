// windinglab command-line front end.
//
// Subcommands:
//   claim <id>        run one verification experiment, write a JSON report
//   samples           emit per-horizon observables as CSV
//   analytic <fn> ..  evaluate the analytic distributions directly
//   demo              emit the liminf trajectory demo CSV
//
// Exit codes: 0 pass, 1 statistical fail, 2 usage/config error,
// 3 simulation integrity error (excess censoring).

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "windinglab/analytic.hpp"
#include "windinglab/runner.hpp"
#include "windinglab/sim_core.hpp"
#include "windinglab/stats.hpp"

namespace {

using winding::run::ExperimentConfig;

struct ConfigFlags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::vector<double> log_t;
  std::optional<double> delta;
  std::optional<double> u_cap_factor;
  std::optional<double> ks_level;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> sampler;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_file, "JSON config file; flags override its fields");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--paths", f.paths, "number of paths / samples");
  cmd->add_option("--log-t", f.log_t, "horizon(s) as log t, increasing");
  cmd->add_option("--delta", f.delta, "internal-clock step (<= 0.01)");
  cmd->add_option("--u-cap-factor", f.u_cap_factor, "multiplier on the default clock cap");
  cmd->add_option("--ks-level", f.ks_level, "KS acceptance level");
  cmd->add_option("--workers", f.workers, "worker threads (0 = auto)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--sampler", f.sampler, "skew-product | direct-euler");
}

ExperimentConfig merge_config(const ExperimentConfig& base, const ConfigFlags& f) {
  ExperimentConfig c = base;
  if (!f.config_file.empty()) {
    // File supplies the base; claim defaults only fill what it omits.
    c = winding::run::load_config_file(f.config_file);
  }
  if (f.seed) c.master_seed = *f.seed;
  if (f.paths) c.paths = *f.paths;
  if (!f.log_t.empty()) c.log_horizons = f.log_t;
  if (f.delta) c.delta = *f.delta;
  if (f.u_cap_factor) c.u_cap_factor = *f.u_cap_factor;
  if (f.ks_level) c.ks_level = *f.ks_level;
  if (f.workers) c.workers = *f.workers;
  if (f.out) c.output_dir = *f.out;
  if (f.sampler) {
    if (*f.sampler == "skew-product") c.sampler = winding::run::Sampler::kSkewProduct;
    else if (*f.sampler == "direct-euler") c.sampler = winding::run::Sampler::kDirectEuler;
    else throw CLI::ValidationError("--sampler", "unknown sampler '" + *f.sampler + "'");
  }
  return c;
}

int run_analytic(const std::vector<std::string>& args, double tol) {
  using namespace winding::analytic;
  if (args.empty()) {
    std::cerr << "analytic: missing function name\n"
              << "functions: v-of a | v-prime c | maxtime-cdf u | maxtime-density u |\n"
              << "           cauchy-cdf x gamma | spitzer-cdf x | q-prob a b |\n"
              << "           dkw-band n confidence | integral-test\n";
    return 2;
  }
  const std::string& fn = args[0];
  auto need = [&](std::size_t n) {
    if (args.size() != n + 1)
      throw std::invalid_argument("analytic " + fn + ": expected " + std::to_string(n) +
                                  " argument(s)");
  };
  double value = 0.0;
  if (fn == "v-of") {
    need(1);
    value = v_of(std::stod(args[1]), tol);
  } else if (fn == "v-prime") {
    need(1);
    value = v_prime(std::stod(args[1]));
  } else if (fn == "maxtime-cdf") {
    need(1);
    value = maxtime_cdf(std::stod(args[1]), tol);
  } else if (fn == "maxtime-density") {
    need(1);
    value = maxtime_density(std::stod(args[1]));
  } else if (fn == "cauchy-cdf") {
    need(2);
    value = cauchy_cdf(std::stod(args[1]), std::stod(args[2]));
  } else if (fn == "spitzer-cdf") {
    need(1);
    value = spitzer_cdf(std::stod(args[1]));
  } else if (fn == "q-prob") {
    need(2);
    value = q_prob(std::stod(args[1]), std::stod(args[2]), tol);
  } else if (fn == "dkw-band") {
    need(2);
    value = winding::stats::dkw_band(std::stoul(args[1]), std::stod(args[2]));
  } else if (fn == "integral-test") {
    const auto limits = default_integral_test_limits();
    const AlphaFamily families[3] = {AlphaFamily::inv_log_log_pow(1.0, 2.0),
                                     AlphaFamily::inv_log_log_pow(1.0, 1.0),
                                     AlphaFamily::inv_log_pow(1.0, 1.0)};
    for (const auto& fam : families) {
      auto v = integral_test(fam, limits);
      std::printf("%-22s verdict=%-12s assumption_holds=%d partial=%.6g\n",
                  fam.name().c_str(), to_string(v.classification), int(v.assumption_holds),
                  v.tail_estimates.back().second);
    }
    return 0;
  } else {
    std::cerr << "analytic: unknown function '" << fn << "'\n";
    return 2;
  }
  std::printf("%.12g\n", value);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"winding-number Monte Carlo laboratory"};
  app.require_subcommand(1);

  // claim
  auto* claim_cmd = app.add_subcommand("claim", "run a verification experiment");
  std::string claim_id_str;
  claim_cmd->add_option("id", claim_id_str, "claim id (e.g. law-maxtime, cauchy-hit)")
      ->required();
  ConfigFlags claim_flags;
  add_config_flags(claim_cmd, claim_flags);
  bool quiet = false;
  claim_cmd->add_flag("--quiet", quiet, "suppress the report on stdout");

  // samples
  auto* samples_cmd = app.add_subcommand("samples", "emit per-horizon observables as CSV");
  ConfigFlags samples_flags;
  add_config_flags(samples_cmd, samples_flags);

  // analytic
  auto* analytic_cmd =
      app.add_subcommand("analytic", "evaluate the analytic distributions");
  std::vector<std::string> analytic_args;
  analytic_cmd->add_option("args", analytic_args, "function name and arguments");
  double analytic_tol = winding::analytic::kDefaultTol;
  analytic_cmd->add_option("--tol", analytic_tol, "quadrature tolerance");
  analytic_cmd->positionals_at_end();

  // demo
  auto* demo_cmd = app.add_subcommand("demo", "emit the liminf trajectory demo CSV");
  ConfigFlags demo_flags;
  add_config_flags(demo_cmd, demo_flags);
  int demo_max_n = 6;
  demo_cmd->add_option("--max-n", demo_max_n, "largest n in t_n = exp(e^n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (claim_cmd->parsed()) {
      auto id = winding::run::parse_claim(claim_id_str);
      if (!id) {
        std::cerr << "unknown claim '" << claim_id_str << "'; known:";
        for (auto c : winding::run::all_claims())
          std::cerr << " " << winding::run::claim_cli_name(c);
        std::cerr << "\n";
        return 2;
      }
      const ExperimentConfig config =
          merge_config(winding::run::claim_default_config(*id), claim_flags);
      auto report = winding::run::run_claim(*id, config);
      const auto j = report.to_json();
      std::filesystem::create_directories(config.output_dir);
      const std::string path = config.output_dir + "/claim_" +
                               winding::run::claim_cli_name(*id) + ".json";
      std::ofstream out(path, std::ios::binary);
      out << j.dump(2) << "\n";
      if (!quiet) std::cout << j.dump(2) << "\n";
      return report.passed ? 0 : 1;
    }
    if (samples_cmd->parsed()) {
      const ExperimentConfig config = merge_config(ExperimentConfig{}, samples_flags);
      const std::string path = winding::run::emit_samples(config);
      std::cout << path << "\n";
      return 0;
    }
    if (analytic_cmd->parsed()) {
      return run_analytic(analytic_args, analytic_tol);
    }
    if (demo_cmd->parsed()) {
      ExperimentConfig base;
      base.paths = 4;
      const ExperimentConfig config = merge_config(base, demo_flags);
      const std::string path = winding::run::emit_liminf_demo(config, demo_max_n);
      std::cout << path << "\n";
      return 0;
    }
  } catch (const winding::sim::CensoringError& e) {
    std::cerr << "simulation integrity error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
