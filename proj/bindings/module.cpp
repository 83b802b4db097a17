// Python bindings for the winding-number laboratory: analytic distributions,
// statistical tests, and the batched samplers.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "windinglab/analytic.hpp"
#include "windinglab/euler_oracle.hpp"
#include "windinglab/runner.hpp"
#include "windinglab/sim_core.hpp"
#include "windinglab/stats.hpp"

namespace py = pybind11;
using namespace winding;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

py::dict obs_columns(const std::vector<sim::WindingObservables>& obs) {
  const std::size_t n = obs.size();
  py::array_t<double> theta(n), n_t(n), log_m(n), log_l(n), h_t(n);
  py::array_t<bool> censored(n);
  auto* pt = theta.mutable_data();
  auto* pn = n_t.mutable_data();
  auto* pm = log_m.mutable_data();
  auto* pl = log_l.mutable_data();
  auto* ph = h_t.mutable_data();
  auto* pc = censored.mutable_data();
  for (std::size_t i = 0; i < n; ++i) {
    pt[i] = obs[i].theta_t;
    pn[i] = obs[i].n_t;
    pm[i] = obs[i].log_m_t;
    pl[i] = obs[i].log_l_t;
    ph[i] = obs[i].h_t;
    pc[i] = obs[i].censored;
  }
  py::dict d;
  d["log_t"] = obs.empty() ? 0.0 : obs.front().log_t;
  d["theta_t"] = theta;
  d["n_t"] = n_t;
  d["log_m_t"] = log_m;
  d["log_l_t"] = log_l;
  d["h_t"] = h_t;
  d["censored"] = censored;
  return d;
}

run::ExperimentConfig config_from_kwargs(std::uint64_t master_seed, std::size_t paths,
                                         std::vector<double> log_horizons, double delta,
                                         double u_cap_factor, int workers,
                                         const std::string& sampler, double ks_level,
                                         const std::string& output_dir) {
  run::ExperimentConfig c;
  c.master_seed = master_seed;
  c.paths = paths;
  c.log_horizons = std::move(log_horizons);
  c.delta = delta;
  c.u_cap_factor = u_cap_factor;
  c.workers = workers;
  c.ks_level = ks_level;
  c.output_dir = output_dir;
  if (sampler == "skew-product") c.sampler = run::Sampler::kSkewProduct;
  else if (sampler == "direct-euler") c.sampler = run::Sampler::kDirectEuler;
  else throw std::invalid_argument("unknown sampler '" + sampler + "'");
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monte Carlo laboratory for the winding number of planar Brownian motion";

  // ---- analytic ----
  m.def("v_of", &analytic::v_of, py::arg("a"), py::arg("tol") = analytic::kDefaultTol);
  m.def("v_prime", &analytic::v_prime, py::arg("a"));
  m.def("maxtime_cdf", &analytic::maxtime_cdf, py::arg("u"),
        py::arg("tol") = analytic::kDefaultTol);
  m.def("maxtime_density", &analytic::maxtime_density, py::arg("u"));
  m.def("cauchy_cdf", &analytic::cauchy_cdf, py::arg("x"), py::arg("gamma"));
  m.def("spitzer_cdf", &analytic::spitzer_cdf, py::arg("x"));
  m.def("q_prob", &analytic::q_prob, py::arg("a"), py::arg("b"),
        py::arg("tol") = analytic::kDefaultTol);

  py::enum_<analytic::Convergence>(m, "Convergence")
      .value("Converges", analytic::Convergence::kConverges)
      .value("Diverges", analytic::Convergence::kDiverges)
      .value("Inconclusive", analytic::Convergence::kInconclusive);

  py::class_<analytic::AlphaFamily>(m, "AlphaFamily")
      .def_static("inv_log_log_pow", &analytic::AlphaFamily::inv_log_log_pow,
                  py::arg("c"), py::arg("p"), py::arg("loglog_t0") = 3.0)
      .def_static("inv_log_pow", &analytic::AlphaFamily::inv_log_pow, py::arg("c"),
                  py::arg("q"), py::arg("loglog_t0") = 3.0)
      .def_static("custom", &analytic::AlphaFamily::custom, py::arg("table"))
      .def("alpha", &analytic::AlphaFamily::alpha, py::arg("loglog_t"))
      .def_property_readonly("name", &analytic::AlphaFamily::name)
      .def_property_readonly("domain_start", &analytic::AlphaFamily::domain_start);

  m.def(
      "integral_test",
      [](const analytic::AlphaFamily& fam, std::vector<double> limits) {
        if (limits.empty()) limits = analytic::default_integral_test_limits();
        auto v = analytic::integral_test(fam, limits);
        py::dict d;
        d["classification"] = analytic::to_string(v.classification);
        d["assumption_holds"] = v.assumption_holds;
        d["tail_estimates"] = v.tail_estimates;
        return d;
      },
      py::arg("family"), py::arg("limits") = std::vector<double>{});

  // ---- stats ----
  m.def(
      "ks_one_sample",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& samples,
         const std::function<double(double)>& cdf, double level) {
        auto e = stats::EmpiricalCdf::from_samples(to_vector(samples));
        auto r = stats::ks_one_sample(e, cdf, level);
        return py::dict(py::arg("statistic") = r.statistic, py::arg("n") = r.n1,
                        py::arg("p_value") = r.p_value, py::arg("passed") = r.passed);
      },
      py::arg("samples"), py::arg("cdf"), py::arg("level") = 0.001);
  m.def(
      "ks_two_sample",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b,
         double level) {
        auto r = stats::ks_two_sample(stats::EmpiricalCdf::from_samples(to_vector(a)),
                                      stats::EmpiricalCdf::from_samples(to_vector(b)), level);
        return py::dict(py::arg("statistic") = r.statistic, py::arg("n1") = r.n1,
                        py::arg("n2") = *r.n2, py::arg("p_value") = r.p_value,
                        py::arg("passed") = r.passed);
      },
      py::arg("sample1"), py::arg("sample2"), py::arg("level") = 0.001);
  m.def(
      "proportion_check",
      [](std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2, double ratio) {
        auto r = stats::proportion_check(k1, n1, k2, n2, ratio);
        return py::dict(py::arg("z") = r.z, py::arg("passed") = r.passed,
                        py::arg("degenerate") = r.degenerate);
      },
      py::arg("k1"), py::arg("n1"), py::arg("k2"), py::arg("n2"), py::arg("ratio") = 2.0);
  m.def("dkw_band", &stats::dkw_band, py::arg("n"), py::arg("confidence"));

  // ---- samplers ----
  m.def(
      "batch_run",
      [](std::uint64_t master_seed, std::size_t paths, std::vector<double> log_horizons,
         double delta, double u_cap_factor, int workers, std::uint64_t first_path_index) {
        sim::BatchParams p;
        p.master_seed = master_seed;
        p.first_path_index = first_path_index;
        p.paths = paths;
        p.log_horizons = std::move(log_horizons);
        p.delta = delta;
        p.u_cap = sim::default_u_cap(p.log_horizons.empty() ? 1.0 : p.log_horizons.back(),
                                     u_cap_factor);
        p.workers = workers;
        auto res = sim::batch_run(p);
        py::list horizons;
        for (const auto& h : res.by_horizon) horizons.append(obs_columns(h));
        py::dict d;
        d["horizons"] = horizons;
        d["censored_paths"] = res.censored_paths;
        d["censor_warning"] = res.censor_warning;
        return d;
      },
      py::arg("master_seed"), py::arg("paths"), py::arg("log_horizons"),
      py::arg("delta") = 1e-3, py::arg("u_cap_factor") = 1.0, py::arg("workers") = 0,
      py::arg("first_path_index") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "hit_samples",
      [](std::uint64_t master_seed, std::size_t n, double r, double delta,
         double u_cap_factor, int workers, std::uint64_t first_path_index) {
        const double cap = sim::default_hit_u_cap(std::log(r), u_cap_factor);
        auto res = sim::hit_batch(master_seed, first_path_index, n, r, delta, cap, workers);
        py::gil_scoped_acquire gil;
        py::array_t<double> samples(res.samples.size());
        std::copy(res.samples.begin(), res.samples.end(), samples.mutable_data());
        return py::make_tuple(samples, res.censored);
      },
      py::arg("master_seed"), py::arg("n"), py::arg("r"), py::arg("delta") = 1e-3,
      py::arg("u_cap_factor") = 1.0, py::arg("workers") = 0,
      py::arg("first_path_index") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "euler_batch",
      [](std::uint64_t master_seed, std::size_t paths, double t_end, double h0,
         int workers, std::uint64_t first_path_index) {
        auto res =
            oracle::euler_batch(master_seed, first_path_index, paths, t_end, h0, workers);
        py::gil_scoped_acquire gil;
        py::dict d = obs_columns(res.obs);
        d["aborted"] = res.aborted;
        return d;
      },
      py::arg("master_seed"), py::arg("paths"), py::arg("t_end"), py::arg("h0") = 1e-3,
      py::arg("workers") = 0, py::arg("first_path_index") = 0,
      py::call_guard<py::gil_scoped_release>());

  // ---- runner ----
  m.def(
      "run_claim",
      [](const std::string& claim, std::uint64_t master_seed, std::size_t paths,
         std::vector<double> log_horizons, double delta, double u_cap_factor, int workers,
         const std::string& sampler, double ks_level, const std::string& output_dir) {
        auto id = run::parse_claim(claim);
        if (!id) throw std::invalid_argument("unknown claim '" + claim + "'");
        run::ExperimentConfig base = run::claim_default_config(*id);
        run::ExperimentConfig c = config_from_kwargs(
            master_seed, paths ? paths : base.paths,
            log_horizons.empty() ? base.log_horizons : std::move(log_horizons), delta,
            u_cap_factor, workers, sampler, ks_level, output_dir);
        run::ClaimReport rep;
        {
          py::gil_scoped_release release;
          rep = run::run_claim(*id, c);
        }
        auto j = rep.to_json().dump();
        py::object loads = py::module_::import("json").attr("loads");
        return loads(j);
      },
      py::arg("claim"), py::arg("master_seed") = 20250801, py::arg("paths") = 0,
      py::arg("log_horizons") = std::vector<double>{}, py::arg("delta") = 1e-3,
      py::arg("u_cap_factor") = 1.0, py::arg("workers") = 0,
      py::arg("sampler") = "skew-product", py::arg("ks_level") = 0.001,
      py::arg("output_dir") = ".");

  m.def("claims", []() {
    py::list out;
    for (auto id : run::all_claims()) out.append(run::claim_cli_name(id));
    return out;
  });

  m.def(
      "emit_samples",
      [](std::uint64_t master_seed, std::size_t paths, std::vector<double> log_horizons,
         double delta, double u_cap_factor, int workers, const std::string& sampler,
         const std::string& output_dir) {
        auto c = config_from_kwargs(master_seed, paths, std::move(log_horizons), delta,
                                    u_cap_factor, workers, sampler, 0.001, output_dir);
        return run::emit_samples(c);
      },
      py::arg("master_seed"), py::arg("paths"), py::arg("log_horizons"),
      py::arg("delta") = 1e-3, py::arg("u_cap_factor") = 1.0, py::arg("workers") = 0,
      py::arg("sampler") = "skew-product", py::arg("output_dir") = ".");
}
