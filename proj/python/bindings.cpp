#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "anderson/eigencount.hpp"
#include "anderson/estimators.hpp"
#include "anderson/experiments.hpp"
#include "anderson/rank_one.hpp"
#include "anderson/runner.hpp"

namespace py = pybind11;
using namespace anderson;

namespace {

FreeOperator make_free(const std::string& kind, const std::string& boundary) {
  FreeKind k;
  if (kind == "adjacency") {
    k = FreeKind::adjacency;
  } else if (kind == "laplacian") {
    k = FreeKind::laplacian;
  } else {
    throw py::value_error("free must be 'adjacency' or 'laplacian'");
  }
  Boundary b;
  if (boundary == "simple") {
    b = Boundary::simple;
  } else if (boundary == "periodic") {
    b = Boundary::periodic;
  } else {
    throw py::value_error("boundary must be 'simple' or 'periodic'");
  }
  return {k, b};
}

SymmetricBandMatrix hamiltonian(const std::vector<std::size_t>& sides,
                                const std::vector<double>& potential,
                                const std::string& free,
                                const std::string& boundary) {
  return assemble(FiniteVolume(sides), make_free(free, boundary), potential);
}

MonteCarloConfig monte_carlo(std::size_t samples, std::uint64_t seed,
                             std::size_t workers, double confidence) {
  MonteCarloConfig mc;
  mc.samples = samples;
  mc.seed = seed;
  mc.workers = workers == 0 ? default_workers() : workers;
  mc.confidence = confidence;
  return mc;
}

std::vector<HalfOpenInterval> intervals(
    const std::vector<std::pair<double, double>>& pairs) {
  std::vector<HalfOpenInterval> out;
  for (const auto& [a, b] : pairs) out.emplace_back(a, b);
  return out;
}

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Eigenvalue counting estimates for random Schroedinger operators";

  py::class_<Measure>(m, "Measure")
      .def_static("uniform", &Measure::uniform, py::arg("lo"), py::arg("hi"))
      .def_static("cantor", &Measure::cantor, py::arg("depth") = 40)
      .def_static("gaussian", &Measure::gaussian, py::arg("mean"), py::arg("stddev"))
      .def_static("piecewise_constant", &Measure::piecewise_constant,
                  py::arg("breaks"), py::arg("heights"))
      .def_static("parse", &parse_measure, py::arg("text"))
      .def("truncate", [](const Measure& self, double cutoff) { return truncate(self, cutoff); },
           py::arg("cutoff"))
      .def("q", &Measure::q, py::arg("s"))
      .def("concentration", &Measure::concentration, py::arg("s"))
      .def("cdf", &Measure::cdf, py::arg("x"))
      .def("mass", &Measure::mass, py::arg("lo"), py::arg("hi"))
      .def("density_sup", &Measure::density_sup)
      .def("normalizer", &Measure::normalizer)
      .def("support", &Measure::support)
      .def("sample",
           [](const Measure& self, std::size_t count, std::uint64_t seed,
              std::uint64_t stream) {
             RandomStream rng(seed, stream);
             std::vector<double> out(count);
             for (auto& x : out) x = self.sample(rng);
             return out;
           },
           py::arg("count"), py::arg("seed"), py::arg("stream") = 0)
      .def("holder_fit",
           [](const Measure& self) {
             const auto fit = holder_fit(self, default_holder_scales());
             return py::dict(py::arg("alpha") = fit.alpha, py::arg("u") = fit.u,
                             py::arg("u_least_squares") = fit.u_least_squares,
                             py::arg("s0") = fit.s0);
           })
      .def("__repr__", &Measure::describe);

  m.def("hamiltonian",
        [](const std::vector<std::size_t>& sides, const std::vector<double>& potential,
           const std::string& free, const std::string& boundary) {
          return hamiltonian(sides, potential, free, boundary).to_dense();
        },
        py::arg("sides"), py::arg("potential"), py::arg("free") = "adjacency",
        py::arg("boundary") = "simple",
        "Dense H0 + V for the box with the given sides (first axis fastest).");

  m.def("count_in_interval",
        [](const std::vector<std::size_t>& sides, const std::vector<double>& potential,
           double a, double b, const std::string& free, const std::string& boundary) {
          return count_in_interval(hamiltonian(sides, potential, free, boundary), {a, b});
        },
        py::arg("sides"), py::arg("potential"), py::arg("a"), py::arg("b"),
        py::arg("free") = "adjacency", py::arg("boundary") = "simple",
        "Number of eigenvalues in ]a, b] by inertia counting.");

  m.def("count_dense",
        [](const Eigen::MatrixXd& h, double a, double b) {
          return count_in_interval(SymmetricBandMatrix::from_dense(h), {a, b});
        },
        py::arg("matrix"), py::arg("a"), py::arg("b"));

  m.def("full_spectrum",
        [](const Eigen::MatrixXd& h) {
          return full_spectrum(SymmetricBandMatrix::from_dense(h));
        },
        py::arg("matrix"));

  m.def("interlacing_check",
        [](const std::vector<std::size_t>& sides, const std::vector<double>& potential,
           std::size_t site, double s, double t, double a, double b,
           const std::string& free, const std::string& boundary) {
          const auto r = interlacing_check(FiniteVolume(sides), make_free(free, boundary),
                                           potential, site, s, t, {a, b});
          return py::dict(py::arg("count_s") = r.count_s, py::arg("count_t") = r.count_t,
                          py::arg("holds") = r.holds);
        },
        py::arg("sides"), py::arg("potential"), py::arg("site"), py::arg("s"),
        py::arg("t"), py::arg("a"), py::arg("b"), py::arg("free") = "adjacency",
        py::arg("boundary") = "simple");

  m.def("check_wegner",
        [](const std::vector<std::size_t>& sides, const Measure& measure, double a,
           double b, std::size_t samples, std::uint64_t seed, std::size_t workers,
           double confidence, const std::string& free, const std::string& boundary) {
          const Ensemble e(FiniteVolume(sides), make_free(free, boundary), measure);
          return to_python(
              to_json(check_wegner(e, {a, b}, monte_carlo(samples, seed, workers, confidence))));
        },
        py::arg("sides"), py::arg("measure"), py::arg("a"), py::arg("b"),
        py::arg("samples"), py::arg("seed"), py::arg("workers") = 0,
        py::arg("confidence") = 0.99, py::arg("free") = "adjacency",
        py::arg("boundary") = "simple");

  m.def("check_generalized",
        [](const std::vector<std::size_t>& sides, const Measure& measure,
           const std::vector<std::pair<double, double>>& ivs, std::size_t samples,
           std::uint64_t seed, std::size_t workers) {
          const Ensemble e(FiniteVolume(sides), FreeOperator(FreeKind::adjacency,
                                                             Boundary::simple),
                           measure);
          const auto r = check_generalized(e, intervals(ivs),
                                           monte_carlo(samples, seed, workers, 0.99));
          py::dict out;
          out["factorial"] = to_python(to_json(r.factorial));
          out["nested"] = r.nested ? to_python(to_json(*r.nested)) : py::none();
          out["observed_sigmas"] = r.observed_sigmas.size();
          return out;
        },
        py::arg("sides"), py::arg("measure"), py::arg("intervals"), py::arg("samples"),
        py::arg("seed"), py::arg("workers") = 0);

  py::class_<RankOneModel>(m, "RankOneModel")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd>(), py::arg("h0"), py::arg("phi"))
      .def_static("random",
                  [](std::size_t n, std::uint64_t seed) {
                    RandomStream rng(seed, 0);
                    return RankOneModel::random(n, rng);
                  },
                  py::arg("n"), py::arg("seed"))
      .def_property_readonly("h0", &RankOneModel::h0)
      .def_property_readonly("phi", &RankOneModel::phi)
      .def("free_resolvent", &RankOneModel::free_resolvent, py::arg("z"))
      .def("direct_resolvent", &RankOneModel::direct_resolvent, py::arg("omega"), py::arg("z"))
      .def("resolvent",
           [](const RankOneModel& self, double omega, std::complex<double> z) {
             return rank_one_resolvent(self, omega, z);
           },
           py::arg("omega"), py::arg("z"))
      .def("projection_weight",
           [](const RankOneModel& self, double omega, double a, double b) {
             return self.projection_weight(omega, {a, b});
           },
           py::arg("omega"), py::arg("a"), py::arg("b"))
      .def("spectral_average",
           [](const RankOneModel& self, const Measure& measure, double a, double b,
              double tolerance) {
             QuadratureOptions opts;
             opts.tolerance = tolerance;
             const auto r = spectral_average(self, measure, {a, b}, opts);
             return py::dict(py::arg("value") = r.value, py::arg("bound") = r.bound,
                             py::arg("residual") = r.residual, py::arg("pass") = r.pass);
           },
           py::arg("measure"), py::arg("a"), py::arg("b"), py::arg("tolerance") = 1e-9)
      .def("ab_pair",
           [](const RankOneModel& self, double energy, double eps, double kappa) {
             const auto r = ab_pair(self, energy, eps, kappa);
             return py::make_tuple(r.a, r.b);
           },
           py::arg("energy"), py::arg("eps"), py::arg("kappa"))
      .def("averaged_im_resolvent",
           [](const RankOneModel& self, const Measure& measure, double energy,
              double eps, double kappa) {
             const auto r = averaged_im_resolvent(self, measure, energy, eps, kappa);
             return py::dict(py::arg("lhs") = r.lhs, py::arg("rhs") = r.rhs,
                             py::arg("pass") = r.pass);
           },
           py::arg("measure"), py::arg("energy"), py::arg("eps"), py::arg("kappa"));

  m.def("experiment_names", &experiment_names);

  m.def("run_config",
        [](const std::string& text, std::optional<std::uint64_t> seed,
           std::optional<std::size_t> samples, std::optional<std::size_t> workers) {
          ConfigOverrides o;
          o.seed = seed;
          o.samples = samples;
          o.workers = workers;
          ExperimentConfig cfg;
          try {
            cfg = parse_config(text, o);
          } catch (const ConfigError& e) {
            throw py::value_error(e.what());
          }
          const auto result = run_experiment(cfg);
          return to_python(result_json(cfg, result, ""));
        },
        py::arg("text"), py::arg("seed") = py::none(), py::arg("samples") = py::none(),
        py::arg("workers") = py::none(),
        "Parses a config document, runs it and returns the JSON report as a dict.");

  m.def("oracle_suite",
        [](std::uint64_t seed) {
          const auto r = run_oracle_suite(seed, default_workers());
          py::list rows;
          for (const auto& row : r.rows) rows.append(to_python(to_json(row)));
          return rows;
        },
        py::arg("seed") = 20240601);
}
