#include "anderson/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include "anderson/eigencount.hpp"
#include "anderson/experiments.hpp"
#include "anderson/parallel.hpp"
#include "anderson/rank_one.hpp"

namespace anderson {

namespace {

using json = nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const std::vector<std::string>& measure_zoo() {
  static const std::vector<std::string> zoo{
      "uniform(0,1)",  "cantor()",
      "gauss(0,1)",    "pwc([0,0.5,1],[1,3])",
      "trunc(gauss(0,1),2)", "trunc(cantor(),0.5)"};
  return zoo;
}

std::string family_label(const Measure& m) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) return "uniform";
        if constexpr (std::is_same_v<T, PiecewiseConstant>) return "pwc";
        if constexpr (std::is_same_v<T, Cantor>) return "cantor";
        if constexpr (std::is_same_v<T, Gaussian>) return "gauss";
        if constexpr (std::is_same_v<T, Truncated>) return "trunc";
      },
      m.family());
}

QuadratureOptions quadrature(const ExperimentConfig& cfg) {
  QuadratureOptions o;
  o.tolerance = cfg.tolerance;
  o.max_depth = cfg.max_depth;
  return o;
}

double log_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0.0 && ys[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

void run_wegner(const ExperimentConfig& cfg, RunResult& out) {
  const auto ensemble = cfg.ensemble();
  for (const auto& iv : cfg.intervals) {
    out.reports.push_back(check_wegner(ensemble, iv, cfg.mc));
  }
}

void run_minami(const ExperimentConfig& cfg, RunResult& out) {
  const auto ensemble = cfg.ensemble();
  const auto& first = cfg.intervals.front();
  const auto& second = cfg.intervals.back();
  auto pair = check_minami_pair(ensemble, first, second, cfg.mc);
  out.reports.push_back(pair.general);
  if (pair.nested) out.reports.push_back(*pair.nested);

  if (cfg.sweep.empty()) return;
  const double center = 0.5 * (first.a() + first.b());
  std::vector<double> means;
  for (double len : cfg.sweep) {
    const HalfOpenInterval iv(center - 0.5 * len, center + 0.5 * len);
    auto r = check_minami_pair(ensemble, iv, iv, cfg.mc).general;
    r.experiment = "minami-sweep-" + short_number(len);
    means.push_back(r.empirical);
    out.reports.push_back(r);
  }
  out.diagnostics["minami_sweep"] = {{"lengths", cfg.sweep},
                                     {"means", means},
                                     {"slope", log_log_slope(cfg.sweep, means)}};
}

void run_generalized(const ExperimentConfig& cfg, RunResult& out) {
  const auto r = check_generalized(cfg.ensemble(), cfg.intervals, cfg.mc,
                                   cfg.interval_cap);
  out.reports.push_back(r.factorial);
  if (r.nested) out.reports.push_back(*r.nested);
  json sigmas = json::array();
  for (const auto& s : r.observed_sigmas) sigmas.push_back(s);
  out.diagnostics["observed_sigmas"] = sigmas;
  out.diagnostics["multiplicity_lower_bound"] = r.observed_sigmas.size();
}

void run_probability(const ExperimentConfig& cfg, RunResult& out) {
  const auto ensemble = cfg.ensemble();
  const std::vector<std::size_t> orders =
      cfg.orders.empty() ? std::vector<std::size_t>{1, 2, 3} : cfg.orders;
  const bool all = cfg.mode == "all";
  const std::span<const HalfOpenInterval> ivs(cfg.intervals);
  if (all || cfg.mode == "single") {
    for (std::size_t n : orders) {
      out.reports.push_back(check_probability(ensemble, ivs.first(1),
                                              ProbabilityMode::single_n, n,
                                              cfg.mc));
    }
  }
  if (all || cfg.mode == "staircase") {
    for (std::size_t n : orders) {
      if (n > ivs.size()) {
        if (!all) {
          throw std::invalid_argument("staircase with n = " + std::to_string(n) +
                                      " needs n intervals");
        }
        continue;
      }
      out.reports.push_back(check_probability(
          ensemble, ivs.first(n), ProbabilityMode::staircase, n, cfg.mc));
    }
  }
  if (all || cfg.mode == "pair-distance") {
    if (ivs.size() < 2) {
      if (!all) throw std::invalid_argument("pair-distance needs two intervals");
    } else {
      out.reports.push_back(check_probability(
          ensemble, ivs.first(2), ProbabilityMode::pair_distance, 2, cfg.mc));
    }
  }
}

void run_truncation(const ExperimentConfig& cfg, RunResult& out) {
  const StatisticKind kind = cfg.statistic == "minami"        ? StatisticKind::minami
                             : cfg.statistic == "generalized" ? StatisticKind::generalized
                                                              : StatisticKind::wegner;
  std::vector<HalfOpenInterval> ivs = cfg.intervals;
  if (kind == StatisticKind::wegner) ivs.erase(ivs.begin() + 1, ivs.end());
  const auto r =
      truncation_convergence(cfg.ensemble(), kind, ivs, cfg.cutoffs, cfg.mc);
  out.reports.push_back(r.baseline);
  json points = json::array();
  bool decreasing = true;
  double previous = std::numeric_limits<double>::infinity();
  double previous_radius = 0.0;
  for (const auto& p : r.points) {
    out.reports.push_back(p.report);
    points.push_back({{"cutoff", p.cutoff},
                      {"normalizer", p.normalizer},
                      {"difference", p.difference},
                      {"combined_radius", p.combined_radius}});
    // Increases smaller than the sampling noise do not count.
    if (p.difference > previous + p.combined_radius + previous_radius) {
      decreasing = false;
    }
    previous = p.difference;
    previous_radius = p.combined_radius;
  }
  out.diagnostics["truncation"] = {{"points", points},
                                   {"decreasing_up_to_noise", decreasing}};
  if (!r.points.empty()) {
    const auto& last = r.points.back();
    out.diagnostics["truncation"]["last_within_two_radii"] =
        last.difference <= 2.0 * last.combined_radius;
  }
}

void run_multiplicity(const ExperimentConfig& cfg, RunResult& out) {
  const HalfOpenInterval window =
      cfg.intervals.empty() ? HalfOpenInterval(0.0, 1.0) : cfg.intervals.front();
  const auto plan =
      plan_multiplicity(cfg.measure(), cfg.d, window, cfg.k_min, cfg.k_max,
                        cfg.margin, FreeOperator(cfg.free, cfg.boundary));
  json scales = json::array();
  for (std::size_t scale : plan.scales) {
    const auto r = event_b_probability(plan, scale, cfg.mc);
    scales.push_back({{"L", scale},
                      {"cell", plan.cell(scale)},
                      {"covering_intervals", covering_count(window, plan.cell(scale))},
                      {"frequency", r.empirical},
                      {"bound", r.bound}});
    out.reports.push_back(r);
  }
  out.diagnostics["plan"] = {{"alpha", plan.fit.alpha},
                             {"U", plan.fit.u},
                             {"U_least_squares", plan.fit.u_least_squares},
                             {"s0", plan.fit.s0},
                             {"N", plan.n},
                             {"q", plan.q},
                             {"margin", plan.margin},
                             {"exponent", plan.exponent()},
                             {"scales", scales}};
}

void run_spacings(const ExperimentConfig& cfg, RunResult& out) {
  const auto r = spacing_statistics(cfg.ensemble(), cfg.intervals.front(), cfg.mc);
  out.diagnostics["spacings"] = {{"spacings", r.spacings.size()},
                                 {"eigenvalues", r.eigenvalues},
                                 {"ks_distance", r.ks_distance},
                                 {"p_value", r.p_value},
                                 {"poisson_like", r.p_value > 0.01},
                                 {"gating", false}};
}

void run_spectral_average(const ExperimentConfig& cfg, RunResult& out) {
  RandomStream model_rng(cfg.mc.seed, 0);
  const auto model = RankOneModel::random(cfg.model_size, model_rng);
  std::vector<HalfOpenInterval> ivs = cfg.intervals;
  RandomStream iv_rng(cfg.mc.seed, 1);
  for (std::size_t k = 0; k < cfg.interval_count; ++k) {
    const double a = -2.0 + 4.0 * iv_rng.uniform();
    const double len = std::pow(10.0, -3.0 + 3.0 * iv_rng.uniform());
    ivs.emplace_back(a, a + len);
  }
  const auto& texts = cfg.measures.empty() ? measure_zoo() : cfg.measures;
  const auto opts = quadrature(cfg);
  for (std::size_t m = 0; m < texts.size(); ++m) {
    const Measure measure = parse_measure(texts[m]);
    const std::string label = "spectral-avg-m" + std::to_string(m) + "-" +
                              family_label(measure);
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      const auto r = spectral_average(model, measure, ivs[k], opts);
      out.rows.push_back({label + "-i" + std::to_string(k), r.value, r.bound,
                          r.pass});
    }
  }
  out.diagnostics["measures"] = texts;
}

void run_appendix_a(const ExperimentConfig& cfg, RunResult& out) {
  const auto opts = quadrature(cfg);

  // Resolvent identity, b >= kappa / 2 and the projector domination on
  // random inputs.
  RandomStream rng(cfg.mc.seed, 2);
  double worst_identity = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 16.0);
    const auto model = RankOneModel::random(n, rng);
    const double omega = 3.0 * rng.normal();
    const double energy = 2.0 * rng.normal();
    const double eps = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
    const double kappa = std::exp2(-4.0 + 8.0 * rng.uniform());
    const auto sides = rank_one_resolvent_sides(model, omega, {energy, eps});
    worst_identity = std::max(worst_identity, std::abs(sides.direct - sides.identity) /
                                                  (1.0 + std::abs(sides.identity)));
    const auto ab = ab_pair(model, energy, eps, kappa);
    min_ratio = std::min(min_ratio, 2.0 * ab.b / kappa);
    const double p =
        model.projection_weight(omega, HalfOpenInterval(energy - eps, energy + eps));
    worst_excess = std::max(worst_excess, p - 2.0 * eps * sides.identity.imag());
  }
  if (cfg.trials > 0) {
    out.rows.push_back({"rank1-identity", worst_identity, 1e-10,
                        worst_identity <= 1e-10});
    out.rows.push_back({"b-lower-bound", 1.0, min_ratio, min_ratio >= 1.0 - 1e-12});
    out.rows.push_back({"simpleineq", worst_excess, 1e-12, worst_excess <= 1e-12});
  }

  RandomStream model_rng(cfg.mc.seed, 0);
  const auto model = RankOneModel::random(cfg.model_size, model_rng);
  const std::vector<std::string> texts =
      cfg.measures.empty() ? std::vector<std::string>{"uniform(0,1)", "cantor()"}
                           : cfg.measures;
  for (std::size_t m = 0; m < texts.size(); ++m) {
    const Measure measure = parse_measure(texts[m]);
    const std::string label = "m" + std::to_string(m) + "-" + family_label(measure);
    for (double eps : cfg.eps) {
      for (double kappa : cfg.kappa) {
        const auto r = averaged_im_resolvent(model, measure, cfg.energy, eps,
                                             kappa, opts);
        out.rows.push_back({"genav-" + label + "-eps" + short_number(eps) +
                                "-kappa" + short_number(kappa),
                            r.lhs, r.rhs, r.pass});
      }
      const auto scan = kappa_scan(measure, 2.0 * eps);
      const std::string len = short_number(2.0 * eps);
      out.rows.push_back({"kappa-inf-simple-" + label + "-len" + len,
                          scan.value_simple, scan.cap_simple,
                          scan.value_simple <= scan.cap_simple * (1.0 + 1e-12)});
      out.rows.push_back({"kappa-inf-refined-" + label + "-len" + len,
                          scan.value_refined, scan.cap_refined,
                          scan.value_refined <= scan.cap_refined * (1.0 + 1e-12)});
    }
  }

  // Equality case of spectral averaging for a bounded density.
  const RankOneModel scalar(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1));
  const HalfOpenInterval sat(0.2, 0.6);
  const auto s = spectral_average(scalar, Measure::uniform(0.0, 1.0), sat, opts);
  out.rows.push_back({"saturation", s.value, s.bound,
                      s.pass && std::abs(s.value - s.bound) <= 1e-6});

  RandomStream small_rng(cfg.mc.seed, 3);
  const auto small = RankOneModel::random(4, small_rng);
  const HalfOpenInterval half(0.0, 0.5);
  const auto leb =
      bounded_density_average(small, half, 10.0 * small.norm() + 1.0, opts);
  out.rows.push_back({"lebesgue-average", leb.lebesgue_value, leb.bound, leb.pass});
}

}  // namespace

bool RunResult::pass() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](const BoundReport& r) { return r.pass; }) &&
         std::all_of(rows.begin(), rows.end(),
                     [](const CheckRow& r) { return r.pass; });
}

RunResult run_oracle_suite(std::uint64_t seed, std::size_t workers) {
  RunResult out;
  constexpr std::size_t kMatrices = 200;
  constexpr std::size_t kIntervals = 10;
  std::vector<std::size_t> mismatches(kMatrices, 0);
  parallel_for(kMatrices, workers, [&](std::size_t m) {
    RandomStream rng(seed, m);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 64.0);
    const std::size_t kd =
        std::min(n - 1, static_cast<std::size_t>(rng.uniform() * 9.0));
    SymmetricBandMatrix h(n, kd);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k <= kd && j + k < n; ++k) {
        h.set(j + k, j, k == 0 ? 2.0 * rng.normal() : rng.normal());
      }
    }
    const auto spectrum = full_spectrum(h);
    for (std::size_t i = 0; i < kIntervals; ++i) {
      const double a = 6.0 * rng.normal();
      const double b = a + 4.0 * rng.uniform_pos();
      const HalfOpenInterval iv(a, b);
      const auto expected = static_cast<std::size_t>(
          std::count_if(spectrum.begin(), spectrum.end(),
                        [&](double e) { return iv.contains(e); }));
      if (count_in_interval(h, iv) != expected) ++mismatches[m];
    }
  });
  std::size_t bad = 0;
  for (auto c : mismatches) bad += c;
  out.rows.push_back({"counting-oracle", static_cast<double>(bad), 0.0, bad == 0});

  constexpr std::size_t kConfigs = 10000;
  std::vector<char> holds(kConfigs, 1);
  parallel_for(kConfigs, workers, [&](std::size_t c) {
    RandomStream rng(seed ^ 0x9e3779b97f4a7c15ull, c);
    const std::size_t d = rng.coin() ? 1 : 2;
    std::vector<std::size_t> sides(d);
    for (auto& s : sides) {
      s = 1 + static_cast<std::size_t>(rng.uniform() * (d == 1 ? 24.0 : 6.0));
    }
    const FiniteVolume volume(sides);
    const FreeOperator free(rng.coin() ? FreeKind::adjacency : FreeKind::laplacian,
                            rng.coin() ? Boundary::simple : Boundary::periodic);
    std::vector<double> potential(volume.size());
    for (auto& v : potential) v = 4.0 * rng.uniform() - 2.0;
    const auto site = static_cast<std::size_t>(rng.uniform() * volume.size());
    double s = 6.0 * rng.normal();
    double t = s + 3.0 * rng.uniform();
    const double a = 3.0 * rng.normal();
    const HalfOpenInterval iv(a, a + 2.0 * rng.uniform_pos());
    holds[c] = interlacing_check(volume, free, potential, site, s, t, iv).holds;
  });
  const auto violations = static_cast<std::size_t>(
      std::count(holds.begin(), holds.end(), 0));
  out.rows.push_back({"interlacing", static_cast<double>(violations), 0.0,
                      violations == 0});
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult out;
  const auto& e = cfg.experiment;
  try {
    if (e == "wegner") {
      run_wegner(cfg, out);
    } else if (e == "minami") {
      run_minami(cfg, out);
    } else if (e == "generalized") {
      run_generalized(cfg, out);
    } else if (e == "probability") {
      run_probability(cfg, out);
    } else if (e == "truncation") {
      run_truncation(cfg, out);
    } else if (e == "multiplicity") {
      run_multiplicity(cfg, out);
    } else if (e == "spacings") {
      run_spacings(cfg, out);
    } else if (e == "spectral-avg") {
      run_spectral_average(cfg, out);
    } else if (e == "appendix-a") {
      run_appendix_a(cfg, out);
    } else if (e == "oracle-suite") {
      out = run_oracle_suite(cfg.mc.seed, cfg.mc.workers);
    } else {
      throw std::invalid_argument("unknown experiment");
    }
  } catch (const std::exception& ex) {
    throw std::runtime_error(e + ": " + ex.what());
  }
  return out;
}

std::string reports_csv(const std::vector<BoundReport>& reports) {
  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const auto& r : reports) {
    os << csv_field(r.experiment) << ',' << r.n << ',' << r.samples << ','
       << format_double(r.empirical) << ',' << format_double(r.ci_low) << ','
       << format_double(r.ci_high) << ',' << format_double(r.bound) << ','
       << format_double(r.ratio) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string checks_csv(const std::vector<CheckRow>& rows) {
  std::ostringstream os;
  os << kCheckHeader << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.experiment) << ',' << format_double(r.lhs) << ','
       << format_double(r.rhs) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

json to_json(const BoundReport& r) {
  return {{"experiment", r.experiment}, {"n", r.n},
          {"samples", r.samples},       {"empirical", r.empirical},
          {"ci_low", r.ci_low},         {"ci_high", r.ci_high},
          {"bound", r.bound},           {"ratio", r.ratio},
          {"pass", r.pass},             {"range_cap", r.range_cap}};
}

json to_json(const CheckRow& r) {
  return {{"experiment", r.experiment}, {"lhs", r.lhs}, {"rhs", r.rhs},
          {"pass", r.pass}};
}

json result_json(const ExperimentConfig& cfg, const RunResult& result,
                 const std::string& timestamp) {
  json config = json::object();
  for (const auto& [k, v] : cfg.echo) config[k] = v;
  config["effective"] = {{"samples", cfg.mc.samples},
                         {"seed", cfg.mc.seed},
                         {"confidence", cfg.mc.confidence},
                         {"workers", cfg.mc.workers},
                         {"bound_scale", cfg.mc.bound_scale}};
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));
  json rows = json::array();
  for (const auto& r : result.rows) rows.push_back(to_json(r));
  return {{"experiment", cfg.experiment}, {"timestamp", timestamp},
          {"config", config},             {"reports", reports},
          {"checks", rows},               {"diagnostics", result.diagnostics},
          {"pass", result.pass()}};
}

namespace {

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  RunResult result;
  try {
    result = run_experiment(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  for (const auto& r : result.reports) {
    out << (r.pass ? "PASS " : "FAIL ") << r.experiment << " n=" << r.n
        << " samples=" << r.samples << " mean=" << r.empirical << " ci=["
        << r.ci_low << ", " << r.ci_high << "] bound=" << r.bound << '\n';
  }
  for (const auto& r : result.rows) {
    out << (r.pass ? "PASS " : "FAIL ") << r.experiment << " lhs=" << r.lhs
        << " rhs=" << r.rhs << '\n';
  }
  if (result.diagnostics.contains("spacings")) {
    const auto& s = result.diagnostics["spacings"];
    const bool ok = s["poisson_like"].get<bool>();
    out << (ok ? "INFO " : "WARN ") << "spacings ks=" << s["ks_distance"]
        << " p=" << s["p_value"] << " (non-gating)\n";
    if (!ok) err << "warning: level spacings not Poisson-like at p > 0.01\n";
  }
  try {
    if (cfg.csv) {
      const bool checks = result.reports.empty() && !result.rows.empty();
      write_file(*cfg.csv, checks ? checks_csv(result.rows)
                                  : reports_csv(result.reports));
    }
    if (cfg.json) {
      write_file(*cfg.json, result_json(cfg, result, utc_timestamp()).dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return result.pass() ? 0 : 1;
}

}  // namespace anderson
