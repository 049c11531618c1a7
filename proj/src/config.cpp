#include "anderson/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "anderson/parallel.hpp"

namespace anderson {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "wegner",       "minami",     "generalized",  "probability",
      "spectral-avg", "appendix-a", "truncation",   "multiplicity",
      "spacings",     "oracle-suite"};
  return names;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_unsigned(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("expected a nonnegative integer, got '" +
                                std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(seps, pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(seps, start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

std::vector<double> to_doubles(std::string_view s) {
  std::vector<double> out;
  for (auto tok : split(s, " \t,[]")) out.push_back(to_double(tok));
  if (out.empty()) throw std::invalid_argument("expected a list of numbers");
  return out;
}

std::vector<std::size_t> to_sizes(std::string_view s) {
  std::vector<std::size_t> out;
  for (auto tok : split(s, " \t,[]")) out.push_back(to_unsigned(tok));
  if (out.empty()) throw std::invalid_argument("expected a list of integers");
  return out;
}

bool needs_lattice(const std::string& e) {
  return e == "wegner" || e == "minami" || e == "generalized" ||
         e == "probability" || e == "truncation" || e == "spacings";
}

}  // namespace

std::vector<HalfOpenInterval> parse_intervals(std::string_view text) {
  std::vector<HalfOpenInterval> out;
  std::size_t pos = 0;
  const auto fail = [&](const std::string& msg) {
    throw std::invalid_argument(msg + " at offset " + std::to_string(pos));
  };
  while (true) {
    pos = text.find_first_not_of(" \t", pos);
    if (pos == std::string_view::npos) break;
    if (text[pos] != ']') fail("expected ']' opening a half-open interval");
    const auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) fail("expected ','");
    const auto close = text.find(']', comma);
    if (close == std::string_view::npos) fail("expected closing ']'");
    const double a = to_double(text.substr(pos + 1, comma - pos - 1));
    const double b = to_double(text.substr(comma + 1, close - comma - 1));
    if (!(a < b)) {
      throw std::invalid_argument("interval " +
                                  std::string(text.substr(pos, close - pos + 1)) +
                                  " needs a < b");
    }
    out.emplace_back(a, b);
    pos = close + 1;
  }
  if (out.empty()) throw std::invalid_argument("no intervals given");
  return out;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "invalid configuration (" << issues.size() << " error"
           << (issues.size() == 1 ? "" : "s") << ")";
        for (const auto& i : issues) {
          os << "\n  ";
          if (i.line > 0) os << "line " << i.line << ": ";
          if (!i.field.empty()) os << i.field << ": ";
          os << i.message;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

Measure ExperimentConfig::measure() const { return parse_measure(measure_text); }

Ensemble ExperimentConfig::ensemble() const {
  return Ensemble(FiniteVolume(sides), FreeOperator(free, boundary), measure());
}

ExperimentConfig parse_config(std::string_view text,
                              const ConfigOverrides& overrides) {
  ExperimentConfig cfg;
  cfg.mc.workers = default_workers();
  std::vector<ConfigIssue> issues;
  std::optional<std::uint64_t> seed;
  bool d_given = false;
  std::map<std::string, std::size_t> seen;

  using Handler = std::function<void(std::string_view)>;
  const std::map<std::string, Handler, std::less<>> handlers{
      {"experiment", [&](std::string_view v) { cfg.experiment = v; }},
      {"d",
       [&](std::string_view v) {
         cfg.d = to_unsigned(v);
         d_given = true;
         if (cfg.d == 0) throw std::invalid_argument("must be positive");
       }},
      {"sides", [&](std::string_view v) { cfg.sides = to_sizes(v); }},
      {"free",
       [&](std::string_view v) {
         if (v == "adjacency") {
           cfg.free = FreeKind::adjacency;
         } else if (v == "laplacian") {
           cfg.free = FreeKind::laplacian;
         } else {
           throw std::invalid_argument("expected adjacency or laplacian");
         }
       }},
      {"boundary",
       [&](std::string_view v) {
         if (v == "simple") {
           cfg.boundary = Boundary::simple;
         } else if (v == "periodic") {
           cfg.boundary = Boundary::periodic;
         } else {
           throw std::invalid_argument("expected simple or periodic");
         }
       }},
      {"measure",
       [&](std::string_view v) {
         parse_measure(v);
         cfg.measure_text = v;
       }},
      {"measures",
       [&](std::string_view v) {
         cfg.measures.clear();
         for (auto m : split(v, ";")) {
           m = trim(m);
           parse_measure(m);
           cfg.measures.emplace_back(m);
         }
       }},
      {"intervals", [&](std::string_view v) { cfg.intervals = parse_intervals(v); }},
      {"samples", [&](std::string_view v) { cfg.mc.samples = to_unsigned(v); }},
      {"seed", [&](std::string_view v) { seed = to_unsigned(v); }},
      {"confidence", [&](std::string_view v) { cfg.mc.confidence = to_double(v); }},
      {"workers", [&](std::string_view v) { cfg.mc.workers = to_unsigned(v); }},
      {"bound_scale", [&](std::string_view v) { cfg.mc.bound_scale = to_double(v); }},
      {"csv", [&](std::string_view v) { cfg.csv = std::string(v); }},
      {"json", [&](std::string_view v) { cfg.json = std::string(v); }},
      {"n", [&](std::string_view v) { cfg.orders = to_sizes(v); }},
      {"mode",
       [&](std::string_view v) {
         if (v != "all" && v != "single" && v != "staircase" &&
             v != "pair-distance") {
           throw std::invalid_argument(
               "expected all, single, staircase or pair-distance");
         }
         cfg.mode = v;
       }},
      {"statistic",
       [&](std::string_view v) {
         if (v != "wegner" && v != "minami" && v != "generalized") {
           throw std::invalid_argument("expected wegner, minami or generalized");
         }
         cfg.statistic = v;
       }},
      {"cutoffs", [&](std::string_view v) { cfg.cutoffs = to_doubles(v); }},
      {"sweep", [&](std::string_view v) { cfg.sweep = to_doubles(v); }},
      {"interval_cap", [&](std::string_view v) { cfg.interval_cap = to_unsigned(v); }},
      {"k_min", [&](std::string_view v) { cfg.k_min = to_unsigned(v); }},
      {"k_max", [&](std::string_view v) { cfg.k_max = to_unsigned(v); }},
      {"margin", [&](std::string_view v) { cfg.margin = to_double(v); }},
      {"model_size", [&](std::string_view v) { cfg.model_size = to_unsigned(v); }},
      {"interval_count",
       [&](std::string_view v) { cfg.interval_count = to_unsigned(v); }},
      {"eps", [&](std::string_view v) { cfg.eps = to_doubles(v); }},
      {"kappa", [&](std::string_view v) { cfg.kappa = to_doubles(v); }},
      {"energy", [&](std::string_view v) { cfg.energy = to_double(v); }},
      {"trials", [&](std::string_view v) { cfg.trials = to_unsigned(v); }},
      {"tolerance", [&](std::string_view v) { cfg.tolerance = to_double(v); }},
      {"max_depth",
       [&](std::string_view v) {
         cfg.max_depth = static_cast<int>(to_unsigned(v));
       }},
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({line_no, "", "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      issues.push_back({line_no, key, "unknown key"});
      continue;
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      issues.push_back({line_no, key,
                        "duplicate key (first set on line " +
                            std::to_string(prev->second) + ")"});
      continue;
    }
    seen.emplace(key, line_no);
    try {
      it->second(value);
      cfg.echo.emplace_back(key, std::string(value));
    } catch (const std::exception& e) {
      issues.push_back({line_no, key, e.what()});
    }
  }

  const auto set_echo = [&](const std::string& key, const std::string& value) {
    for (auto& kv : cfg.echo) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    cfg.echo.emplace_back(key, value);
  };
  if (overrides.seed) {
    seed = overrides.seed;
    set_echo("seed", std::to_string(*seed));
  }
  if (overrides.samples) {
    cfg.mc.samples = *overrides.samples;
    set_echo("samples", std::to_string(cfg.mc.samples));
  }
  if (overrides.workers) {
    cfg.mc.workers = *overrides.workers;
    set_echo("workers", std::to_string(cfg.mc.workers));
  }
  if (overrides.csv) {
    cfg.csv = overrides.csv;
    set_echo("csv", *cfg.csv);
  }
  if (overrides.json) {
    cfg.json = overrides.json;
    set_echo("json", *cfg.json);
  }

  const auto line_of = [&](const std::string& key) -> std::size_t {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  const auto issue = [&](const std::string& key, std::string msg) {
    issues.push_back({line_of(key), key, std::move(msg)});
  };

  const auto& names = experiment_names();
  if (cfg.experiment.empty()) {
    if (!seen.count("experiment")) issue("experiment", "missing");
  } else if (std::find(names.begin(), names.end(), cfg.experiment) ==
             names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    issue("experiment", "unknown experiment '" + cfg.experiment +
                            "'; valid names: " + list);
  }
  if (!seed) {
    issue("seed", "missing (set `seed = N` or pass --seed)");
  } else {
    cfg.mc.seed = *seed;
  }
  if (cfg.mc.samples == 0) issue("samples", "must be at least 1");
  if (!(cfg.mc.confidence > 0.0 && cfg.mc.confidence < 1.0)) {
    issue("confidence", "must lie in ]0, 1[");
  }
  if (cfg.mc.workers == 0) issue("workers", "must be at least 1");
  if (!(cfg.mc.bound_scale >= 0.0)) issue("bound_scale", "must be >= 0");
  if (cfg.interval_cap == 0) issue("interval_cap", "must be at least 1");
  if (!(cfg.margin > 0.0)) issue("margin", "must be positive");
  if (cfg.k_min > cfg.k_max) issue("k_max", "must be >= k_min");
  if (cfg.model_size == 0 || cfg.model_size > 64) {
    issue("model_size", "must lie in [1, 64]");
  }
  if (!(cfg.tolerance > 0.0)) issue("tolerance", "must be positive");
  if (cfg.max_depth < 1) issue("max_depth", "must be at least 1");
  for (double x : cfg.eps) {
    if (!(x > 0.0)) issue("eps", "entries must be positive");
  }
  for (double x : cfg.kappa) {
    if (!(x > 0.0)) issue("kappa", "entries must be positive");
  }
  for (double x : cfg.cutoffs) {
    if (!(x > 0.0)) issue("cutoffs", "entries must be positive");
  }
  for (double x : cfg.sweep) {
    if (!(x > 0.0)) issue("sweep", "entries must be positive");
  }
  for (std::size_t x : cfg.orders) {
    if (x == 0 || x > 20) issue("n", "entries must lie in [1, 20]");
  }

  if (!cfg.sides.empty()) {
    if (std::find(cfg.sides.begin(), cfg.sides.end(), 0u) != cfg.sides.end()) {
      issue("sides", "must be positive");
    }
    if (!d_given) {
      cfg.d = cfg.sides.size();
    } else if (cfg.sides.size() == 1 && cfg.d > 1) {
      cfg.sides.assign(cfg.d, cfg.sides[0]);
    } else if (cfg.sides.size() != cfg.d) {
      issue("sides", "has " + std::to_string(cfg.sides.size()) +
                         " entries but d = " + std::to_string(cfg.d));
    }
  }
  if (needs_lattice(cfg.experiment)) {
    if (cfg.sides.empty()) issue("sides", "missing");
    if (cfg.intervals.empty() && !seen.count("intervals")) {
      issue("intervals", "missing");
    }
  }
  if (cfg.experiment == "minami" && cfg.intervals.size() > 2) {
    issue("intervals", "minami takes one or two intervals");
  }
  if (cfg.experiment == "multiplicity" && cfg.intervals.size() > 1) {
    issue("intervals", "multiplicity takes one energy window");
  }
  if (cfg.experiment == "truncation" && cfg.statistic == "minami" &&
      cfg.intervals.size() > 2) {
    issue("intervals", "the minami statistic takes one or two intervals");
  }

  if (!issues.empty()) {
    // File order; issues without a line go last.
    std::stable_sort(issues.begin(), issues.end(),
                     [](const ConfigIssue& x, const ConfigIssue& y) {
                       return (x.line == 0 ? SIZE_MAX : x.line) <
                              (y.line == 0 ? SIZE_MAX : y.line);
                     });
    throw ConfigError(std::move(issues));
  }
  return cfg;
}

}  // namespace anderson
