#include "pece/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "pece/problems.hpp"
#include "pece/stencil.hpp"

namespace pece::cli {

namespace {

std::string anchored(const std::string& source, int line, const std::string& message) {
  if (line > 0) return source + ":" + std::to_string(line) + ": " + message;
  return source + ": " + message;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long> to_integer(const std::string& s) {
  long v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::vector<double>> to_reals(const std::string& s) {
  std::string spaced = s;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(spaced);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    const auto v = to_real(token);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

bool is_brusselator(const std::string& p) {
  return p == "brusselator" || p == "brusselator-limit-cycle" || p == "brusselator-stiff";
}

bool is_vehicle(const std::string& p) { return p == "vehicle" || p == "fsae-bumps"; }

bool is_closed_form(const std::string& p) {
  return p == "exp-decay" || p == "harmonic" || p == "forced-linear";
}

template <class P>
void override_span(P& p, const RunConfig& cfg) {
  if (cfg.t_end) p.t_end = *cfg.t_end;
  if (cfg.n_global) p.n_global = *cfg.n_global;
}

StateVector checked_ic(const std::vector<double>& ic, std::size_t dim, const std::string& what) {
  if (ic.size() != dim) {
    throw ConfigError("ic", 0,
                      what + " needs " + std::to_string(dim) + " initial values, got " +
                          std::to_string(ic.size()));
  }
  return StateVector(ic);
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(anchored(source, line, message)), line_(line) {}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& source, int line) {
  auto fail = [&](const std::string& msg) { throw ConfigError(source, line, msg); };
  auto real = [&](double lo_exclusive) {
    const auto v = to_real(value);
    if (!v || !(*v > lo_exclusive)) {
      fail("'" + key + "' needs a number > " + format_real(lo_exclusive) + ", got '" + value + "'");
    }
    return *v;
  };
  auto integer = [&](long lo) {
    const auto v = to_integer(value);
    if (!v || *v < lo || *v > 1'000'000'000L) {
      fail("'" + key + "' needs an integer >= " + std::to_string(lo) + ", got '" + value + "'");
    }
    return static_cast<int>(*v);
  };

  if (key == "problem") {
    if (!is_brusselator(value) && !is_vehicle(value) && !is_closed_form(value)) {
      fail("unknown problem '" + value + "'");
    }
    cfg.problem = value;
  } else if (key == "tol") {
    cfg.tol = real(0.0);
  } else if (key == "N") {
    cfg.n_global = integer(1);
  } else if (key == "T") {
    cfg.t_end = real(0.0);
  } else if (key == "variant") {
    const auto v = steppers::parse_variant(value);
    if (!v) fail("unknown corrector variant '" + value + "' (averaged, type1, type2)");
    cfg.variant = *v;
  } else if (key == "m") {
    cfg.m = integer(1);
  } else if (key == "fixed_substeps") {
    cfg.fixed_substeps = integer(1);
  } else if (key == "output_dir") {
    if (value.empty()) fail("'output_dir' must not be empty");
    cfg.output_dir = value;
  } else if (key == "allow_any_tolerance") {
    if (value == "true") {
      cfg.allow_any_tolerance = true;
    } else if (value == "false") {
      cfg.allow_any_tolerance = false;
    } else {
      fail("'allow_any_tolerance' needs true or false");
    }
  } else if (key == "A") {
    cfg.brusselator_a = real(0.0);
  } else if (key == "B") {
    cfg.brusselator_b = real(0.0);
  } else if (key == "ic") {
    auto v = to_reals(value);
    if (!v) fail("'ic' needs a comma separated list of numbers, got '" + value + "'");
    cfg.ic = std::move(*v);
  } else if (key == "amplitude_in") {
    const auto v = to_real(value);
    if (!v || *v < 0.0) fail("'amplitude_in' needs a number >= 0");
    cfg.amplitude_in = *v;
  } else if (key == "speed_mph") {
    cfg.speed_mph = real(0.0);
  } else if (key == "family") {
    const auto f = parse_family(value);
    if (!f) fail("unknown family '" + value + "' (first-order, kinematic, dynamic)");
    cfg.family = *f;
  } else {
    fail("unknown key '" + key + "'");
  }
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string raw;
  int line = 0;
  int tol_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line, "missing key before '='");
    if (value.empty()) throw ConfigError(source, line, "missing value for '" + key + "'");
    apply_setting(cfg, key, value, source, line);
    if (key == "tol") tol_line = line;
  }
  if (cfg.tol && !cfg.allow_any_tolerance && (*cfg.tol < 1e-8 || *cfg.tol > 1e-2)) {
    throw ConfigError(source, tol_line,
                      "tol must lie in [1e-8, 1e-2] (set allow_any_tolerance = true to override)");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  return parse_config(in, path);
}

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun run;
  run.name = cfg.problem;
  run.integration.m = cfg.m;
  run.integration.variant = cfg.variant;
  run.integration.fixed_substeps = cfg.fixed_substeps;
  run.integration.allow_any_tolerance = cfg.allow_any_tolerance;
  if (cfg.tol) run.integration.tol = *cfg.tol;

  if (is_brusselator(cfg.problem)) {
    auto preset = cfg.problem == "brusselator-stiff" ? problems::brusselator_stiff()
                                                     : problems::brusselator_limit_cycle();
    if (cfg.brusselator_a) preset.params.A = *cfg.brusselator_a;
    if (cfg.brusselator_b) preset.params.B = *cfg.brusselator_b;
    if (cfg.ic) preset.params.y0 = checked_ic(*cfg.ic, 2, "brusselator");
    run.problem = problems::brusselator_problem(preset.params, cfg.t_end.value_or(preset.t_end),
                                                cfg.n_global.value_or(preset.n_global));
  } else if (is_vehicle(cfg.problem)) {
    if (cfg.ic) throw ConfigError("ic", 0, "the vehicle starts from its static equilibrium");
    auto preset = problems::fsae_bumps();
    if (cfg.amplitude_in) preset.params.roadway.amplitude = *cfg.amplitude_in / 12.0;
    if (cfg.speed_mph) preset.params.roadway.speed = *cfg.speed_mph * problems::kMphToFtPerSec;
    preset.params.validate();
    run.problem = problems::vehicle_problem(preset.params, cfg.t_end.value_or(preset.t_end),
                                            cfg.n_global.value_or(preset.n_global));
  } else if (is_closed_form(cfg.problem)) {
    const auto cf = problems::closed_form(cfg.problem);
    switch (cfg.family) {
      case Family::first_order: {
        if (!cf.first_order) throw ConfigError("family", 0, cfg.problem + " has no first-order form");
        auto p = *cf.first_order;
        override_span(p, cfg);
        if (cfg.ic) p.x0 = checked_ic(*cfg.ic, p.x0.size(), cfg.problem);
        run.problem = std::move(p);
        break;
      }
      case Family::kinematic: {
        if (!cf.kinematic) throw ConfigError("family", 0, cfg.problem + " has no kinematic form");
        auto p = *cf.kinematic;
        override_span(p, cfg);
        if (cfg.ic) p.x0 = checked_ic(*cfg.ic, p.x0.size(), cfg.problem);
        run.problem = std::move(p);
        break;
      }
      case Family::dynamic: {
        if (!cf.dynamic) throw ConfigError("family", 0, cfg.problem + " has no dynamic form");
        auto p = *cf.dynamic;
        override_span(p, cfg);
        if (cfg.ic) p.x0 = checked_ic(*cfg.ic, p.x0.size(), cfg.problem);
        run.problem = std::move(p);
        break;
      }
    }
  } else {
    throw ConfigError("problem", 0, "unknown problem '" + cfg.problem + "'");
  }
  return run;
}

SolutionSeries integrate(const ResolvedRun& run) {
  return std::visit([&](const auto& p) { return pece::integrate(p, run.integration); },
                    run.problem);
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_solution_csv(std::ostream& out, const SolutionSeries& series) {
  const std::size_t dim = series.records.empty() ? 0 : series.records.front().x.size();
  const bool with_v = !series.records.empty() && series.records.front().v.has_value();
  out << "t";
  for (std::size_t i = 1; i <= dim; ++i) out << ",x" << i;
  if (with_v) {
    for (std::size_t i = 1; i <= dim; ++i) out << ",v" << i;
  }
  out << '\n';
  for (const auto& r : series.records) {
    out << format_real(r.t);
    for (double x : r.x) out << ',' << format_real(x);
    if (with_v && r.v) {
      for (double v : *r.v) out << ',' << format_real(v);
    }
    out << '\n';
  }
}

void write_error_trace_csv(std::ostream& out, const SolutionSeries& series) {
  out << "t,eps,h\n";
  for (const auto& e : series.error_trace) {
    out << format_real(e.t) << ',' << format_real(e.eps) << ',' << format_real(e.h) << '\n';
  }
}

void write_stats_csv(std::ostream& out, const RunStatistics& stats) {
  out << "steps,halved,doubled,restarts\n"
      << stats.local_steps << ',' << stats.halvings << ',' << stats.doublings << ','
      << stats.restarts << '\n';
}

void write_outputs(const std::string& dir, const SolutionSeries& series,
                   const std::optional<std::string>& failure) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  auto open = [&](const char* name) {
    std::ofstream f(root / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (root / name).string());
    return f;
  };
  {
    auto f = open("solution.csv");
    write_solution_csv(f, series);
  }
  {
    auto f = open("error_trace.csv");
    write_error_trace_csv(f, series);
  }
  {
    auto f = open("stats.csv");
    write_stats_csv(f, series.stats);
  }
  if (failure) {
    auto f = open(kIncompleteMarker);
    f << *failure << '\n';
  } else {
    fs::remove(root / kIncompleteMarker);
  }
}

std::string output_directory(const std::string& configured) {
  const char* env = std::getenv("PECE_OUTPUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return configured;
}

std::vector<double> ConvergenceGrid::step_sizes() const {
  std::vector<double> hs;
  double h = h0;
  for (int i = 0; i < levels; ++i, h *= 0.5) hs.push_back(h);
  return hs;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ResolvedRun run;
  try {
    run = resolve(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const std::string dir = output_directory(cfg.output_dir);
  try {
    const SolutionSeries series = integrate(run);
    write_outputs(dir, series);
    const auto& s = series.stats;
    out << run.name << ": steps=" << s.local_steps << " halved=" << s.halvings
        << " doubled=" << s.doublings << " restarts=" << s.restarts << " -> " << dir << '\n';
    return 0;
  } catch (const IntegrationError& e) {
    std::ostringstream msg;
    msg << e.what() << " at t=" << format_real(e.time()) << " (eps=" << format_real(e.error())
        << ", h=" << format_real(e.step()) << ")";
    write_outputs(dir, e.partial(), msg.str());
    err << "error: " << msg.str() << "; partial output in " << dir << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_verify_stencils(std::ostream& out) {
  const auto rows = stencil::verify_catalogue();
  out << std::left << std::setw(28) << "stencil" << std::setw(7) << "claim";
  for (int k = 0; k < 5; ++k) out << std::setw(10) << ("r" + std::to_string(k));
  out << std::setw(7) << "degree" << "status\n";
  bool ok = true;
  for (const auto& r : rows) {
    out << std::setw(28) << r.name << std::setw(7) << r.claimed_order;
    for (const auto& c : r.residual) out << std::setw(10) << stencil::to_string(c);
    out << std::setw(7) << r.exactness;
    if (r.meets_claim) {
      out << "ok";
    } else {
      out << "differs-from-claim";
      if (r.order_verified) {
        out << " (order-verified)";
        ok = false;
      }
    }
    out << '\n';
  }
  out << (ok ? "all order-verified stencils meet their claims\n"
             : "some order-verified stencils miss their claims\n");
  return ok ? 0 : 1;
}

int cmd_convergence(const std::string& family, const std::string& variant,
                    const std::string& problem, const std::string& output_dir, std::ostream& out,
                    std::ostream& err) {
  const std::string prefix = "startup-";
  const bool startup = family.rfind(prefix, 0) == 0;
  const auto fam = parse_family(startup ? family.substr(prefix.size()) : family);
  if (!fam) {
    err << "error: unknown family '" << family << "'\n";
    return 2;
  }
  const auto var = steppers::parse_variant(variant);
  if (!var) {
    err << "error: unknown corrector variant '" << variant << "'\n";
    return 2;
  }
  try {
    const auto cf = problems::closed_form(problem);
    const ConvergenceGrid grid;
    const auto hs = grid.step_sizes();
    const ConvergenceTable table = startup ? startup_local_study(cf, *fam, hs)
                                           : convergence_study(cf, *fam, *var, hs, grid.t_end);
    const std::string dir = output_directory(output_dir);
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / "convergence.csv";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "h,error\n";
    out << "h,error\n";
    for (const auto& p : table.points) {
      const std::string row = format_real(p.h) + "," + format_real(p.error);
      f << row << '\n';
      out << row << '\n';
    }
    out << (startup ? "local order: " : "slope: ") << std::fixed << std::setprecision(3)
        << table.slope << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace pece::cli
