/**
 * @file cli.hpp
 * @brief Run configuration, CSV output and the command implementations behind
 *        the `pece` executable.
 */
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pece/core.hpp"
#include "pece/driver.hpp"
#include "pece/steppers.hpp"

namespace pece::cli {

/// Malformed configuration. `line` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

/**
 * @brief Everything needed to set up one integration.
 *
 * `problem` is either a preset (brusselator-limit-cycle, brusselator-stiff,
 * fsae-bumps) or a problem kind (brusselator, vehicle, exp-decay, harmonic,
 * forced-linear). Unset fields fall back to the preset or problem defaults.
 */
struct RunConfig {
  std::string problem = "brusselator-limit-cycle";
  std::optional<double> tol;
  std::optional<int> n_global;
  std::optional<double> t_end;
  steppers::CorrectorVariant variant = steppers::CorrectorVariant::type2;
  int m = 1;
  std::optional<int> fixed_substeps;
  std::string output_dir = "pece-out";
  bool allow_any_tolerance = false;

  std::optional<double> brusselator_a;
  std::optional<double> brusselator_b;
  std::optional<std::vector<double>> ic;

  std::optional<double> amplitude_in;  ///< roadway bump height, inches
  std::optional<double> speed_mph;

  Family family = Family::first_order;  ///< posing of closed-form problems
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError.
[[nodiscard]] RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Applies one `key = value` setting. Throws ConfigError (line 0) on a bad key or value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& source = "<config>", int line = 0);

using AnyProblem = std::variant<FirstOrderProblem, KinematicProblem, DynamicProblem>;

struct ResolvedRun {
  std::string name;
  AnyProblem problem;
  IntegrationConfig integration;
};

/// Builds the problem and solver settings. Throws ConfigError or DomainError.
[[nodiscard]] ResolvedRun resolve(const RunConfig& cfg);

[[nodiscard]] SolutionSeries integrate(const ResolvedRun& run);

/// Shortest decimal form guaranteed to round-trip a double (17 significant digits).
[[nodiscard]] std::string format_real(double value);

void write_solution_csv(std::ostream& out, const SolutionSeries& series);
void write_error_trace_csv(std::ostream& out, const SolutionSeries& series);
void write_stats_csv(std::ostream& out, const RunStatistics& stats);

/// Name of the marker file written next to partial outputs of an aborted run.
inline constexpr const char* kIncompleteMarker = "INCOMPLETE";

/**
 * @brief Writes solution.csv, error_trace.csv and stats.csv into `dir`,
 * creating it if needed. When `failure` is given an INCOMPLETE file holding
 * the message is written as well; otherwise a stale marker is removed.
 */
void write_outputs(const std::string& dir, const SolutionSeries& series,
                   const std::optional<std::string>& failure = std::nullopt);

/// Output directory: $PECE_OUTPUT_DIR when set and nonempty, else `configured`.
[[nodiscard]] std::string output_directory(const std::string& configured);

/// Step sizes h0, h0/2, ... used by the convergence command.
struct ConvergenceGrid {
  double t_end = 1.0;
  double h0 = 0.1;
  int levels = 4;

  [[nodiscard]] std::vector<double> step_sizes() const;
};

// Commands return the process exit status.

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify_stencils(std::ostream& out);
/// `family` may carry a `startup-` prefix for the single-step local study.
int cmd_convergence(const std::string& family, const std::string& variant,
                    const std::string& problem, const std::string& output_dir, std::ostream& out,
                    std::ostream& err);

}  // namespace pece::cli
