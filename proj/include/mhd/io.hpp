#pragma once

/// @file io.hpp
/// @brief Run configuration, diagnostics CSV, legacy VTK snapshots and saved states.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mhd/cases.hpp"
#include "mhd/diagnostics.hpp"

namespace mhd {

/// Invalid configuration text or flag combination.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string case_name = "mms";
  Scheme scheme = Scheme::decoupled;
  std::optional<int> degree;
  std::optional<int> kx, ky;
  std::optional<double> dt, t_end;
  std::optional<bool> steady;
  std::optional<double> steady_tolerance;
  std::optional<double> Rf, Rm, c, s;
  int quad_points = 0;
  std::optional<double> picard_tolerance, linear_tolerance;
  std::string out_dir = "out";
  int snapshot_every = 0;

  /// Throws ConfigError when t_end and steady are both set or c and s both given.
  void validate() const;
  /// Case overrides with c resolved from s = c Rm when s is given.
  CaseOverrides overrides() const;
  StepperOptions stepper() const;
  AssemblyOptions assembly() const;
};

/// Sets one key; throws ConfigError naming the key for unknown keys or bad values.
void apply_config_key(RunConfig& config, std::string_view key, std::string_view value);

/// Parses whitespace-separated key=value tokens, '#' starting a comment, on
/// top of @p base. Errors carry the key and 1-based line number.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig read_config(const std::filesystem::path& path, RunConfig base = {});

/// Column names of the diagnostics CSV, in order.
const std::vector<std::string>& diagnostics_columns();
std::string format_diagnostics(const std::vector<DiagnosticsRecord>& records);
/// Rows back into records; budget_defined is false where the residual is nan.
std::vector<DiagnosticsRecord> parse_diagnostics(std::string_view text);
void write_diagnostics(const std::vector<DiagnosticsRecord>& records,
                       const std::filesystem::path& path);
std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path);

/// Legacy ASCII VTK structured grid on the global GLL lattice with point data
/// u, omega, P, H, j and div_H. Points shared by elements take the value of
/// the element with the largest index.
std::string format_fields(const Discretization& disc, const State& state);
void write_fields(const Discretization& disc, const State& state,
                  const std::filesystem::path& path);

/// State together with what is needed to rebuild its discretization.
struct SavedState {
  std::string case_name;
  Scheme scheme = Scheme::decoupled;
  int degree = 1;
  int kx = 1, ky = 1;
  double dt = 0.0;
  int k = 0;
  double t = 0.0;
  std::array<int, 4> tags{};  ///< u, omega, P, H time tags in half steps
  Eigen::VectorXd u, omega, P, H;

  /// Fields attached to @p disc; throws std::invalid_argument on size mismatch.
  State restore(const DiscretizationPtr& disc) const;
};
SavedState make_saved_state(const std::string& case_name, Scheme scheme, const CaseSpec& spec,
                            const State& state);
void save_state(const SavedState& saved, const std::filesystem::path& path);
SavedState load_state(const std::filesystem::path& path);

}  // namespace mhd
