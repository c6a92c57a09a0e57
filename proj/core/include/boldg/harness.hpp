#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boldg/hilbert.hpp"
#include "boldg/operators.hpp"
#include "boldg/solutions.hpp"
#include "boldg/stability.hpp"
#include "boldg/time_integration.hpp"

namespace boldg {

enum class Experiment { example1_cn, example1_rk, example2_rk, stability_report, custom };
enum class InitialData { one_soliton, two_soliton };
enum class InitialProjection { radau, l2 };

struct SolitonConfig {
  double c = 0.25;
  double half_period = 15.0;
  SolitonNormalization normalization = SolitonNormalization::pde_consistent;
  double c1 = 0.3;
  double c2 = 0.6;
  double d1 = -30.0;
  double d2 = -55.0;
};

/// Kernel choice; `follow_boundary` uses the periodic kernel under periodic
/// closure and the line kernel otherwise.
enum class KernelChoice { follow_boundary, line, periodic };

/// Quadrature and kernel for the Hilbert operator.
struct HilbertConfig {
  int outer_n = 7;
  int inner_n = 8;
  bool skew = true;
  NearFieldRule near_field = NearFieldRule::semi_analytic;
  KernelChoice kernel = KernelChoice::follow_boundary;
};

struct RunConfig {
  Experiment experiment = Experiment::custom;
  double a = -15.0;
  double b = 15.0;
  std::vector<int> n_list{40};
  int k = 1;
  FluxConfig flux;  // includes the boundary closure
  std::string flux_function = "burgers";  // burgers, linear, zero
  double linear_speed = 1.0;              // for flux_function = linear
  TimeConfig time;
  HilbertConfig hilbert;
  InitialData initial = InitialData::one_soliton;
  InitialProjection projection = InitialProjection::radau;
  SolitonConfig soliton;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  bool snapshots = false;
  int jobs = 1;  // concurrent per-N runs
  StabilityOptions stability;
};

/// Preset configurations for the standard experiments.
RunConfig preset(Experiment experiment);

/// Throws ConfigError describing the first problem found.
void validate(const RunConfig& cfg);

/// Applies `key = value` lines ('#' starts a comment). Unknown keys and malformed
/// values throw ConfigError with the line number.
void apply_config_text(RunConfig& cfg, std::string_view text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
/// Applies one key/value pair; the keys are those accepted by apply_config_text.
void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
/// All accepted config keys, in echo order.
std::vector<std::string_view> config_keys();

/// JSON object with one member per config key; config_from_json inverts it.
std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(std::string_view json);

std::string to_string(Experiment e);
Experiment parse_experiment(std::string_view s);

FluxFunction make_flux_function(const RunConfig& cfg);
SpaceTimeFunction make_exact_solution(const RunConfig& cfg);
HilbertOptions hilbert_options(const RunConfig& cfg);

struct StudyRow {
  int n = 0;
  bool ok = false;
  double error = 0.0;
  std::optional<double> rate;
  std::optional<double> c1;
  std::optional<double> c2;
  int steps = 0;
  double tau = 0.0;
  std::string failure;  // set when !ok
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<std::optional<Field>> finals;  // final state per row, empty for failed rows
  double wall_seconds = 0.0;
};

/// For each N: build the space and operators, project the initial data, run to
/// t_final and measure the error and conserved quantities. Numerical failures
/// become failed rows; the study continues.
StudyResult run_convergence_study(const RunConfig& cfg);

/// Result of a single-N run with its diagnostic time series.
struct SimulationRun {
  StudyRow row;
  std::optional<Field> final_state;
  std::vector<DiagnosticSample> diagnostics;
};
SimulationRun run_single(const RunConfig& cfg, int n, int diagnostic_interval = 0);

// ---------------------------------------------------------------------------
// Output

/// Shortest decimal string that reads back to the same double ("nan", "inf", "-inf"
/// for non-finite values).
std::string format_double(double v);

/// Convergence table: header `N,error,rate,C1,C2`; the rate of the first row and
/// of rows next to a failure is empty; failed rows and undefined ratios write nan.
std::string format_csv(const std::vector<StudyRow>& rows);

struct CsvRow {
  int n = 0;
  std::optional<double> error;
  std::optional<double> rate;
  std::optional<double> c1;
  std::optional<double> c2;
};
std::vector<CsvRow> parse_csv(std::string_view text);
std::string format_csv(const std::vector<CsvRow>& rows);

/// Samples 4(k+1) equispaced points per cell (midpoints of equal sub-intervals).
std::string format_snapshot(const Field& u);

/// Run metadata: config echo, version, seed and the table. Deliberately free of
/// wall-clock data so reruns are byte-identical.
std::string format_run_json(const RunConfig& cfg, const std::vector<StudyRow>& rows);

/// Writes convergence.csv, run.json, timing.json and (if enabled) snapshot_N<n>.csv
/// into cfg.output_dir. Throws IoError with the path on failure.
void emit_outputs(const StudyResult& result, const RunConfig& cfg);

std::string format_stability_json(const RunConfig& cfg, const StabilityReport& report);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace boldg
