// Command-line driver: simulate, converge, stability, exact-eval.
//
// Settings are applied in this order, later sources winning: experiment preset,
// command-line flags, --config file, BOLDG_OUTPUT_DIR.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "boldg/errors.hpp"
#include "boldg/harness.hpp"
#include "boldg/stability.hpp"

namespace {

using namespace boldg;

std::string flag_name(std::string_view key) {
  std::string name(key);
  for (char& ch : name)
    if (ch == '_') ch = '-';
  return "--" + name;
}

std::string diagnostics_csv(const std::vector<DiagnosticSample>& samples) {
  std::string out = "step,time,norm,C1,C2\n";
  for (const DiagnosticSample& s : samples) {
    out += std::to_string(s.step) + ',' + format_double(s.time) + ',' + format_double(s.norm) + ',' +
           format_double(s.c1) + ',' + format_double(s.c2) + '\n';
  }
  return out;
}

void ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create directory " + cfg.output_dir.string() + ": " + ec.message());
}

void print_rows(const std::vector<StudyRow>& rows) {
  for (const StudyRow& r : rows) {
    std::cout << "N=" << r.n;
    if (r.ok) {
      std::cout << " error=" << format_double(r.error);
      if (r.rate) std::cout << " rate=" << format_double(*r.rate);
      if (r.c1) std::cout << " C1=" << format_double(*r.c1);
      if (r.c2) std::cout << " C2=" << format_double(*r.c2);
      std::cout << " steps=" << r.steps;
    } else {
      std::cout << " FAILED: " << r.failure;
    }
    std::cout << '\n';
  }
}

int cmd_converge(const RunConfig& cfg) {
  const StudyResult result = run_convergence_study(cfg);
  emit_outputs(result, cfg);
  print_rows(result.rows);
  for (const StudyRow& r : result.rows)
    if (!r.ok) return 3;
  return 0;
}

int cmd_simulate(RunConfig cfg, int diagnostic_interval) {
  validate(cfg);
  cfg.n_list.resize(1);
  SimulationRun run = run_single(cfg, cfg.n_list.front(), diagnostic_interval);
  StudyResult result;
  result.rows.push_back(run.row);
  result.finals.push_back(std::move(run.final_state));
  emit_outputs(result, cfg);
  write_text_file(cfg.output_dir / "diagnostics.csv", diagnostics_csv(run.diagnostics));
  print_rows(result.rows);
  return run.row.ok ? 0 : 3;
}

int cmd_stability(const RunConfig& cfg) {
  validate(cfg);
  const SpacePtr space = make_space(build_mesh(cfg.a, cfg.b, cfg.n_list.front()), cfg.k);
  auto hilbert = std::make_shared<const HilbertOperator>(assemble_hilbert(space, hilbert_options(cfg)));
  FluxConfig flux = cfg.flux;
  flux.nonlinear = NonlinearFlux::none;
  const OperatorSet ops = assemble_operators(space, flux, hilbert);
  StabilityOptions options = cfg.stability;
  options.seed = cfg.seed;
  const StabilityReport report = stability_report(ops, options);
  ensure_output_dir(cfg);
  const std::string text = format_stability_json(cfg, report);
  write_text_file(cfg.output_dir / "stability.json", text);
  std::cout << text;
  return 0;
}

int cmd_exact_eval(const RunConfig& cfg, double t) {
  validate(cfg);
  const Mesh mesh = build_mesh(cfg.a, cfg.b, cfg.n_list.front());
  const SpaceTimeFunction exact = make_exact_solution(cfg);
  const int per_cell = 4 * (cfg.k + 1);
  std::string out = "x,u\n";
  for (int i = 0; i < mesh.cells(); ++i) {
    for (int j = 0; j < per_cell; ++j) {
      const double x = mesh.to_physical(i, -1.0 + (2.0 * j + 1.0) / per_cell);
      out += format_double(x) + ',' + format_double(exact(x, t)) + '\n';
    }
  }
  ensure_output_dir(cfg);
  write_text_file(cfg.output_dir / "exact.csv", out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LDG solver for the generalized Benjamin-Ono equation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string experiment = "custom";
  std::string config_file;
  std::map<std::string, std::string> values;
  app.add_option("--experiment", experiment, "Preset: example1_cn, example1_rk, example2_rk, stability_report, custom");
  app.add_option("--config", config_file, "Key-value config file (overrides flags)");
  for (std::string_view key : config_keys()) {
    if (key == "experiment") continue;
    app.add_option(flag_name(key), values[std::string(key)], std::string(key));
  }

  auto* simulate = app.add_subcommand("simulate", "Run the first N and write diagnostics");
  int diagnostic_interval = 1;
  simulate->add_option("--diagnostic-interval", diagnostic_interval, "Steps between diagnostic samples (0: none)");
  auto* converge = app.add_subcommand("converge", "Convergence study over the N list");
  auto* stability = app.add_subcommand("stability", "Stability report for the f = 0 operator");
  auto* exact_eval = app.add_subcommand("exact-eval", "Sample the exact solution to exact.csv");
  double eval_time = 0.0;
  exact_eval->add_option("--time", eval_time, "Evaluation time");
  for (auto* sub : {simulate, converge, stability, exact_eval}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = preset(parse_experiment(experiment));
    for (std::string_view key : config_keys()) {
      const auto it = values.find(std::string(key));
      if (it != values.end() && app.count(flag_name(key)) > 0) apply_config_value(cfg, key, it->second);
    }
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    if (const char* dir = std::getenv("BOLDG_OUTPUT_DIR"); dir != nullptr && *dir != '\0') cfg.output_dir = dir;

    if (*simulate) return cmd_simulate(cfg, diagnostic_interval);
    if (*converge) return cmd_converge(cfg);
    if (*stability) return cmd_stability(cfg);
    return cmd_exact_eval(cfg, eval_time);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
