#include "boldg/harness.hpp"

#include "json.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <sstream>
#include <utility>

#include "boldg/errors.hpp"
#include "boldg/projection.hpp"

namespace boldg {

namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Enum <-> string

template <class E>
using NameTable = std::vector<std::pair<E, std::string_view>>;

template <class E>
std::string_view name_of(const NameTable<E>& table, E e) {
  for (const auto& [v, name] : table)
    if (v == e) return name;
  throw std::logic_error("enum value without a name");
}

template <class E>
E parse_enum(const NameTable<E>& table, std::string_view s, std::string_view what) {
  for (const auto& [v, name] : table)
    if (name == s) return v;
  std::string allowed;
  for (const auto& [v, name] : table) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ConfigError("invalid " + std::string(what) + " '" + std::string(s) + "' (expected one of: " + allowed + ")");
}

const NameTable<Experiment> kExperiments{{Experiment::example1_cn, "example1_cn"},
                                         {Experiment::example1_rk, "example1_rk"},
                                         {Experiment::example2_rk, "example2_rk"},
                                         {Experiment::stability_report, "stability_report"},
                                         {Experiment::custom, "custom"}};
const NameTable<Orientation> kOrientations{{Orientation::p_plus_u_minus, "p_plus_u_minus"},
                                           {Orientation::p_minus_u_plus, "p_minus_u_plus"}};
const NameTable<NonlinearFlux> kNonlinear{{NonlinearFlux::lax_friedrichs, "lax_friedrichs"},
                                          {NonlinearFlux::none, "none"}};
const NameTable<DeltaMode> kDeltaModes{{DeltaMode::global_max, "global_max"}, {DeltaMode::local_max, "local_max"}};
const NameTable<Boundary> kBoundaries{{Boundary::zero, "zero"}, {Boundary::periodic, "periodic"}};
const NameTable<Scheme> kSchemes{{Scheme::crank_nicolson, "crank_nicolson"},
                                 {Scheme::rk4_classical, "rk4_classical"},
                                 {Scheme::lserk54, "lserk54"}};
const NameTable<TauRule> kTauRules{{TauRule::proportional_h, "proportional_h"},
                                   {TauRule::proportional_h2, "proportional_h2"},
                                   {TauRule::fixed, "fixed"},
                                   {TauRule::operator_norm, "operator_norm"}};
const NameTable<NearFieldRule> kNearField{{NearFieldRule::semi_analytic, "semi_analytic"},
                                          {NearFieldRule::tensor_gauss, "tensor_gauss"}};
const NameTable<KernelChoice> kKernels{{KernelChoice::follow_boundary, "auto"},
                                       {KernelChoice::line, "line"},
                                       {KernelChoice::periodic, "periodic"}};
const NameTable<InitialData> kInitial{{InitialData::one_soliton, "one_soliton"},
                                      {InitialData::two_soliton, "two_soliton"}};
const NameTable<InitialProjection> kProjection{{InitialProjection::radau, "radau"}, {InitialProjection::l2, "l2"}};
const NameTable<SolitonNormalization> kNormalization{{SolitonNormalization::pde_consistent, "pde_consistent"},
                                                     {SolitonNormalization::as_published, "as_published"}};

// ---------------------------------------------------------------------------
// Scalar parsing

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view s, std::string_view key) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid number '" + std::string(s) + "' for " + std::string(key));
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view s, std::string_view key) {
  s = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid integer '" + std::string(s) + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view s, std::string_view key) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean '" + std::string(s) + "' for " + std::string(key));
}

std::vector<int> parse_int_list(std::string_view s, std::string_view key) {
  std::vector<int> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view item = trim(s.substr(0, comma));
    if (item.empty()) throw ConfigError("empty entry in list for " + std::string(key));
    out.push_back(parse_int<int>(item, key));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config key table: one setter (from text) and one getter (to JSON) per key.

struct Key {
  std::string_view name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<json(const RunConfig&)> get;
};

template <class E>
Key enum_key(std::string_view name, const NameTable<E>& table, E RunConfig::*member) {
  return {name, [=, &table](RunConfig& c, std::string_view v) { c.*member = parse_enum(table, trim(v), name); },
          [=, &table](const RunConfig& c) { return json(std::string(name_of(table, c.*member))); }};
}

template <class E, class S>
Key nested_enum_key(std::string_view name, const NameTable<E>& table, S RunConfig::*outer, E S::*member) {
  return {name,
          [=, &table](RunConfig& c, std::string_view v) { (c.*outer).*member = parse_enum(table, trim(v), name); },
          [=, &table](const RunConfig& c) { return json(std::string(name_of(table, (c.*outer).*member))); }};
}

template <class S>
Key nested_double_key(std::string_view name, S RunConfig::*outer, double S::*member) {
  return {name, [=](RunConfig& c, std::string_view v) { (c.*outer).*member = parse_double(v, name); },
          [=](const RunConfig& c) { return json((c.*outer).*member); }};
}

template <class S, class Int>
Key nested_int_key(std::string_view name, S RunConfig::*outer, Int S::*member) {
  return {name, [=](RunConfig& c, std::string_view v) { (c.*outer).*member = parse_int<Int>(v, name); },
          [=](const RunConfig& c) { return json((c.*outer).*member); }};
}

template <class S>
Key nested_bool_key(std::string_view name, S RunConfig::*outer, bool S::*member) {
  return {name, [=](RunConfig& c, std::string_view v) { (c.*outer).*member = parse_bool(v, name); },
          [=](const RunConfig& c) { return json((c.*outer).*member); }};
}

Key double_key(std::string_view name, double RunConfig::*member) {
  return {name, [=](RunConfig& c, std::string_view v) { c.*member = parse_double(v, name); },
          [=](const RunConfig& c) { return json(c.*member); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(enum_key("experiment", kExperiments, &RunConfig::experiment));
    k.push_back(double_key("a", &RunConfig::a));
    k.push_back(double_key("b", &RunConfig::b));
    k.push_back({"N", [](RunConfig& c, std::string_view v) { c.n_list = parse_int_list(v, "N"); },
                 [](const RunConfig& c) { return json(c.n_list); }});
    k.push_back({"k", [](RunConfig& c, std::string_view v) { c.k = parse_int<int>(v, "k"); },
                 [](const RunConfig& c) { return json(c.k); }});
    k.push_back(nested_enum_key("orientation", kOrientations, &RunConfig::flux, &FluxConfig::orientation));
    k.push_back(nested_enum_key("nonlinear", kNonlinear, &RunConfig::flux, &FluxConfig::nonlinear));
    k.push_back(nested_enum_key("delta_mode", kDeltaModes, &RunConfig::flux, &FluxConfig::delta_mode));
    k.push_back(nested_enum_key("boundary", kBoundaries, &RunConfig::flux, &FluxConfig::boundary));
    k.push_back({"flux_function",
                 [](RunConfig& c, std::string_view v) {
                   const std::string s(trim(v));
                   if (s != "burgers" && s != "linear" && s != "zero") {
                     throw ConfigError("invalid flux_function '" + s + "' (expected burgers, linear or zero)");
                   }
                   c.flux_function = s;
                 },
                 [](const RunConfig& c) { return json(c.flux_function); }});
    k.push_back(double_key("linear_speed", &RunConfig::linear_speed));
    k.push_back(nested_enum_key("scheme", kSchemes, &RunConfig::time, &TimeConfig::scheme));
    k.push_back(nested_enum_key("tau_rule", kTauRules, &RunConfig::time, &TimeConfig::tau_rule));
    k.push_back(nested_double_key("tau_coefficient", &RunConfig::time, &TimeConfig::tau_coefficient));
    k.push_back(nested_double_key("t_final", &RunConfig::time, &TimeConfig::t_final));
    k.push_back(nested_double_key("newton_tol", &RunConfig::time, &TimeConfig::newton_tol));
    k.push_back(nested_int_key("newton_max_iter", &RunConfig::time, &TimeConfig::newton_max_iter));
    k.push_back(nested_double_key("gmres_tol", &RunConfig::time, &TimeConfig::gmres_tol));
    k.push_back(nested_int_key("hilbert_outer", &RunConfig::hilbert, &HilbertConfig::outer_n));
    k.push_back(nested_int_key("hilbert_inner", &RunConfig::hilbert, &HilbertConfig::inner_n));
    k.push_back(nested_bool_key("hilbert_skew", &RunConfig::hilbert, &HilbertConfig::skew));
    k.push_back(nested_enum_key("hilbert_near_field", kNearField, &RunConfig::hilbert, &HilbertConfig::near_field));
    k.push_back(nested_enum_key("hilbert_kernel", kKernels, &RunConfig::hilbert, &HilbertConfig::kernel));
    k.push_back(enum_key("initial", kInitial, &RunConfig::initial));
    k.push_back(enum_key("projection", kProjection, &RunConfig::projection));
    k.push_back(nested_double_key("soliton_c", &RunConfig::soliton, &SolitonConfig::c));
    k.push_back(nested_double_key("soliton_L", &RunConfig::soliton, &SolitonConfig::half_period));
    k.push_back(
        nested_enum_key("soliton_normalization", kNormalization, &RunConfig::soliton, &SolitonConfig::normalization));
    k.push_back(nested_double_key("c1", &RunConfig::soliton, &SolitonConfig::c1));
    k.push_back(nested_double_key("c2", &RunConfig::soliton, &SolitonConfig::c2));
    k.push_back(nested_double_key("d1", &RunConfig::soliton, &SolitonConfig::d1));
    k.push_back(nested_double_key("d2", &RunConfig::soliton, &SolitonConfig::d2));
    k.push_back({"output_dir", [](RunConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); },
                 [](const RunConfig& c) { return json(c.output_dir.generic_string()); }});
    k.push_back({"seed", [](RunConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>(v, "seed"); },
                 [](const RunConfig& c) { return json(c.seed); }});
    k.push_back({"snapshots", [](RunConfig& c, std::string_view v) { c.snapshots = parse_bool(v, "snapshots"); },
                 [](const RunConfig& c) { return json(c.snapshots); }});
    k.push_back({"jobs", [](RunConfig& c, std::string_view v) { c.jobs = parse_int<int>(v, "jobs"); },
                 [](const RunConfig& c) { return json(c.jobs); }});
    k.push_back(nested_double_key("stability_tau_norm", &RunConfig::stability, &StabilityOptions::tau_times_norm));
    k.push_back(nested_int_key("stability_horizon", &RunConfig::stability, &StabilityOptions::horizon));
    k.push_back(nested_int_key("stability_trials", &RunConfig::stability, &StabilityOptions::trials));
    k.push_back(nested_int_key("stability_energy_trials", &RunConfig::stability, &StabilityOptions::energy_trials));
    k.push_back(nested_bool_key("stability_scan_boundary", &RunConfig::stability, &StabilityOptions::scan_boundary));
    return k;
  }();
  return table;
}

}  // namespace

std::string to_string(Experiment e) { return std::string(name_of(kExperiments, e)); }
Experiment parse_experiment(std::string_view s) { return parse_enum(kExperiments, trim(s), "experiment"); }

RunConfig preset(Experiment experiment) {
  RunConfig c;
  c.experiment = experiment;
  switch (experiment) {
    case Experiment::example1_cn:
      c.a = -15.0;
      c.b = 15.0;
      c.n_list = {160, 320, 640};
      c.k = 1;
      c.flux.boundary = Boundary::periodic;
      c.time.scheme = Scheme::crank_nicolson;
      c.time.tau_rule = TauRule::proportional_h;
      c.time.tau_coefficient = 0.5;
      c.time.t_final = 20.0;
      c.initial = InitialData::one_soliton;
      break;
    case Experiment::example1_rk:
      c.a = -15.0;
      c.b = 15.0;
      c.n_list = {40, 80, 160};
      c.k = 3;
      c.flux.boundary = Boundary::periodic;
      c.time.scheme = Scheme::lserk54;
      c.time.tau_rule = TauRule::operator_norm;
      c.time.tau_coefficient = 1.5;
      c.time.t_final = 10.0;
      c.initial = InitialData::one_soliton;
      break;
    case Experiment::example2_rk:
      c.a = -150.0;
      c.b = 150.0;
      c.n_list = {640, 1280};
      c.k = 2;
      c.flux.boundary = Boundary::zero;
      c.time.scheme = Scheme::lserk54;
      c.time.tau_rule = TauRule::operator_norm;
      c.time.tau_coefficient = 1.5;
      c.time.t_final = 20.0;
      c.initial = InitialData::two_soliton;
      break;
    case Experiment::stability_report:
      c.a = -15.0;
      c.b = 15.0;
      c.n_list = {64};
      c.k = 1;
      c.flux.boundary = Boundary::zero;
      c.flux.nonlinear = NonlinearFlux::none;
      c.flux_function = "zero";
      break;
    case Experiment::custom:
      break;
  }
  return c;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.a < cfg.b) || !std::isfinite(cfg.a) || !std::isfinite(cfg.b)) throw ConfigError("domain needs a < b");
  if (cfg.n_list.empty()) throw ConfigError("N list is empty");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1) throw ConfigError("N values must be positive");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) throw ConfigError("N list must be strictly increasing");
  }
  if (cfg.k < 1 || cfg.k > 30) throw ConfigError("k must be in [1, 30]");
  if (!(cfg.time.t_final >= 0.0)) throw ConfigError("t_final must be nonnegative");
  if (!(cfg.time.tau_coefficient > 0.0)) throw ConfigError("tau_coefficient must be positive");
  if (!(cfg.time.newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (cfg.time.newton_max_iter < 1) throw ConfigError("newton_max_iter must be positive");
  if (!(cfg.time.gmres_tol > 0.0)) throw ConfigError("gmres_tol must be positive");
  if (cfg.hilbert.outer_n == cfg.hilbert.inner_n) {
    throw ConfigError("hilbert_outer and hilbert_inner must differ");
  }
  for (int n : {cfg.hilbert.outer_n, cfg.hilbert.inner_n}) {
    if (n < 1 || n > kMaxGaussPoints) throw ConfigError("Hilbert quadrature point counts must be in [1, 64]");
  }
  if (cfg.jobs < 1) throw ConfigError("jobs must be positive");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir is empty");
  // Constructing the exact solution checks its parameters.
  (void)make_exact_solution(cfg);
}

void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const Key& k : keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> names;
  for (const Key& k : keys()) names.push_back(k.name);
  return names;
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  apply_config_text(cfg, read_text_file(path));
}

std::string config_to_json(const RunConfig& cfg) {
  json j = json::object();
  for (const Key& k : keys()) j[std::string(k.name)] = k.get(cfg);
  return j.dump(2);
}

RunConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    std::string text_value;
    if (value.is_string()) {
      text_value = value.get<std::string>();
    } else if (value.is_boolean()) {
      text_value = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      text_value = value.dump();
    } else if (value.is_number_float()) {
      text_value = format_double(value.get<double>());
    } else if (value.is_array()) {
      for (const auto& item : value) text_value += (text_value.empty() ? "" : ",") + item.dump();
    } else {
      throw ConfigError("config JSON: unsupported value for '" + key + "'");
    }
    apply_config_value(cfg, key, text_value);
  }
  return cfg;
}

FluxFunction make_flux_function(const RunConfig& cfg) {
  if (cfg.flux_function == "burgers") return FluxFunction::burgers();
  if (cfg.flux_function == "linear") return FluxFunction::linear(cfg.linear_speed);
  if (cfg.flux_function == "zero") return FluxFunction::zero();
  throw ConfigError("unknown flux function '" + cfg.flux_function + "'");
}

SpaceTimeFunction make_exact_solution(const RunConfig& cfg) {
  if (cfg.initial == InitialData::one_soliton) {
    const OneSoliton u(cfg.soliton.c, cfg.soliton.half_period, cfg.soliton.normalization);
    return [u](double x, double t) { return u(x, t); };
  }
  const TwoSoliton u(cfg.soliton.c1, cfg.soliton.c2, cfg.soliton.d1, cfg.soliton.d2);
  return [u](double x, double t) { return u(x, t); };
}

HilbertOptions hilbert_options(const RunConfig& cfg) {
  HilbertOptions o;
  o.outer_points = cfg.hilbert.outer_n;
  o.inner_points = cfg.hilbert.inner_n;
  o.skew = cfg.hilbert.skew;
  o.near_field = cfg.hilbert.near_field;
  switch (cfg.hilbert.kernel) {
    case KernelChoice::follow_boundary:
      o.kernel = cfg.flux.boundary == Boundary::periodic ? HilbertKernel::periodic : HilbertKernel::line;
      break;
    case KernelChoice::line:
      o.kernel = HilbertKernel::line;
      break;
    case KernelChoice::periodic:
      o.kernel = HilbertKernel::periodic;
      break;
  }
  return o;
}

// ---------------------------------------------------------------------------
// Studies

SimulationRun run_single(const RunConfig& cfg, int n, int diagnostic_interval) {
  SimulationRun run;
  run.row.n = n;
  const SpacePtr space = make_space(build_mesh(cfg.a, cfg.b, n), cfg.k);
  const SpaceTimeFunction exact = make_exact_solution(cfg);
  const FluxFunction f = make_flux_function(cfg);
  const auto initial = [&](double x) { return exact(x, 0.0); };
  const Field u0 =
      cfg.projection == InitialProjection::radau ? radau_project(initial, space) : l2_project(initial, space);
  try {
    auto hilbert = std::make_shared<const HilbertOperator>(assemble_hilbert(space, hilbert_options(cfg)));
    const OperatorSet ops = assemble_operators(space, cfg.flux, hilbert);
    SimulationHooks hooks;
    hooks.diagnostic_interval = diagnostic_interval;
    const SimulationResult sim = run_simulation(u0.coeffs(), ops, f, cfg.time, hooks);
    const Field u(space, sim.u);
    run.row.steps = sim.steps;
    run.row.tau = sim.tau;
    run.row.error = l2_error(u, exact, cfg.time.t_final);
    const ConservedQuantities q = conserved_quantities(u, u0);
    run.row.c1 = q.c1;
    run.row.c2 = q.c2;
    run.row.ok = std::isfinite(run.row.error);
    if (!run.row.ok) run.row.failure = "non-finite error";
    run.diagnostics = sim.diagnostics;
    run.final_state = u;
  } catch (const NumericalError& e) {
    run.row.ok = false;
    run.row.failure = e.what();
  }
  return run;
}

StudyResult run_convergence_study(const RunConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  StudyResult result;
  const std::size_t count = cfg.n_list.size();
  std::vector<SimulationRun> runs(count);
  if (cfg.jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) runs[i] = run_single(cfg, cfg.n_list[i]);
  } else {
    // Bounded fan-out; results are stored by index so output order is N order.
    for (std::size_t first = 0; first < count; first += static_cast<std::size_t>(cfg.jobs)) {
      std::vector<std::future<SimulationRun>> batch;
      const std::size_t last = std::min(count, first + static_cast<std::size_t>(cfg.jobs));
      for (std::size_t i = first; i < last; ++i)
        batch.push_back(std::async(std::launch::async, [&cfg, n = cfg.n_list[i]] { return run_single(cfg, n); }));
      for (std::size_t i = first; i < last; ++i) runs[i] = batch[i - first].get();
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    StudyRow row = runs[i].row;
    if (i > 0 && row.ok && result.rows[i - 1].ok) {
      row.rate = convergence_rate({result.rows[i - 1].error, row.error}, {result.rows[i - 1].n, row.n})[0];
    }
    result.rows.push_back(row);
    result.finals.push_back(std::move(runs[i].final_state));
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> parse_optional(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_double(s, "CSV field");
}

constexpr std::string_view kCsvHeader = "N,error,rate,C1,C2";

}  // namespace

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const CsvRow& r : rows) {
    out += std::to_string(r.n) + ',' + optional_field(r.error) + ',' + optional_field(r.rate) + ',' +
           optional_field(r.c1) + ',' + optional_field(r.c2) + '\n';
  }
  return out;
}

std::string format_csv(const std::vector<StudyRow>& rows) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<CsvRow> csv;
  for (const StudyRow& r : rows) {
    CsvRow c;
    c.n = r.n;
    c.error = r.ok ? r.error : nan;
    c.rate = r.rate;
    c.c1 = r.ok ? r.c1.value_or(nan) : nan;
    c.c2 = r.ok ? r.c2.value_or(nan) : nan;
    csv.push_back(c);
  }
  return format_csv(csv);
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  bool header = true;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != kCsvHeader) throw ConfigError("CSV: unexpected header '" + std::string(line) + "'");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::array<std::string_view, 5> fields;
    std::size_t count = 0;
    while (true) {
      const auto comma = line.find(',');
      if (count >= fields.size()) throw ConfigError("CSV line " + std::to_string(line_no) + ": too many fields");
      fields[count++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (count != fields.size()) throw ConfigError("CSV line " + std::to_string(line_no) + ": expected 5 fields");
    CsvRow r;
    r.n = parse_int<int>(fields[0], "N");
    r.error = parse_optional(fields[1]);
    r.rate = parse_optional(fields[2]);
    r.c1 = parse_optional(fields[3]);
    r.c2 = parse_optional(fields[4]);
    rows.push_back(r);
  }
  if (header) throw ConfigError("CSV: missing header");
  return rows;
}

std::string format_snapshot(const Field& u) {
  const DGSpace& space = u.space();
  const Mesh& mesh = space.mesh();
  const int per_cell = 4 * space.modes();
  std::string out = "x,u\n";
  for (int i = 0; i < space.cells(); ++i) {
    for (int j = 0; j < per_cell; ++j) {
      const double xi = -1.0 + (2.0 * j + 1.0) / per_cell;
      out += format_double(mesh.to_physical(i, xi)) + ',' + format_double(u.value_in_cell(i, xi)) + '\n';
    }
  }
  return out;
}

namespace {

json optional_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

std::string format_run_json(const RunConfig& cfg, const std::vector<StudyRow>& rows) {
  json j;
  j["version"] = std::string(kVersion);
  j["experiment"] = to_string(cfg.experiment);
  j["seed"] = cfg.seed;
  j["hilbert_kernel"] = hilbert_options(cfg).kernel == HilbertKernel::periodic ? "periodic" : "line";
  j["config"] = json::parse(config_to_json(cfg));
  json table = json::array();
  for (const StudyRow& r : rows) {
    json row;
    row["N"] = r.n;
    row["ok"] = r.ok;
    row["error"] = r.ok ? json(r.error) : json(nullptr);
    row["rate"] = optional_json(r.rate);
    row["C1"] = optional_json(r.c1);
    row["C2"] = optional_json(r.c2);
    row["steps"] = r.steps;
    row["tau"] = r.tau;
    if (!r.ok) row["failure"] = r.failure;
    table.push_back(row);
  }
  j["rows"] = table;
  return j.dump(2) + '\n';
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

namespace {

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

void emit_outputs(const StudyResult& result, const RunConfig& cfg) {
  if (result.rows.empty()) throw std::invalid_argument("emit_outputs: no rows");
  ensure_directory(cfg.output_dir);
  write_text_file(cfg.output_dir / "convergence.csv", format_csv(result.rows));
  write_text_file(cfg.output_dir / "run.json", format_run_json(cfg, result.rows));
  json timing;
  timing["wall_seconds"] = result.wall_seconds;
  write_text_file(cfg.output_dir / "timing.json", timing.dump(2) + '\n');
  if (cfg.snapshots) {
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      if (i < result.finals.size() && result.finals[i]) {
        write_text_file(cfg.output_dir / ("snapshot_N" + std::to_string(result.rows[i].n) + ".csv"),
                        format_snapshot(*result.finals[i]));
      }
    }
  }
}

std::string format_stability_json(const RunConfig& cfg, const StabilityReport& r) {
  json j;
  j["version"] = std::string(kVersion);
  j["config"] = json::parse(config_to_json(cfg));
  j["seed"] = r.seed;
  j["operator_norm"] = r.operator_norm;
  j["max_symmetric_eigenvalue"] = r.max_symmetric_eigenvalue;
  j["tau"] = r.tau;
  j["worst_one_step_ratio"] = r.scan.worst_one_step;
  j["worst_two_step_ratio"] = r.scan.worst_two_step;
  j["worst_three_step_ratio"] = r.scan.worst_three_step;
  j["energy_equality_max_residual"] = r.energy_residual_max;
  j["empirical_boundary_two_step"] = r.boundary_two_step;
  j["empirical_boundary_three_step"] = r.boundary_three_step;
  return j.dump(2) + '\n';
}

}  // namespace boldg
