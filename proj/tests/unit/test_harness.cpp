#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <limits>
#include <random>

#include <unistd.h>

#include "boldg/errors.hpp"
#include "boldg/harness.hpp"

using namespace boldg;
namespace fs = std::filesystem;

namespace {

RunConfig small_study() {
  RunConfig cfg = preset(Experiment::example1_rk);
  cfg.n_list = {8, 16};
  cfg.k = 1;
  cfg.time.t_final = 0.5;
  cfg.soliton.half_period = 15.0;
  return cfg;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("boldg_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("presets") {
  const RunConfig cn = preset(Experiment::example1_cn);
  CHECK(cn.a == -15.0);
  CHECK(cn.b == 15.0);
  CHECK(cn.n_list == std::vector<int>{160, 320, 640});
  CHECK(cn.k == 1);
  CHECK(cn.time.scheme == Scheme::crank_nicolson);
  CHECK(cn.time.t_final == 20.0);
  CHECK(cn.flux.boundary == Boundary::periodic);

  const RunConfig rk = preset(Experiment::example1_rk);
  CHECK(rk.n_list == std::vector<int>{40, 80, 160});
  CHECK(rk.time.t_final == 10.0);

  const RunConfig two = preset(Experiment::example2_rk);
  CHECK(two.a == -150.0);
  CHECK(two.n_list == std::vector<int>{640, 1280});
  CHECK(two.k == 2);
  CHECK(two.initial == InitialData::two_soliton);
  CHECK(two.flux.boundary == Boundary::zero);

  for (Experiment e : {Experiment::example1_cn, Experiment::example1_rk, Experiment::example2_rk,
                       Experiment::stability_report, Experiment::custom}) {
    CHECK_NOTHROW(validate(preset(e)));
    CHECK(parse_experiment(to_string(e)) == e);
  }
  CHECK_THROWS_AS(parse_experiment("example3"), ConfigError);
}

TEST_CASE("validation") {
  const auto rejects = [](auto mutate) {
    RunConfig cfg = preset(Experiment::example1_rk);
    mutate(cfg);
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  };
  rejects([](RunConfig& c) { c.b = c.a; });
  rejects([](RunConfig& c) { c.n_list.clear(); });
  rejects([](RunConfig& c) { c.n_list = {80, 40}; });
  rejects([](RunConfig& c) { c.n_list = {0}; });
  rejects([](RunConfig& c) { c.k = 0; });
  rejects([](RunConfig& c) { c.time.t_final = -1.0; });
  rejects([](RunConfig& c) { c.time.tau_coefficient = 0.0; });
  rejects([](RunConfig& c) { c.hilbert.inner_n = c.hilbert.outer_n; });
  rejects([](RunConfig& c) { c.hilbert.outer_n = 65; });
  rejects([](RunConfig& c) { c.jobs = 0; });
  rejects([](RunConfig& c) { c.output_dir.clear(); });
  rejects([](RunConfig& c) { c.soliton.c = 0.1; });  // delta >= 1
  rejects([](RunConfig& c) {
    c.initial = InitialData::two_soliton;
    c.soliton.c2 = c.soliton.c1;
  });
}

TEST_CASE("config text") {
  RunConfig cfg = preset(Experiment::custom);
  apply_config_text(cfg, "# comment\n"
                         "N = 10, 20,40\n"
                         "k = 2   # trailing\n"
                         "\n"
                         "scheme = rk4_classical\n"
                         "t_final = 0.25\n"
                         "boundary = periodic\n"
                         "snapshots = true\n");
  CHECK(cfg.n_list == std::vector<int>{10, 20, 40});
  CHECK(cfg.k == 2);
  CHECK(cfg.time.scheme == Scheme::rk4_classical);
  CHECK(cfg.time.t_final == 0.25);
  CHECK(cfg.flux.boundary == Boundary::periodic);
  CHECK(cfg.snapshots);

  const auto line_error = [](std::string_view text, std::string_view expected) {
    RunConfig c;
    try {
      apply_config_text(c, text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(expected) != std::string::npos);
    }
  };
  line_error("k = 1\nbogus = 3\n", "line 2");
  line_error("k = one\n", "line 1");
  line_error("k\n", "line 1");
  line_error("scheme = euler\n", "scheme");
  line_error("N = 10,,20\n", "line 1");

  CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent/boldg.cfg"), IoError);
  for (std::string_view key : config_keys()) CHECK_FALSE(key.empty());
}

TEST_CASE("config JSON round trip") {
  RunConfig cfg = small_study();
  cfg.seed = 77;
  cfg.hilbert.kernel = KernelChoice::line;
  cfg.soliton.normalization = SolitonNormalization::as_published;
  const std::string text = config_to_json(cfg);
  const RunConfig back = config_from_json(text);
  CHECK(config_to_json(back) == text);
  CHECK(back.seed == 77);
  CHECK(back.n_list == cfg.n_list);
  CHECK_THROWS_AS(config_from_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{\"k\": "), ConfigError);
  CHECK_THROWS_AS(config_from_json("{\"nope\": 1}"), ConfigError);
}

TEST_CASE("double formatting round-trips") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> exponent(-300.0, 300.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::pow(10.0, exponent(rng)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("CSV") {
  StudyRow only;
  only.n = 40;
  only.ok = true;
  only.error = 1.5e-3;
  only.c1 = 1.0;
  only.c2 = 0.999;
  CHECK(format_csv(std::vector<StudyRow>{only}) == "N,error,rate,C1,C2\n40,0.0015,,1,0.999\n");

  StudyRow failed;
  failed.n = 80;
  failed.failure = "step 3";
  const std::string text = format_csv(std::vector<StudyRow>{only, failed});
  CHECK(text == "N,error,rate,C1,C2\n40,0.0015,,1,0.999\n80,nan,,nan,nan\n");

  const std::vector<CsvRow> parsed = parse_csv(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].n == 40);
  CHECK_FALSE(parsed[0].rate);
  CHECK(std::isnan(*parsed[1].error));
  CHECK(format_csv(parsed) == text);

  CHECK_THROWS_AS(parse_csv("N,err\n"), ConfigError);
  CHECK_THROWS_AS(parse_csv(""), ConfigError);
  CHECK_THROWS_AS(parse_csv("N,error,rate,C1,C2\n1,2,3\n"), ConfigError);
  CHECK_THROWS_AS(parse_csv("N,error,rate,C1,C2\n1,2,3,4,5,6\n"), ConfigError);
  CHECK_THROWS_AS(parse_csv("N,error,rate,C1,C2\n1,x,,,\n"), ConfigError);
}

TEST_CASE("snapshot of the zero field") {
  const SpacePtr space = make_space(build_mesh(0.0, 1.0, 2), 1);
  const std::string text = format_snapshot(Field(space));
  CHECK(text.rfind("x,u\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 8);
  CHECK(text.find("0.03125,0\n") != std::string::npos);
}

TEST_CASE("convergence study is reproducible") {
  RunConfig cfg = small_study();
  const StudyResult first = run_convergence_study(cfg);
  REQUIRE(first.rows.size() == 2);
  CHECK(first.rows[0].ok);
  CHECK(first.rows[1].ok);
  CHECK_FALSE(first.rows[0].rate);
  REQUIRE(first.rows[1].rate);
  CHECK(*first.rows[1].rate > 0.5);
  CHECK(first.rows[1].error < first.rows[0].error);

  const RunConfig echoed = config_from_json(config_to_json(cfg));
  const StudyResult again = run_convergence_study(echoed);
  CHECK(format_csv(again.rows) == format_csv(first.rows));
  CHECK(format_run_json(echoed, again.rows) == format_run_json(cfg, first.rows));

  cfg.jobs = 2;
  const StudyResult parallel = run_convergence_study(cfg);
  CHECK(format_csv(parallel.rows) == format_csv(first.rows));
}

TEST_CASE("failed runs become failed rows") {
  RunConfig cfg = small_study();
  cfg.time.scheme = Scheme::rk4_classical;
  cfg.time.tau_coefficient = 40.0;
  cfg.time.t_final = 1e4;
  const StudyResult result = run_convergence_study(cfg);
  for (const StudyRow& r : result.rows) {
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.failure.empty());
    CHECK_FALSE(r.rate);
  }
  CHECK(format_run_json(cfg, result.rows).find("\"failure\"") != std::string::npos);
}

TEST_CASE("outputs on disk") {
  RunConfig cfg = small_study();
  cfg.snapshots = true;
  cfg.output_dir = scratch_dir("emit");
  const StudyResult result = run_convergence_study(cfg);
  emit_outputs(result, cfg);
  for (const char* name : {"convergence.csv", "run.json", "timing.json", "snapshot_N8.csv", "snapshot_N16.csv"})
    CHECK(fs::exists(cfg.output_dir / name));
  CHECK(read_text_file(cfg.output_dir / "convergence.csv") == format_csv(result.rows));
  fs::remove_all(cfg.output_dir);

  cfg.output_dir = "/proc/boldg_cannot_write_here";
  CHECK_THROWS_AS(emit_outputs(result, cfg), IoError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/file.csv"), IoError);
}
