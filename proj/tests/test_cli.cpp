#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "pichange/evaluate.hpp"

namespace fs = std::filesystem;
using namespace pichange;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Byte-compares every file except the manifest (which records wall-clock time).
bool same_data_files(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> names_a, names_b;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() != "manifest.json") names_a.push_back(e.path().filename());
  }
  for (const auto& e : fs::directory_iterator(b)) {
    if (e.path().filename() != "manifest.json") names_b.push_back(e.path().filename());
  }
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b) return false;
  for (const auto& name : names_a) {
    if (slurp(a / name) != slurp(b / name)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("simulate is deterministic and writes the documented layout") {
  TempDir run1("pichange_cli_sim1"), run2("pichange_cli_sim2");
  cli::SimulateOptions options;
  options.count = 2;
  options.seed = 7;
  options.contrast = "high";
  options.jobs = 1;

  options.out_dir = run1.path;
  cli::run_simulate(options);
  options.out_dir = run2.path;
  options.jobs = 2;  // worker count must not change the bytes
  cli::run_simulate(options);

  CHECK(same_data_files(run1.path, run2.path));
  CHECK(fs::exists(run1.path / "series_0001.csv"));
  CHECK(fs::exists(run1.path / "series_0001.truth.json"));
  CHECK(fs::exists(run1.path / "series_0002.csv"));
  CHECK(fs::exists(run1.path / "manifest.json"));

  const auto manifest = nlohmann::json::parse(slurp(run1.path / "manifest.json"));
  CHECK(manifest.at("subcommand") == "simulate");
  CHECK(manifest.at("seed") == 7);
  CHECK(manifest.at("config").at("contrast") == "high");
  CHECK(manifest.contains("duration_seconds"));

  const auto truth = nlohmann::json::parse(slurp(run1.path / "series_0001.truth.json"));
  for (const auto& seg : truth.at("params_log")) {
    const double theta = seg.at("scale").get<double>();
    if (seg.at("type") == "S3") {
      CHECK(theta >= 35.0);
      CHECK(theta <= 50.0);
    } else {
      CHECK(theta >= 320.0);
      CHECK(theta <= 450.0);
    }
  }
}

TEST_CASE("a single cycle leaves two labeled change points") {
  TempDir dir("pichange_cli_cycle1");
  cli::SimulateOptions options;
  options.out_dir = dir.path;
  options.count = 1;
  options.seed = 3;
  options.cycles = 1;
  options.jobs = 1;
  cli::run_simulate(options);
  const auto truth = nlohmann::json::parse(slurp(dir.path / "series_0001.truth.json"));
  REQUIRE(truth.at("true_cps").size() == 2);
  CHECK(truth.at("true_cps")[0].at("label") == "within_day");
  CHECK(truth.at("true_cps")[1].at("label") == "sleep_onset");
}

TEST_CASE("detect pipeline flags") {
  TempDir sim_dir("pichange_cli_simdet");
  cli::SimulateOptions sim;
  sim.out_dir = sim_dir.path;
  sim.count = 1;
  sim.seed = 7;
  sim.contrast = "high";
  sim.prior_mode = "accurate";
  sim.jobs = 1;
  cli::run_simulate(sim);

  cli::DetectOptions base;
  base.input = sim_dir.path;
  base.cost = "zag";
  base.centers = "sidecar";
  base.jobs = 1;

  SUBCASE("--pelt matches an explicit lambda of zero") {
    TempDir out_a("pichange_cli_pelt"), out_b("pichange_cli_lambda0");
    auto pelt = base;
    pelt.out_dir = out_a.path;
    pelt.pelt = true;
    cli::run_detect(pelt);
    auto lambda0 = base;
    lambda0.out_dir = out_b.path;
    lambda0.lambda = "0";
    cli::run_detect(lambda0);
    CHECK(same_data_files(out_a.path, out_b.path));
  }

  SUBCASE("--no-prune changes nothing but the runtime") {
    TempDir out_a("pichange_cli_prune"), out_b("pichange_cli_noprune");
    auto pruned = base;
    pruned.out_dir = out_a.path;
    cli::run_detect(pruned);
    auto unpruned = base;
    unpruned.out_dir = out_b.path;
    unpruned.no_prune = true;
    cli::run_detect(unpruned);
    const auto a = nlohmann::json::parse(slurp(out_a.path / "series_0001.detection.json"));
    const auto b = nlohmann::json::parse(slurp(out_b.path / "series_0001.detection.json"));
    CHECK(a.at("change_points") == b.at("change_points"));
    CHECK(a.at("objective") == b.at("objective"));
  }

  SUBCASE("accurate priors at high contrast recover nearly all targets") {
    TempDir out("pichange_cli_highacc"), eval_out("pichange_cli_higheval");
    auto det = base;
    det.out_dir = out.path;
    cli::run_detect(det);

    cli::EvaluateOptions ev;
    ev.detections_dir = out.path;
    ev.truth_dir = sim_dir.path;
    ev.out_dir = eval_out.path;
    ev.method = "pi-change";
    ev.contrast = "high";
    cli::run_evaluate(ev);

    const EvalReport report =
        eval_report_from_json(slurp(eval_out.path / "series_0001.eval.json"));
    CHECK(report.target_count == 13);
    CHECK(report.detected_targets >= 12);

    const std::string table1 = slurp(eval_out.path / "table1.csv");
    CHECK(table1.rfind("Method,Contrast,False Negative,Clustered FP,Irrelevant FP,Stray FP\n",
                       0) == 0);
    CHECK(table1.find("pi-change,high,") != std::string::npos);
    const std::string table2 = slurp(eval_out.path / "table2.csv");
    CHECK(table2.rfind("Method,Contrast,MAE,Min,25%,50%,75%,90%,95%,Max\n", 0) == 0);
  }
}

TEST_CASE("evaluate rejects unpaired inputs") {
  TempDir sim_dir("pichange_cli_pair_sim"), det_dir("pichange_cli_pair_det"),
      out("pichange_cli_pair_out");
  cli::SimulateOptions sim;
  sim.out_dir = sim_dir.path;
  sim.count = 2;
  sim.seed = 5;
  sim.jobs = 1;
  cli::run_simulate(sim);

  // detection for only the first series
  std::ofstream(det_dir.path / "series_0001.detection.json")
      << R"({"change_points": [], "objective": 0.0})";

  cli::EvaluateOptions ev;
  ev.detections_dir = det_dir.path;
  ev.truth_dir = sim_dir.path;
  ev.out_dir = out.path;
  try {
    cli::run_evaluate(ev);
    FAIL("expected a pairing error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("series_0002") != std::string::npos);
  }
}

TEST_CASE("report emits histograms and the penalty trace") {
  TempDir sim_dir("pichange_cli_rep_sim"), det_dir("pichange_cli_rep_det"),
      eval_dir("pichange_cli_rep_eval"), rep_dir("pichange_cli_rep_out");
  cli::SimulateOptions sim;
  sim.out_dir = sim_dir.path;
  sim.count = 2;
  sim.seed = 11;
  sim.contrast = "moderate";
  sim.jobs = 1;
  cli::run_simulate(sim);

  cli::DetectOptions det;
  det.input = sim_dir.path;
  det.out_dir = det_dir.path;
  det.centers = "sidecar";
  det.jobs = 1;
  cli::run_detect(det);

  cli::EvaluateOptions ev;
  ev.detections_dir = det_dir.path;
  ev.truth_dir = sim_dir.path;
  ev.out_dir = eval_dir.path;
  cli::run_evaluate(ev);

  cli::ReportOptions rep;
  rep.eval_dir = eval_dir.path;
  rep.detect_dir = det_dir.path;
  rep.out_dir = rep_dir.path;
  cli::run_report(rep);

  // histogram counts add up to the number of series / pooled errors
  std::size_t fn_total = 0;
  {
    std::ifstream in(rep_dir.path / "fn_hist.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "false_negatives,series_count");
    while (std::getline(in, line)) {
      fn_total += std::stoull(line.substr(line.find(',') + 1));
    }
  }
  CHECK(fn_total == 2);

  std::size_t pooled = 0;
  for (int i = 1; i <= 2; ++i) {
    const auto report = eval_report_from_json(
        slurp(eval_dir.path / ("series_000" + std::to_string(i) + ".eval.json")));
    pooled += report.closest_errors.size();
  }
  std::size_t err_total = 0;
  {
    std::ifstream in(rep_dir.path / "error_hist.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "error,count");
    while (std::getline(in, line)) {
      err_total += std::stoull(line.substr(line.find(',') + 1));
    }
  }
  CHECK(err_total == pooled);

  // the trace has beta at kernel centers
  const auto detection =
      nlohmann::json::parse(slurp(det_dir.path / "series_0001.detection.json"));
  const double beta = detection.at("config_echo").at("beta").get<double>();
  const auto centers =
      detection.at("config_echo").at("centers").get<std::vector<std::size_t>>();
  std::map<std::size_t, double> trace;
  {
    std::ifstream in(rep_dir.path / "penalty_trace.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,support_complement,penalty");
    while (std::getline(in, line)) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      trace[std::stoull(line.substr(0, c1))] = std::stod(line.substr(c2 + 1));
    }
  }
  for (std::size_t c : centers) CHECK(trace.at(c) == beta);
}

TEST_CASE("run_cli reports usage and runtime failures as JSON exit codes") {
  {
    std::vector<const char*> argv{"pichange", "totally-bogus"};
    CHECK(cli::run_cli(2, const_cast<char**>(argv.data())) != 0);
  }
  {
    std::vector<const char*> argv{"pichange", "detect", "--input",
                                  "/nonexistent/nothing.csv", "--out", "/tmp/pichange_x"};
    CHECK(cli::run_cli(6, const_cast<char**>(argv.data())) != 0);
  }
}
