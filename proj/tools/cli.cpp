#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pichange/detector.hpp"
#include "pichange/evaluate.hpp"
#include "pichange/ingest.hpp"
#include "pichange/penalty.hpp"
#include "pichange/simulate.hpp"

namespace fs = std::filesystem;

namespace pichange::cli {

unsigned default_jobs() {
  if (const char* env = std::getenv("PICHANGE_JOBS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) return static_cast<unsigned>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = default_jobs();
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_workers = static_cast<unsigned>(
      std::min<std::size_t>(jobs, count));
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const nlohmann::json& config, const nlohmann::json& inputs,
                    std::size_t output_files, std::uint64_t seed, double duration_s) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  j["seed"] = seed;
  j["config"] = config;
  j["inputs"] = inputs;
  j["output_dir"] = out_dir.string();
  j["output_files"] = output_files;
  j["duration_seconds"] = duration_s;
  write_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

std::string series_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "series_%04zu", index + 1);
  return buf;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) tokens.push_back(token);
  }
  return tokens;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void run_simulate(const SimulateOptions& options) {
  const auto start = Clock::now();
  const Contrast contrast = contrast_from_string(options.contrast);
  const PriorMode mode = prior_mode_from_string(options.prior_mode);
  fs::create_directories(options.out_dir);

  parallel_for(options.count, options.jobs, [&](std::size_t i) {
    ScenarioSpec spec;
    spec.contrast = contrast;
    spec.n_cycles = options.cycles;
    spec.seed = options.seed;
    spec.prior_mode = mode;
    Rng rng = Rng::for_series(options.seed, i);
    const SimulatedSeries sim = generate_series(spec, rng);
    const std::string name = series_name(i);
    write_series_csv(sim.series, options.out_dir / (name + ".csv"));
    write_file(options.out_dir / (name + ".truth.json"), truth_to_json(sim) + "\n");
  });

  nlohmann::json config;
  config["contrast"] = options.contrast;
  config["count"] = options.count;
  config["prior_mode"] = options.prior_mode;
  config["cycles"] = options.cycles;
  write_manifest(options.out_dir, "simulate", config, nlohmann::json::array(),
                 2 * options.count, options.seed, seconds_since(start));
}

namespace {

struct DetectJob {
  fs::path csv;
  fs::path sidecar;  // empty when absent
};

PenaltyRecipe recipe_from_options(const DetectOptions& options) {
  if (!options.penalty_recipe_path.empty()) {
    return parse_penalty_recipe(read_file(options.penalty_recipe_path));
  }
  PenaltyRecipe recipe;
  if (options.beta != "mbic") recipe.beta = std::stod(options.beta);
  if (options.pelt) {
    recipe.lambda = 0.0;
  } else if (options.lambda != "auto") {
    recipe.lambda = std::stod(options.lambda);
  }
  recipe.sigma = options.sigma;
  if (!options.centers.empty() && options.centers != "sidecar") {
    recipe.centers = split_tokens(options.centers);
  }
  return recipe;
}

void detect_one(const DetectJob& job, const DetectOptions& options,
                const fs::path& out_dir) {
  ColumnSpec columns;
  if (job.sidecar.empty()) {
    columns.time_column = options.time_column;
    columns.value_column = options.value_column;
    columns.date_format = options.date_format;
    columns.transform = transform_from_string(options.transform);
  } else {
    columns.value_column = "value";  // simulate output layout
  }
  const LoadResult loaded = load_csv(job.csv, columns);
  const TimeSeries& series = loaded.series;

  std::optional<TruthSidecar> truth;
  if (!job.sidecar.empty()) truth = truth_from_json(read_file(job.sidecar));

  PenaltyRecipe recipe = recipe_from_options(options);
  if (options.centers == "sidecar") {
    if (!truth) {
      throw std::invalid_argument("--centers sidecar requires a simulate output "
                                  "directory with truth sidecars");
    }
    for (std::size_t c : truth->prior_centers) recipe.centers.push_back(std::to_string(c));
  }

  DetectorConfig config;
  config.cost_model = cost_model_from_string(options.cost);
  config.penalty = resolve_recipe(recipe, series, 2);
  config.min_segment_length = options.min_seg;
  config.pruning_enabled = !options.no_prune;
  if (config.cost_model == CostModel::ZagNLL) {
    if (options.shape) {
      config.zag_shape = options.shape;
    } else if (truth) {
      config.zag_shape = truth->shape;
    } else {
      config.zag_shape = estimate_shape(series);
    }
  }

  const Segmentation result = detect(series, config);

  nlohmann::json j = nlohmann::json::parse(detection_to_json(result, series, config));
  j["n"] = series.size();
  j["input"] = job.csv.string();
  if (loaded.dropped_rows > 0) j["dropped_rows"] = loaded.dropped_rows;
  write_file(out_dir / (job.csv.stem().string() + ".detection.json"), j.dump(2) + "\n");
}

}  // namespace

void run_detect(const DetectOptions& options) {
  const auto start = Clock::now();
  std::vector<DetectJob> jobs;
  if (fs::is_directory(options.input)) {
    for (const auto& entry : fs::directory_iterator(options.input)) {
      if (entry.path().extension() != ".csv") continue;
      fs::path sidecar = entry.path();
      sidecar.replace_extension(".truth.json");
      jobs.push_back({entry.path(), fs::exists(sidecar) ? sidecar : fs::path{}});
    }
    std::sort(jobs.begin(), jobs.end(),
              [](const DetectJob& a, const DetectJob& b) { return a.csv < b.csv; });
    if (jobs.empty()) {
      throw std::invalid_argument("no .csv series found in " + options.input.string());
    }
  } else {
    jobs.push_back({options.input, {}});
  }
  fs::create_directories(options.out_dir);

  parallel_for(jobs.size(), options.jobs,
               [&](std::size_t i) { detect_one(jobs[i], options, options.out_dir); });

  nlohmann::json config;
  config["cost"] = options.cost;
  if (options.shape) config["shape"] = *options.shape;
  config["beta"] = options.beta;
  config["lambda"] = options.lambda;
  config["sigma"] = options.sigma;
  config["centers"] = options.centers;
  config["min_seg"] = options.min_seg;
  config["no_prune"] = options.no_prune;
  config["pelt"] = options.pelt;
  if (!options.penalty_recipe_path.empty()) {
    config["penalty_recipe"] = options.penalty_recipe_path;
  }
  config["time_column"] = options.time_column;
  config["value_column"] = options.value_column;
  config["date_format"] = options.date_format;
  config["transform"] = options.transform;
  write_manifest(options.out_dir, "detect", config,
                 nlohmann::json::array({options.input.string()}), jobs.size(), 0,
                 seconds_since(start));
}

void run_evaluate(const EvaluateOptions& options) {
  const auto start = Clock::now();
  std::map<std::string, fs::path> detections, truths;
  for (const auto& entry : fs::directory_iterator(options.detections_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 15 && name.ends_with(".detection.json")) {
      detections[name.substr(0, name.size() - 15)] = entry.path();
    }
  }
  for (const auto& entry : fs::directory_iterator(options.truth_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 11 && name.ends_with(".truth.json")) {
      truths[name.substr(0, name.size() - 11)] = entry.path();
    }
  }
  std::vector<std::string> missing;
  for (const auto& [stem, path] : detections) {
    if (!truths.count(stem)) missing.push_back(stem + " (no truth)");
  }
  for (const auto& [stem, path] : truths) {
    if (!detections.count(stem)) missing.push_back(stem + " (no detection)");
  }
  if (!missing.empty()) {
    std::string joined;
    for (const auto& m : missing) joined += (joined.empty() ? "" : ", ") + m;
    throw std::invalid_argument("detections and truth do not pair up: " + joined);
  }
  if (detections.empty()) throw std::invalid_argument("nothing to evaluate");

  fs::create_directories(options.out_dir);
  const MatchConfig match{options.window};
  std::vector<EvalReport> reports;
  for (const auto& [stem, path] : detections) {
    const nlohmann::json detection = nlohmann::json::parse(read_file(path));
    const auto estimates = detection.at("change_points").get<std::vector<std::size_t>>();
    const TruthSidecar truth = truth_from_json(read_file(truths.at(stem)));
    const EvalReport report = classify(estimates, truth.true_cps, match);
    write_file(options.out_dir / (stem + ".eval.json"), to_json(report) + "\n");
    reports.push_back(report);
  }

  const AggregateStats stats = error_stats(reports);
  write_count_table_csv(options.out_dir / "table1.csv", {options.method},
                        {options.contrast}, {stats});
  write_error_table_csv(options.out_dir / "table2.csv", {options.method},
                        {options.contrast}, {stats});

  nlohmann::json config;
  config["window"] = options.window;
  config["method"] = options.method;
  config["contrast"] = options.contrast;
  write_manifest(options.out_dir, "evaluate", config,
                 nlohmann::json::array(
                     {options.detections_dir.string(), options.truth_dir.string()}),
                 reports.size() + 2, 0, seconds_since(start));
}

void run_report(const ReportOptions& options) {
  const auto start = Clock::now();
  std::vector<fs::path> eval_files;
  for (const auto& entry : fs::directory_iterator(options.eval_dir)) {
    if (entry.path().filename().string().ends_with(".eval.json")) {
      eval_files.push_back(entry.path());
    }
  }
  std::sort(eval_files.begin(), eval_files.end());
  if (eval_files.empty()) {
    throw std::invalid_argument("no .eval.json reports in " + options.eval_dir.string());
  }
  std::vector<EvalReport> reports;
  reports.reserve(eval_files.size());
  for (const auto& path : eval_files) {
    reports.push_back(eval_report_from_json(read_file(path)));
  }
  fs::create_directories(options.out_dir);
  std::size_t outputs = 0;

  {
    std::map<std::size_t, std::size_t> hist;
    for (const auto& r : reports) ++hist[r.false_negatives];
    std::ofstream out(options.out_dir / "fn_hist.csv");
    out << "false_negatives,series_count\n";
    for (const auto& [value, count] : hist) out << value << ',' << count << '\n';
    ++outputs;
  }
  {
    std::ofstream out(options.out_dir / "fp_hist.csv");
    out << "type,count,series_count\n";
    const std::pair<const char*, std::size_t EvalReport::*> kinds[] = {
        {"clustered", &EvalReport::clustered_fp},
        {"irrelevant", &EvalReport::irrelevant_fp},
        {"stray", &EvalReport::stray_fp}};
    for (const auto& [label, member] : kinds) {
      std::map<std::size_t, std::size_t> hist;
      for (const auto& r : reports) ++hist[r.*member];
      for (const auto& [value, count] : hist) {
        out << label << ',' << value << ',' << count << '\n';
      }
    }
    ++outputs;
  }
  {
    std::map<long long, std::size_t> hist;
    for (const auto& r : reports) {
      for (double e : r.closest_errors) ++hist[std::llround(e)];
    }
    std::ofstream out(options.out_dir / "error_hist.csv");
    out << "error,count\n";
    for (const auto& [value, count] : hist) out << value << ',' << count << '\n';
    ++outputs;
  }

  if (!options.detect_dir.empty()) {
    std::vector<fs::path> detections;
    for (const auto& entry : fs::directory_iterator(options.detect_dir)) {
      if (entry.path().filename().string().ends_with(".detection.json")) {
        detections.push_back(entry.path());
      }
    }
    std::sort(detections.begin(), detections.end());
    if (!detections.empty()) {
      const nlohmann::json j = nlohmann::json::parse(read_file(detections.front()));
      const auto& echo = j.at("config_echo");
      const std::size_t n = j.at("n").get<std::size_t>();
      std::vector<KernelSpec> kernels;
      const auto centers = echo.at("centers").get<std::vector<std::size_t>>();
      const auto spreads = echo.at("spreads").get<std::vector<double>>();
      for (std::size_t i = 0; i < centers.size(); ++i) {
        kernels.push_back({centers[i], spreads[i]});
      }
      const PenaltyProfile profile = build_profile(
          n, kernels, echo.at("lambda").get<double>(), echo.at("beta").get<double>());
      std::ofstream out(options.out_dir / "penalty_trace.csv");
      out << "index,support_complement,penalty\n";
      char buf[64];
      for (std::size_t t = 1; t <= n; ++t) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g",
                      support_complement(profile.kernels(), t), profile.at(t));
        out << t << ',' << buf << '\n';
      }
      ++outputs;
    }
  }

  nlohmann::json config;
  config["eval_dir"] = options.eval_dir.string();
  config["detect_dir"] = options.detect_dir.string();
  write_manifest(options.out_dir, "report", config,
                 nlohmann::json::array({options.eval_dir.string()}), outputs, 0,
                 seconds_since(start));
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Prior-informed multiple change-point detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateOptions sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate labeled actigraphy-style series");
  cmd_sim->add_option("--out", sim.out_dir, "Output directory")->required();
  cmd_sim->add_option("--contrast", sim.contrast, "low|moderate|high");
  cmd_sim->add_option("--count", sim.count, "Number of series");
  cmd_sim->add_option("--seed", sim.seed, "Master seed");
  cmd_sim->add_option("--prior-mode", sim.prior_mode, "accurate|inaccurate");
  cmd_sim->add_option("--cycles", sim.cycles, "Sleep-wake cycles per series");
  cmd_sim->add_option("--jobs", sim.jobs, "Worker threads (default $PICHANGE_JOBS)");

  DetectOptions det;
  auto* cmd_det = app.add_subcommand("detect", "Segment a series or a directory of series");
  cmd_det->add_option("--input", det.input, "CSV file or simulate output directory")
      ->required();
  cmd_det->add_option("--out", det.out_dir, "Output directory")->required();
  cmd_det->add_option("--cost", det.cost, "gaussian|zag");
  cmd_det->add_option("--shape", det.shape, "Gamma shape (ZAG); default sidecar/estimated");
  cmd_det->add_option("--beta", det.beta, "Baseline penalty: mbic or a number");
  cmd_det->add_option("--lambda", det.lambda, "Prior strength: auto or a number");
  cmd_det->add_option("--sigma", det.sigma, "Prior spread in index units");
  cmd_det->add_option("--centers", det.centers,
                      "sidecar, or comma-separated indices/dates");
  cmd_det->add_option("--min-seg", det.min_seg, "Minimum segment length");
  cmd_det->add_flag("--no-prune", det.no_prune, "Disable pruning (oracle mode)");
  cmd_det->add_flag("--pelt", det.pelt, "Constant-penalty run (forces lambda = 0)");
  cmd_det->add_option("--penalty-recipe", det.penalty_recipe_path,
                      "Penalty recipe JSON file");
  cmd_det->add_option("--time-col", det.time_column, "Time column name or position");
  cmd_det->add_option("--value-col", det.value_column, "Value column name or position");
  cmd_det->add_option("--date-format", det.date_format, "Custom date format");
  cmd_det->add_option("--transform", det.transform, "identity|absdiff|logscale");
  cmd_det->add_option("--jobs", det.jobs, "Worker threads");

  EvaluateOptions ev;
  auto* cmd_ev = app.add_subcommand("evaluate", "Score detections against labeled truth");
  cmd_ev->add_option("--detections", ev.detections_dir, "Detection JSON directory")
      ->required();
  cmd_ev->add_option("--truth", ev.truth_dir, "Truth sidecar directory")->required();
  cmd_ev->add_option("--out", ev.out_dir, "Output directory")->required();
  cmd_ev->add_option("--window", ev.window, "Matching window in index units");
  cmd_ev->add_option("--method", ev.method, "Method label for the tables");
  cmd_ev->add_option("--contrast", ev.contrast, "Contrast label for the tables");

  ReportOptions rep;
  auto* cmd_rep = app.add_subcommand("report", "Emit plot-ready histogram/trace CSVs");
  cmd_rep->add_option("--eval", rep.eval_dir, "Evaluate output directory")->required();
  cmd_rep->add_option("--detect", rep.detect_dir,
                      "Detect output directory (enables the penalty trace)");
  cmd_rep->add_option("--out", rep.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    nlohmann::json err;
    err["error"] = e.what();
    err["kind"] = "usage";
    std::cerr << err.dump() << std::endl;
    return 2;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    if (cmd_sim->parsed()) run_simulate(sim);
    if (cmd_det->parsed()) run_detect(det);
    if (cmd_ev->parsed()) run_evaluate(ev);
    if (cmd_rep->parsed()) run_report(rep);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    err["subcommand"] = subcommand;
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}

}  // namespace pichange::cli
