#include "pichange/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace pichange {

std::string to_string(Contrast contrast) {
  switch (contrast) {
    case Contrast::Low: return "low";
    case Contrast::Moderate: return "moderate";
    case Contrast::High: return "high";
  }
  throw std::logic_error("unreachable");
}

Contrast contrast_from_string(const std::string& name) {
  if (name == "low") return Contrast::Low;
  if (name == "moderate") return Contrast::Moderate;
  if (name == "high") return Contrast::High;
  throw std::invalid_argument("unknown contrast '" + name + "'");
}

std::string to_string(PriorMode mode) {
  switch (mode) {
    case PriorMode::Accurate: return "accurate";
    case PriorMode::Inaccurate: return "inaccurate";
    case PriorMode::Exact: return "exact";
  }
  throw std::logic_error("unreachable");
}

PriorMode prior_mode_from_string(const std::string& name) {
  if (name == "accurate") return PriorMode::Accurate;
  if (name == "inaccurate") return PriorMode::Inaccurate;
  if (name == "exact") return PriorMode::Exact;
  throw std::invalid_argument("unknown prior mode '" + name + "'");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng Rng::for_series(std::uint64_t master_seed, std::uint64_t series_index) {
  return Rng(splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * (series_index + 1)));
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return engine_();  // full range
  const std::uint64_t threshold = (0 - span) % span;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return lo + r % span;
  }
}

double Rng::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::domain_error("gamma draws require positive shape and scale");
  }
  if (shape < 1.0) {
    const double u = 1.0 - uniform01();  // (0, 1]
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

std::vector<double> sample_zag(const ZagParams& params, std::size_t n, Rng& rng) {
  if (params.zero_prob < 0.0 || params.zero_prob >= 1.0) {
    throw std::domain_error("zero probability must lie in [0, 1)");
  }
  std::vector<double> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform01() < params.zero_prob) {
      values.push_back(0.0);
    } else {
      values.push_back(rng.gamma(params.shape, params.scale));
    }
  }
  return values;
}

namespace {

struct ScaleGrid {
  std::uint64_t day_lo, day_hi, night_lo, night_hi;
};

ScaleGrid grid_for(Contrast contrast) {
  switch (contrast) {
    case Contrast::Low: return {110, 170, 85, 125};
    case Contrast::Moderate: return {190, 280, 55, 80};
    case Contrast::High: return {320, 450, 35, 50};
  }
  throw std::logic_error("unreachable");
}

}  // namespace

SimulatedSeries generate_series(const ScenarioSpec& spec, Rng& rng) {
  if (spec.n_cycles < 1) throw std::invalid_argument("need at least one cycle");
  const ScaleGrid grid = grid_for(spec.contrast);
  const double xi = 0.50 + 0.01 * static_cast<double>(rng.uniform_int(0, 80));

  std::vector<double> values;
  std::vector<LabeledCp> true_cps;
  std::vector<SegmentRecord> params_log;
  static const char* kTypes[] = {"S1", "S2", "S3"};

  for (std::size_t cycle = 0; cycle < spec.n_cycles; ++cycle) {
    for (int part = 0; part < 3; ++part) {
      const std::size_t len = 240 + 10 * rng.uniform_int(0, 24);
      const bool nocturnal = part == 2;
      const double p = (nocturnal ? 0.55 : 0.05) +
                       0.01 * static_cast<double>(rng.uniform_int(0, 40));
      const double theta = static_cast<double>(
          nocturnal ? rng.uniform_int(grid.night_lo, grid.night_hi)
                    : rng.uniform_int(grid.day_lo, grid.day_hi));
      const ZagParams params{xi, theta, p};
      const std::size_t start = values.size() + 1;
      auto segment = sample_zag(params, len, rng);
      values.insert(values.end(), segment.begin(), segment.end());
      params_log.push_back({start, values.size(), kTypes[part], params});

      const std::size_t boundary = values.size();
      if (part == 0) {
        true_cps.push_back({boundary, CpLabel::WithinDay});
      } else if (part == 1) {
        true_cps.push_back({boundary, CpLabel::SleepOnset});
      } else if (cycle + 1 < spec.n_cycles) {
        // The final wake onset coincides with the series end; not a CP.
        true_cps.push_back({boundary, CpLabel::WakeOnset});
      }
    }
  }

  SimulatedSeries sim{
      TimeSeries(std::move(values), "minutes"), std::move(true_cps), {},
      std::move(params_log), xi, spec};
  sim.prior_centers =
      place_prior_centers(sim.true_cps, spec.prior_mode, sim.series.size(), rng);
  return sim;
}

std::vector<std::size_t> place_prior_centers(const std::vector<LabeledCp>& true_cps,
                                             PriorMode mode, std::size_t n, Rng& rng) {
  if (true_cps.empty()) throw std::invalid_argument("no true change points given");
  std::vector<std::size_t> centers;
  for (const auto& cp : true_cps) {
    if (cp.label == CpLabel::WithinDay) continue;
    std::int64_t offset = 0;
    switch (mode) {
      case PriorMode::Accurate:
        offset = static_cast<std::int64_t>(rng.uniform_int(0, 18)) - 9;
        break;
      case PriorMode::Inaccurate: {
        const std::int64_t magnitude = static_cast<std::int64_t>(rng.uniform_int(60, 120));
        offset = rng.uniform_int(0, 1) == 0 ? -magnitude : magnitude;
        break;
      }
      case PriorMode::Exact:
        break;
    }
    const std::int64_t raw = static_cast<std::int64_t>(cp.index) + offset;
    centers.push_back(static_cast<std::size_t>(
        std::clamp<std::int64_t>(raw, 1, static_cast<std::int64_t>(n))));
  }
  return centers;
}

namespace {

nlohmann::json spec_to_json(const ScenarioSpec& spec) {
  nlohmann::json j;
  j["contrast"] = to_string(spec.contrast);
  j["n_cycles"] = spec.n_cycles;
  j["seed"] = spec.seed;
  j["prior_mode"] = to_string(spec.prior_mode);
  j["resolution_minutes"] = spec.resolution_minutes;
  return j;
}

ScenarioSpec spec_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  spec.contrast = contrast_from_string(j.at("contrast").get<std::string>());
  spec.n_cycles = j.at("n_cycles").get<std::size_t>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.prior_mode = prior_mode_from_string(j.at("prior_mode").get<std::string>());
  spec.resolution_minutes = j.at("resolution_minutes").get<std::size_t>();
  return spec;
}

}  // namespace

std::string truth_to_json(const SimulatedSeries& sim) {
  nlohmann::json j;
  j["n"] = sim.series.size();
  j["shape"] = sim.shape;
  auto cps = nlohmann::json::array();
  for (const auto& cp : sim.true_cps) {
    cps.push_back({{"index", cp.index}, {"label", to_string(cp.label)}});
  }
  j["true_cps"] = cps;
  j["prior_centers"] = sim.prior_centers;
  auto segments = nlohmann::json::array();
  for (const auto& seg : sim.params_log) {
    segments.push_back({{"start", seg.start},
                        {"end", seg.end},
                        {"type", seg.segment_type},
                        {"shape", seg.params.shape},
                        {"scale", seg.params.scale},
                        {"zero_prob", seg.params.zero_prob}});
  }
  j["params_log"] = segments;
  j["scenario"] = spec_to_json(sim.spec);
  return j.dump(2);
}

TruthSidecar truth_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  TruthSidecar truth;
  truth.n = j.at("n").get<std::size_t>();
  truth.shape = j.at("shape").get<double>();
  for (const auto& cp : j.at("true_cps")) {
    truth.true_cps.push_back({cp.at("index").get<std::size_t>(),
                              cp_label_from_string(cp.at("label").get<std::string>())});
  }
  truth.prior_centers = j.at("prior_centers").get<std::vector<std::size_t>>();
  for (const auto& seg : j.at("params_log")) {
    truth.params_log.push_back({seg.at("start").get<std::size_t>(),
                                seg.at("end").get<std::size_t>(),
                                seg.at("type").get<std::string>(),
                                {seg.at("shape").get<double>(), seg.at("scale").get<double>(),
                                 seg.at("zero_prob").get<double>()}});
  }
  truth.spec = spec_from_json(j.at("scenario"));
  return truth;
}

void write_series_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "index,value\n";
  char buf[32];
  for (std::size_t t = 1; t <= series.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", series.value(t));
    out << t << ',' << buf << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace pichange
