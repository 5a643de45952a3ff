#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elan/cwt.hpp"
#include "elan/morse.hpp"
#include "elan/noise.hpp"
#include "elan/parallel.hpp"
#include "elan/pipeline.hpp"
#include "elan/serialize.hpp"
#include "elan/synth.hpp"

namespace elan::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kSeedLimit = 1ull << 53;

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

serialize::FileConfig load_config(const std::string& path) {
  if (path.empty()) return serialize::FileConfig{};
  return serialize::config_from_json(serialize::load_json(path));
}

// Loads matching cached tables, or simulates and (when a cache directory is
// set) stores them.  An existing entry whose embedded key disagrees with the
// requested configuration is never reused.
std::vector<noise::RateTable> obtain_tables(const pipeline::AnalysisConfig& c,
                                            const morse::WaveletSpec& w,
                                            const cwt::FrequencyGrid& grid,
                                            const std::string& cache_dir) {
  noise::NoiseModel table_model{c.alpha, 1.0};
  serialize::RateTableKey key =
      serialize::make_key(table_model, w, grid, c.n_realizations, c.seed);

  std::filesystem::path entry;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    entry = std::filesystem::path(cache_dir) / serialize::cache_file_name(key);
    if (std::filesystem::exists(entry)) {
      auto [stored, tables] =
          serialize::ratetables_from_json(serialize::load_json(entry.string()));
      if (!(stored == key))
        throw std::runtime_error(
            "cache entry " + entry.string() +
            " does not match the requested configuration; refusing to reuse it");
      std::cerr << "rate tables: cache hit (" << entry.string() << ")\n";
      return tables;
    }
  }

  std::cerr << "rate tables: simulating " << grid.size() << " bands, "
            << c.n_realizations << " draws each\n";
  auto tables =
      noise::simulate_maxima(table_model, w, grid, c.n_realizations, c.seed,
                             {c.bins, c.bin_max}, c.threads);
  if (!entry.empty())
    serialize::save_json(entry.string(),
                         serialize::ratetables_to_json(key, tables));
  return tables;
}

struct DetectArgs {
  std::string input;
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool emit_plane = false;
  std::string cache_dir;
  int threads = 0;
  std::string out_events = "events.json";
  std::string out_residual = "residual.csv";
  std::string out_plane = "plane.csv";
};

int cmd_detect(const DetectArgs& args) {
  serialize::FileConfig cfg = load_config(args.config_path);
  pipeline::AnalysisConfig c = cfg.analysis;
  if (args.seed_given) c.seed = args.seed;
  c.threads = elan::resolve_threads(args.threads);
  c.keep_plane = args.emit_plane;

  std::vector<serialize::Segment> segments =
      serialize::read_series_csv(args.input);
  bool multi = !segments[0].name.empty();
  morse::WaveletSpec wavelet(c.beta, c.gamma);

  std::ofstream plane_out;
  if (args.emit_plane) {
    plane_out.open(args.out_plane);
    if (!plane_out)
      throw std::runtime_error("cannot write " + args.out_plane);
    plane_out << (multi ? "segment,t,scale_index,omega,re,im\n"
                        : "t,scale_index,omega,re,im\n");
  }

  std::map<std::string, std::vector<noise::RateTable>> table_cache;
  std::vector<serialize::Segment> residual_segments;
  Json groups = Json::array();
  Json flat_doc;

  for (const serialize::Segment& seg : segments) {
    cwt::FrequencyGrid grid = cwt::build_grid(wavelet, seg.values.size(), c.grid);
    noise::NoiseModel table_model{c.alpha, 1.0};
    std::string mem_key = serialize::cache_file_name(
        serialize::make_key(table_model, wavelet, grid, c.n_realizations, c.seed));
    auto cached = table_cache.find(mem_key);
    if (cached == table_cache.end())
      cached = table_cache
                   .emplace(mem_key,
                            obtain_tables(c, wavelet, grid, args.cache_dir))
                   .first;

    pipeline::AnalysisResult result =
        pipeline::run(seg.values, seg.missing, c, &cached->second);

    std::string label = multi ? "segment '" + seg.name + "'" : "series";
    std::cerr << label << ": " << result.count_maxima << " maxima, "
              << result.count_significant << " significant, "
              << result.count_isolated << " isolated; expected false events "
              << result.expected_false_per_scale << " per scale band, "
              << result.expected_false_total << " across the plane\n";

    Json echo = serialize::config_to_json(c);
    echo["length"] = seg.values.size();
    Json doc = serialize::events_to_json(result, echo, c);
    if (multi) {
      Json group;
      group["segment"] = seg.name;
      group["length"] = seg.values.size();
      group["thresholds"] = std::move(doc["thresholds"]);
      group["events"] = std::move(doc["events"]);
      group["counts"] = std::move(doc["counts"]);
      groups.push_back(std::move(group));
    } else {
      flat_doc = std::move(doc);
    }

    serialize::Segment res = seg;
    res.values = result.residual;
    residual_segments.push_back(std::move(res));

    if (args.emit_plane && result.has_plane) {
      const cwt::TransformPlane& plane = result.plane;
      for (std::size_t j = 0; j < plane.grid.size(); ++j) {
        for (std::size_t t = 0; t < plane.length; ++t) {
          std::complex<double> v = plane.at(t, j);
          if (multi) plane_out << seg.name << ',';
          plane_out << seg.t_start + static_cast<std::int64_t>(t) << ',' << j
                    << ',' << fmt(plane.grid.omega[j]) << ',' << fmt(v.real())
                    << ',' << fmt(v.imag()) << '\n';
        }
      }
    }
  }

  if (multi) {
    Json doc;
    doc["schema"] = "element-events/1";
    doc["config"] = serialize::config_to_json(c);
    doc["segments"] = std::move(groups);
    serialize::save_json(args.out_events, doc);
  } else {
    serialize::save_json(args.out_events, flat_doc);
  }
  serialize::write_series_csv(args.out_residual, residual_segments);
  if (args.emit_plane && !plane_out)
    throw std::runtime_error("failed writing " + args.out_plane);
  return 0;
}

struct SimulateArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string cache_dir;
  int threads = 0;
  std::string out = "ratetable.json";
};

int cmd_simulate(const SimulateArgs& args) {
  serialize::FileConfig cfg = load_config(args.config_path);
  if (cfg.length == 0)
    throw std::runtime_error(
        "config: 'length' is required to size the frequency grid");
  pipeline::AnalysisConfig c = cfg.analysis;
  if (args.seed_given) c.seed = args.seed;
  c.threads = elan::resolve_threads(args.threads);

  morse::WaveletSpec wavelet(c.beta, c.gamma);
  cwt::FrequencyGrid grid = cwt::build_grid(wavelet, cfg.length, c.grid);
  std::vector<noise::RateTable> tables =
      obtain_tables(c, wavelet, grid, args.cache_dir);
  noise::NoiseModel table_model{c.alpha, 1.0};
  serialize::RateTableKey key = serialize::make_key(
      table_model, wavelet, grid, c.n_realizations, c.seed);
  serialize::save_json(args.out, serialize::ratetables_to_json(key, tables));
  return 0;
}

struct SynthArgs {
  std::string kind;
  std::uint64_t seed = 1;
  std::size_t length = 0;
  bool length_given = false;
  std::string out = "data.csv";
  std::string out_truth = "truth.json";
};

int cmd_synth(const SynthArgs& args) {
  std::vector<double> x;
  synth::EventTrain truth;

  if (args.kind == "white") {
    std::size_t length = args.length_given ? args.length : 12000;
    if (length == 0) throw std::runtime_error("length must be positive");
    x = synth::white_noise(length, 1.0, args.seed);
    truth.length = length;
  } else if (args.kind == "events" || args.kind == "events+red") {
    if (args.length_given)
      throw std::runtime_error(
          "the event benchmark has a fixed length; --length applies to kind "
          "'white' only");
    synth::Synthetic s = synth::benchmark_signal();
    std::vector<double> noise_series =
        args.kind == "events"
            ? synth::white_noise(s.truth.length, 1.0, args.seed)
            : synth::red_noise(s.truth.length, args.seed);
    x = s.clean;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += noise_series[i];
    truth = std::move(s.truth);
  } else {
    throw std::runtime_error("unknown kind '" + args.kind +
                             "' (expected events, white, or events+red)");
  }

  serialize::Segment seg;
  seg.values = std::move(x);
  seg.missing.assign(seg.values.size(), 0);
  serialize::write_series_csv(args.out, {seg});
  serialize::save_json(args.out_truth, serialize::truth_to_json(truth));
  return 0;
}

struct SpectrumArgs {
  std::string input;
  std::string config_path;
  int threads = 0;
  std::string out = "wavespec.csv";
};

int cmd_spectrum(const SpectrumArgs& args) {
  serialize::FileConfig cfg = load_config(args.config_path);
  pipeline::AnalysisConfig c = cfg.analysis;
  c.threads = elan::resolve_threads(args.threads);

  std::vector<serialize::Segment> segments =
      serialize::read_series_csv(args.input);
  bool multi = !segments[0].name.empty();
  morse::WaveletSpec wavelet(c.beta, c.gamma);

  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot write " + args.out);
  out << (multi ? "segment,scale_index,omega,mean_sq,predicted\n"
                : "scale_index,omega,mean_sq,predicted\n");

  for (const serialize::Segment& seg : segments) {
    cwt::FrequencyGrid grid = cwt::build_grid(wavelet, seg.values.size(), c.grid);
    cwt::TransformPlane plane =
        cwt::transform(seg.values, seg.missing, wavelet, grid, c.threads);
    noise::NoiseModel model;
    model.alpha = c.alpha;
    model.amplitude = c.estimate_noise
                          ? noise::estimate_amplitude(plane, c.alpha)
                          : c.noise_amplitude;

    for (std::size_t j = 0; j < grid.size(); ++j) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t t = 0; t < plane.length; ++t) {
        if (plane.is_edge(t, j) || plane.missing[t]) continue;
        sum += std::norm(plane.at(t, j));
        ++count;
      }
      double mean_sq = count ? sum / static_cast<double>(count) : 0.0;
      double predicted =
          noise::wavelet_spectrum(model, wavelet, plane.scales[j]);
      if (multi) out << seg.name << ',';
      out << j << ',' << fmt(grid.omega[j]) << ',' << fmt(mean_sq) << ','
          << fmt(predicted) << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing " + args.out);
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Detection and reconstruction of time-localized events in "
               "power-law noise"};
  app.require_subcommand(1);

  DetectArgs detect_args;
  CLI::App* detect = app.add_subcommand(
      "detect", "Find significant isolated events in a CSV series");
  detect->add_option("input", detect_args.input, "input CSV (t,value or segment,t,value)")
      ->required();
  detect->add_option("--config", detect_args.config_path, "configuration JSON");
  CLI::Option* detect_seed =
      detect->add_option("--seed", detect_args.seed, "Monte Carlo seed override");
  detect->add_flag("--emit-plane", detect_args.emit_plane,
                   "also write the full transform plane CSV");
  detect->add_option("--cache-dir", detect_args.cache_dir,
                     "rate-table cache directory");
  detect->add_option("--threads", detect_args.threads,
                     "worker threads (0 = auto)");
  detect->add_option("--out-events", detect_args.out_events, "events JSON path");
  detect->add_option("--out-residual", detect_args.out_residual,
                     "residual CSV path");
  detect->add_option("--out-plane", detect_args.out_plane,
                     "transform plane CSV path");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Build noise-maxima rate tables for a configuration");
  simulate->add_option("--config", sim_args.config_path, "configuration JSON")
      ->required();
  CLI::Option* sim_seed =
      simulate->add_option("--seed", sim_args.seed, "Monte Carlo seed override");
  simulate->add_option("--cache-dir", sim_args.cache_dir,
                       "rate-table cache directory");
  simulate->add_option("--threads", sim_args.threads,
                       "worker threads (0 = auto)");
  simulate->add_option("--out", sim_args.out, "output JSON path");

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Generate synthetic data with known ground truth");
  synth_cmd
      ->add_option("kind", synth_args.kind,
                   "events | white | events+red")
      ->required();
  synth_cmd->add_option("--seed", synth_args.seed, "noise seed");
  CLI::Option* synth_len =
      synth_cmd->add_option("--length", synth_args.length,
                            "series length (kind 'white' only)");
  synth_cmd->add_option("--out", synth_args.out, "data CSV path");
  synth_cmd->add_option("--out-truth", synth_args.out_truth,
                        "ground-truth JSON path");

  SpectrumArgs spec_args;
  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "Time-averaged squared transform vs the noise prediction");
  spectrum->add_option("input", spec_args.input, "input CSV")->required();
  spectrum->add_option("--config", spec_args.config_path, "configuration JSON");
  spectrum->add_option("--threads", spec_args.threads,
                       "worker threads (0 = auto)");
  spectrum->add_option("--out", spec_args.out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    detect_args.seed_given = detect_seed->count() > 0;
    sim_args.seed_given = sim_seed->count() > 0;
    synth_args.length_given = synth_len->count() > 0;
    for (std::uint64_t s : {detect_args.seed, sim_args.seed, synth_args.seed})
      if (s >= kSeedLimit)
        throw std::runtime_error("seed must be below 2^53");

    if (detect->parsed()) return cmd_detect(detect_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (synth_cmd->parsed()) return cmd_synth(synth_args);
    if (spectrum->parsed()) return cmd_spectrum(spec_args);
    throw std::runtime_error("no command given");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace elan::cli
