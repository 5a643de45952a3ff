#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "elan/cwt.hpp"
#include "elan/noise.hpp"
#include "elan/pipeline.hpp"
#include "elan/synth.hpp"

namespace elan::serialize {

// One track of input data.  `name` is empty when the file has no segment
// column; `t_start` is the first time stamp so outputs can echo the original
// axis.  Gaps in the time axis become missing samples.
struct Segment {
  std::string name;
  std::int64_t t_start = 0;
  std::vector<double> values;          // NaN where missing
  std::vector<std::uint8_t> missing;
};

// Reads a `t,value` or `segment,t,value` CSV (UTF-8, header required).
// Throws std::runtime_error with "path:line: message" on malformed input.
std::vector<Segment> read_series_csv(const std::string& path);

// Writes segments back in the same shape they were read (segment column
// appears whenever any segment is named).  Missing samples get an empty
// value field.
void write_series_csv(const std::string& path,
                      const std::vector<Segment>& segments);

// FNV-1a 64-bit over the grid frequencies' little-endian bytes, as 16 hex
// digits.  Identifies a grid for rate-table cache keys.
std::string grid_hash(const cwt::FrequencyGrid& grid);

// Analysis configuration file, schema "element-config/1".  `length` is only
// consulted by commands that generate data (simulate, synth); detection takes
// the length from the input series.  Unknown keys anywhere are rejected.
struct FileConfig {
  pipeline::AnalysisConfig analysis;
  std::size_t length = 0;  // 0 = unspecified
};

nlohmann::ordered_json config_to_json(const pipeline::AnalysisConfig& config);
FileConfig config_from_json(const nlohmann::ordered_json& j);

// Detection results, schema "element-events/1".  `config_echo` is embedded
// verbatim; regions are computed here from each event's fitted center.
nlohmann::ordered_json events_to_json(const pipeline::AnalysisResult& result,
                              const nlohmann::ordered_json& config_echo,
                              const pipeline::AnalysisConfig& config);

// Identity of a Monte Carlo rate table: noise exponent, wavelet shape, grid
// ratio and hash, draw count, master seed.
struct RateTableKey {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double r = 0.0;
  std::string grid_hash;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;

  bool operator==(const RateTableKey&) const = default;
};

RateTableKey make_key(const noise::NoiseModel& model,
                      const morse::WaveletSpec& w,
                      const cwt::FrequencyGrid& grid, std::uint64_t n,
                      std::uint64_t seed);

// Cache entry file name, "ratetable-<16 hex of key hash>.json".
std::string cache_file_name(const RateTableKey& key);

// Rate tables, schema "ratetable/1".  Each table stores its bin edges under
// "bins" so the file is self-describing.
nlohmann::ordered_json ratetables_to_json(const RateTableKey& key,
                                  const std::vector<noise::RateTable>& tables);
std::pair<RateTableKey, std::vector<noise::RateTable>> ratetables_from_json(
    const nlohmann::ordered_json& j);

// Planted ground truth for synthetic data, schema "element-truth/1".
nlohmann::ordered_json truth_to_json(const synth::EventTrain& truth);
synth::EventTrain truth_from_json(const nlohmann::ordered_json& j);

// Reads/writes a JSON document; read errors carry the path.
nlohmann::ordered_json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace elan::serialize
