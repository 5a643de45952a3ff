#include "elan/serialize.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "elan/influence.hpp"

namespace elan::serialize {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kSeedLimit = 1ull << 53;  // exact in a JSON number

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

std::string trim(std::string s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::int64_t parse_time(const std::string& path, std::size_t line,
                        const std::string& token) {
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    fail(path, line, "invalid time stamp '" + token + "'");
  return value;
}

double parse_value(const std::string& path, std::size_t line,
                   const std::string& token) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    fail(path, line, "invalid value '" + token + "'");
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// --- JSON helpers -----------------------------------------------------------

void check_keys(const Json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw std::runtime_error(std::string("config: ") + where +
                             " must be an object");
  for (const auto& item : obj.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return item.key() == k; });
    if (!known)
      throw std::runtime_error(std::string("config: unknown key '") +
                               item.key() + "' in " + where);
  }
}

double num_or(const Json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number())
    throw std::runtime_error(std::string("config: '") + key +
                             "' must be a number");
  return v.get<double>();
}

bool bool_or(const Json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_boolean())
    throw std::runtime_error(std::string("config: '") + key +
                             "' must be a boolean");
  return v.get<bool>();
}

std::uint64_t count_or(const Json& obj, const char* key,
                       std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<double>() < 0)
    throw std::runtime_error(std::string("config: '") + key +
                             "' must be a nonnegative integer");
  std::uint64_t value = v.get<std::uint64_t>();
  if (value >= kSeedLimit)
    throw std::runtime_error(std::string("config: '") + key +
                             "' exceeds 2^53 and would not survive a JSON "
                             "round trip");
  return value;
}

std::vector<double> num_array(const Json& v, const char* where) {
  if (!v.is_array())
    throw std::runtime_error(std::string(where) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& item : v) {
    if (!item.is_number())
      throw std::runtime_error(std::string(where) +
                               " must contain only numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

std::uint64_t fnv1a(std::uint64_t hash, const unsigned char* data,
                    std::size_t size) {
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= data[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t fnv1a_doubles(const std::vector<double>& values) {
  std::uint64_t hash = 14695981039346656037ull;
  for (double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int k = 0; k < 8; ++k)
      bytes[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
    hash = fnv1a(hash, bytes, 8);
  }
  return hash;
}

std::string hex16(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace

std::vector<Segment> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0)
    line.erase(0, 3);  // UTF-8 byte-order mark
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_fields(line);
  bool has_segment = false;
  if (header.size() == 2 && header[0] == "t" && header[1] == "value") {
    has_segment = false;
  } else if (header.size() == 3 && header[0] == "segment" &&
             header[1] == "t" && header[2] == "value") {
    has_segment = true;
  } else {
    fail(path, line_no, "header must be 't,value' or 'segment,t,value'");
  }

  std::vector<Segment> segments;
  std::set<std::string> seen_names;
  std::int64_t prev_t = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    auto fields = split_fields(line);
    std::size_t expected = has_segment ? 3u : 2u;
    if (fields.size() != expected)
      fail(path, line_no,
           "expected " + std::to_string(expected) + " fields, got " +
               std::to_string(fields.size()));

    std::string name = has_segment ? fields[0] : std::string();
    std::int64_t t = parse_time(path, line_no, fields[has_segment ? 1 : 0]);
    const std::string& value_token = fields[has_segment ? 2 : 1];

    bool new_segment = segments.empty() ||
                       (has_segment && segments.back().name != name);
    if (new_segment) {
      if (!seen_names.insert(name).second)
        fail(path, line_no, "segment '" + name + "' is not contiguous");
      segments.push_back(Segment{});
      segments.back().name = name;
      segments.back().t_start = t;
    } else {
      if (t <= prev_t)
        fail(path, line_no, "time stamps must be strictly increasing");
      for (std::int64_t missing_t = prev_t + 1; missing_t < t; ++missing_t) {
        segments.back().values.push_back(
            std::numeric_limits<double>::quiet_NaN());
        segments.back().missing.push_back(1);
      }
    }
    prev_t = t;

    if (value_token.empty()) {
      segments.back().values.push_back(
          std::numeric_limits<double>::quiet_NaN());
      segments.back().missing.push_back(1);
    } else {
      segments.back().values.push_back(parse_value(path, line_no, value_token));
      segments.back().missing.push_back(0);
    }
  }

  if (segments.empty()) throw std::runtime_error(path + ": no data rows");
  return segments;
}

void write_series_csv(const std::string& path,
                      const std::vector<Segment>& segments) {
  bool has_segment = std::any_of(segments.begin(), segments.end(),
                                 [](const Segment& s) { return !s.name.empty(); });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << (has_segment ? "segment,t,value\n" : "t,value\n");
  for (const Segment& seg : segments) {
    for (std::size_t i = 0; i < seg.values.size(); ++i) {
      if (has_segment) out << seg.name << ',';
      out << seg.t_start + static_cast<std::int64_t>(i) << ',';
      bool gap = (i < seg.missing.size() && seg.missing[i]) ||
                 !std::isfinite(seg.values[i]);
      if (!gap) out << format_double(seg.values[i]);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string grid_hash(const cwt::FrequencyGrid& grid) {
  return hex16(fnv1a_doubles(grid.omega));
}

Json config_to_json(const pipeline::AnalysisConfig& c) {
  Json j;
  j["schema"] = "element-config/1";
  j["wavelet"] = {{"beta", c.beta}, {"gamma", c.gamma}};
  j["element"] = {{"mu", c.mu}};
  j["noise"] = {{"alpha", c.alpha},
                {"estimate", c.estimate_noise},
                {"amplitude", c.noise_amplitude}};
  j["grid"] = {{"eta", c.grid.eta},
               {"density", c.grid.density},
               {"packing", c.grid.packing}};
  j["detection"] = {{"lambda", c.lambda},
                    {"missing_max", c.missing_max},
                    {"rate_events", c.rate_events},
                    {"rate_n_series", c.rate_n_series}};
  j["montecarlo"] = {{"n_realizations", c.n_realizations},
                     {"seed", c.seed},
                     {"bins", c.bins},
                     {"bin_max", c.bin_max}};
  return j;
}

FileConfig config_from_json(const Json& j) {
  check_keys(j, "the configuration",
             {"schema", "wavelet", "element", "noise", "grid", "detection",
              "montecarlo", "length"});
  if (!j.contains("schema") || !j.at("schema").is_string() ||
      j.at("schema").get<std::string>() != "element-config/1")
    throw std::runtime_error("config: schema must be \"element-config/1\"");

  FileConfig out;
  pipeline::AnalysisConfig& c = out.analysis;

  if (j.contains("wavelet")) {
    const Json& w = j.at("wavelet");
    check_keys(w, "wavelet", {"beta", "gamma"});
    c.beta = num_or(w, "beta", c.beta);
    c.gamma = num_or(w, "gamma", c.gamma);
  }
  if (j.contains("element")) {
    const Json& e = j.at("element");
    check_keys(e, "element", {"mu"});
    c.mu = num_or(e, "mu", c.mu);
  }
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    check_keys(n, "noise", {"alpha", "estimate", "amplitude"});
    c.alpha = num_or(n, "alpha", c.alpha);
    c.estimate_noise = bool_or(n, "estimate", c.estimate_noise);
    c.noise_amplitude = num_or(n, "amplitude", c.noise_amplitude);
  }
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    check_keys(g, "grid", {"eta", "density", "packing"});
    c.grid.eta = num_or(g, "eta", c.grid.eta);
    c.grid.density = num_or(g, "density", c.grid.density);
    c.grid.packing = num_or(g, "packing", c.grid.packing);
  }
  if (j.contains("detection")) {
    const Json& d = j.at("detection");
    check_keys(d, "detection",
               {"lambda", "missing_max", "rate_events", "rate_n_series"});
    c.lambda = num_or(d, "lambda", c.lambda);
    c.missing_max = num_or(d, "missing_max", c.missing_max);
    c.rate_events = num_or(d, "rate_events", c.rate_events);
    c.rate_n_series = num_or(d, "rate_n_series", c.rate_n_series);
  }
  if (j.contains("montecarlo")) {
    const Json& m = j.at("montecarlo");
    check_keys(m, "montecarlo", {"n_realizations", "seed", "bins", "bin_max"});
    c.n_realizations = count_or(m, "n_realizations", c.n_realizations);
    c.seed = count_or(m, "seed", c.seed);
    c.bins = static_cast<std::size_t>(count_or(m, "bins", c.bins));
    c.bin_max = num_or(m, "bin_max", c.bin_max);
  }
  if (j.contains("length"))
    out.length = static_cast<std::size_t>(count_or(j, "length", 0));
  return out;
}

Json events_to_json(const pipeline::AnalysisResult& result,
                    const Json& config_echo,
                    const pipeline::AnalysisConfig& config) {
  morse::WaveletSpec wavelet(config.beta, config.gamma);
  morse::ElementSpec element(config.mu, config.gamma);

  Json j;
  j["schema"] = "element-events/1";
  j["config"] = config_echo;
  j["thresholds"] = result.thresholds;

  Json events = Json::array();
  for (const pipeline::EventEstimate& ev : result.events) {
    const auto& flags = result.maxima.at(ev.source).flags;
    Json region = Json::array();
    influence::InfluenceRegion reg = influence::region_curve(
        config.lambda, wavelet, element, ev.rho_hat, ev.t_hat);
    for (const auto& [tau, omega_s] : reg.curve)
      region.push_back(Json::array({tau, omega_s}));

    events.push_back(Json{{"t", ev.t_hat},
                          {"omega_rho", ev.omega_rho},
                          {"rho", ev.rho_hat},
                          {"abs_c", std::abs(ev.c_hat)},
                          {"phase", std::arg(ev.c_hat)},
                          {"flags",
                           {{"edge", flags.edge},
                            {"significant", flags.significant},
                            {"missing_rejected", flags.missing_rejected},
                            {"isolated", flags.isolated}}},
                          {"region", region}});
  }
  j["events"] = events;
  j["counts"] = {{"maxima", result.count_maxima},
                 {"significant", result.count_significant},
                 {"isolated", result.count_isolated}};
  return j;
}

RateTableKey make_key(const noise::NoiseModel& model,
                      const morse::WaveletSpec& w,
                      const cwt::FrequencyGrid& grid, std::uint64_t n,
                      std::uint64_t seed) {
  RateTableKey key;
  key.alpha = model.alpha;
  key.beta = w.beta;
  key.gamma = w.gamma;
  key.r = grid.ratio;
  key.grid_hash = grid_hash(grid);
  key.n = n;
  key.seed = seed;
  return key;
}

std::string cache_file_name(const RateTableKey& key) {
  std::uint64_t hash = fnv1a_doubles({key.alpha, key.beta, key.gamma, key.r});
  hash = fnv1a(hash,
               reinterpret_cast<const unsigned char*>(key.grid_hash.data()),
               key.grid_hash.size());
  std::uint64_t counts[2] = {key.n, key.seed};
  hash = fnv1a(hash, reinterpret_cast<const unsigned char*>(counts),
               sizeof counts);
  return "ratetable-" + hex16(hash) + ".json";
}

Json ratetables_to_json(const RateTableKey& key,
                        const std::vector<noise::RateTable>& tables) {
  Json j;
  j["schema"] = "ratetable/1";
  j["key"] = {{"alpha", key.alpha}, {"beta", key.beta},
              {"gamma", key.gamma}, {"r", key.r},
              {"grid_hash", key.grid_hash}, {"n", key.n},
              {"seed", key.seed}};
  Json out_tables = Json::array();
  for (const noise::RateTable& t : tables) {
    out_tables.push_back(Json{{"scale_index", t.scale_index},
                              {"bins", t.bin_edges},
                              {"density", t.density},
                              {"survival", t.survival}});
  }
  j["tables"] = out_tables;
  return j;
}

std::pair<RateTableKey, std::vector<noise::RateTable>> ratetables_from_json(
    const Json& j) {
  if (!j.is_object() || !j.contains("schema") ||
      j.at("schema") != "ratetable/1")
    throw std::runtime_error("rate table: schema must be \"ratetable/1\"");
  if (!j.contains("key") || !j.contains("tables"))
    throw std::runtime_error("rate table: missing key or tables");

  const Json& k = j.at("key");
  RateTableKey key;
  key.alpha = k.at("alpha").get<double>();
  key.beta = k.at("beta").get<double>();
  key.gamma = k.at("gamma").get<double>();
  key.r = k.at("r").get<double>();
  key.grid_hash = k.at("grid_hash").get<std::string>();
  key.n = k.at("n").get<std::uint64_t>();
  key.seed = k.at("seed").get<std::uint64_t>();

  std::vector<noise::RateTable> tables;
  for (const Json& entry : j.at("tables")) {
    noise::RateTable t;
    t.scale_index = entry.at("scale_index").get<std::size_t>();
    t.bin_edges = num_array(entry.at("bins"), "rate table bins");
    t.density = num_array(entry.at("density"), "rate table density");
    t.survival = num_array(entry.at("survival"), "rate table survival");
    if (t.density.size() != t.bin_edges.size() ||
        t.survival.size() != t.bin_edges.size() || t.bin_edges.size() < 2)
      throw std::runtime_error("rate table: inconsistent array sizes");
    t.n_samples = key.n;
    t.seed = key.seed;
    tables.push_back(std::move(t));
  }
  if (tables.empty()) throw std::runtime_error("rate table: no tables");
  return {key, std::move(tables)};
}

Json truth_to_json(const synth::EventTrain& truth) {
  Json j;
  j["schema"] = "element-truth/1";
  j["length"] = truth.length;
  j["element"] = {{"mu", truth.element.mu}, {"gamma", truth.element.gamma}};
  Json events = Json::array();
  for (const synth::Event& ev : truth.events) {
    events.push_back(Json{{"t", ev.t},
                          {"rho", ev.rho},
                          {"omega_rho", ev.omega_rho},
                          {"abs_c", std::abs(ev.c)},
                          {"phase", std::arg(ev.c)}});
  }
  j["events"] = events;
  return j;
}

synth::EventTrain truth_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("schema") ||
      j.at("schema") != "element-truth/1")
    throw std::runtime_error("truth: schema must be \"element-truth/1\"");
  synth::EventTrain truth;
  truth.length = j.at("length").get<std::size_t>();
  truth.element = morse::ElementSpec(j.at("element").at("mu").get<double>(),
                                     j.at("element").at("gamma").get<double>());
  for (const Json& entry : j.at("events")) {
    synth::Event ev;
    ev.t = entry.at("t").get<double>();
    ev.rho = entry.at("rho").get<double>();
    ev.omega_rho = entry.at("omega_rho").get<double>();
    ev.c = std::polar(entry.at("abs_c").get<double>(),
                      entry.at("phase").get<double>());
    truth.events.push_back(ev);
  }
  return truth;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace elan::serialize
