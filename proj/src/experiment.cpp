#include "p2ptrust/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "p2ptrust/errors.hpp"

namespace p2ptrust {

using nlohmann::json;

namespace {

// ---- JSON readers -----------------------------------------------------------

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config section '" + where + "' must be an object");
}

[[noreturn]] void unknown_key(const std::string& where, const std::string& key) {
  throw ConfigError("unknown config key '" + where + key + "'");
}

void read_range(const json& j, Range& r, const std::string& where) {
  expect_object(j, where);
  for (const auto& [k, v] : j.items()) {
    if (k == "min") r.min = get_as<double>(v, where + ".min");
    else if (k == "max") r.max = get_as<double>(v, where + ".max");
    else unknown_key(where + ".", k);
  }
}

void read_count_range(const json& j, CountRange& r, const std::string& where) {
  expect_object(j, where);
  for (const auto& [k, v] : j.items()) {
    if (k == "min") r.min = get_as<std::uint32_t>(v, where + ".min");
    else if (k == "max") r.max = get_as<std::uint32_t>(v, where + ".max");
    else unknown_key(where + ".", k);
  }
}

void read_sim_config(const json& j, SimConfig& c) {
  expect_object(j, "base");
  for (const auto& [k, v] : j.items()) {
    const std::string key = "base." + k;
    if (k == "node_count") c.node_count = get_as<std::uint32_t>(v, key);
    else if (k == "iterations") c.iterations = get_as<std::uint32_t>(v, key);
    else if (k == "acquaintance_iterations") c.acquaintance_iterations = get_as<std::uint32_t>(v, key);
    else if (k == "delta") c.delta = get_as<double>(v, key);
    else if (k == "alpha") c.alpha = get_as<double>(v, key);
    else if (k == "population") c.population = parse_population(get_as<std::string>(v, key));
    else if (k == "estimator_kind") c.estimator_kind = parse_estimator_kind(get_as<std::string>(v, key));
    else if (k == "rng_seed") c.rng_seed = get_as<std::uint64_t>(v, key);
    else if (k == "tcp_enabled") c.tcp_enabled = get_as<bool>(v, key);
    else if (k == "overrequest") c.overrequest = get_as<double>(v, key);
    else if (k == "candidates") read_count_range(v, c.candidates, key);
    else if (k == "baseline_window") c.baseline_window = get_as<std::size_t>(v, key);
    else if (k == "sigma") c.sigma = get_as<double>(v, key);
    else if (k == "c2_source") c.c2_source = parse_c2_source(get_as<std::string>(v, key));
    else if (k == "free_rider_fraction") c.free_rider_fraction = get_as<double>(v, key);
    else if (k == "record_transactions") c.record_transactions = get_as<bool>(v, key);
    else if (k == "homogeneous") {
      expect_object(v, key);
      for (const auto& [hk, hv] : v.items()) {
        const std::string hkey = key + "." + hk;
        if (hk == "download_capacity") c.homogeneous.download_capacity = get_as<double>(hv, hkey);
        else if (hk == "upload_capacity") c.homogeneous.upload_capacity = get_as<double>(hv, hkey);
        else if (hk == "max_served_requests")
          c.homogeneous.max_served_requests = get_as<std::uint32_t>(hv, hkey);
        else unknown_key(key + ".", hk);
      }
    } else if (k == "heterogeneous") {
      expect_object(v, key);
      for (const auto& [hk, hv] : v.items()) {
        const std::string hkey = key + "." + hk;
        if (hk == "download_capacity") read_range(hv, c.heterogeneous.download_capacity, hkey);
        else if (hk == "upload_capacity") read_range(hv, c.heterogeneous.upload_capacity, hkey);
        else if (hk == "max_served_requests")
          read_count_range(hv, c.heterogeneous.max_served_requests, hkey);
        else unknown_key(key + ".", hk);
      }
    } else if (k == "tcp") {
      expect_object(v, key);
      for (const auto& [tk, tv] : v.items()) {
        const std::string tkey = key + "." + tk;
        if (tk == "w_max") c.tcp.w_max = get_as<double>(tv, tkey);
        else if (tk == "rtt") read_range(tv, c.tcp.rtt, tkey);
        else if (tk == "t0") c.tcp.t0 = get_as<double>(tv, tkey);
        else if (tk == "b") c.tcp.b = get_as<int>(tv, tkey);
        else if (tk == "p") read_range(tv, c.tcp.p, tkey);
        else if (tk == "units_per_packet") c.tcp.units_per_packet = get_as<double>(tv, tkey);
        else if (tk == "slot_duration") c.tcp.slot_duration = get_as<double>(tv, tkey);
        else unknown_key(key + ".", tk);
      }
    } else {
      unknown_key("base.", k);
    }
  }
}

void read_sweeps(const json& j, SweepSpec& s) {
  expect_object(j, "sweeps");
  for (const auto& [k, v] : j.items()) {
    const std::string key = "sweeps." + k;
    if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    if (k == "alpha") {
      s.alpha.clear();
      for (const auto& e : v) s.alpha.push_back(get_as<double>(e, key));
    } else if (k == "estimator_kind") {
      s.estimator_kind.clear();
      for (const auto& e : v) s.estimator_kind.push_back(parse_estimator_kind(get_as<std::string>(e, key)));
    } else if (k == "population") {
      s.population.clear();
      for (const auto& e : v) s.population.push_back(parse_population(get_as<std::string>(e, key)));
    } else {
      unknown_key("sweeps.", k);
    }
  }
}

json range_json(const Range& r) { return json{{"min", r.min}, {"max", r.max}}; }
json range_json(const CountRange& r) { return json{{"min", r.min}, {"max", r.max}}; }

json sim_json(const SimConfig& c) {
  json j;
  j["node_count"] = c.node_count;
  j["iterations"] = c.iterations;
  j["acquaintance_iterations"] = c.acquaintance_iterations;
  j["delta"] = c.delta;
  j["alpha"] = c.alpha;
  j["population"] = to_string(c.population);
  j["estimator_kind"] = to_string(c.estimator_kind);
  j["rng_seed"] = c.rng_seed;
  j["tcp_enabled"] = c.tcp_enabled;
  j["overrequest"] = c.overrequest;
  j["candidates"] = range_json(c.candidates);
  j["baseline_window"] = c.baseline_window;
  j["sigma"] = c.sigma;
  j["c2_source"] = to_string(c.c2_source);
  j["free_rider_fraction"] = c.free_rider_fraction;
  j["record_transactions"] = c.record_transactions;
  j["homogeneous"] = {{"download_capacity", c.homogeneous.download_capacity},
                      {"upload_capacity", c.homogeneous.upload_capacity},
                      {"max_served_requests", c.homogeneous.max_served_requests}};
  j["heterogeneous"] = {{"download_capacity", range_json(c.heterogeneous.download_capacity)},
                        {"upload_capacity", range_json(c.heterogeneous.upload_capacity)},
                        {"max_served_requests", range_json(c.heterogeneous.max_served_requests)}};
  j["tcp"] = {{"w_max", c.tcp.w_max},
              {"rtt", range_json(c.tcp.rtt)},
              {"t0", c.tcp.t0},
              {"b", c.tcp.b},
              {"p", range_json(c.tcp.p)},
              {"units_per_packet", c.tcp.units_per_packet},
              {"slot_duration", c.tcp.slot_duration}};
  return j;
}

std::string format_double(double value, int precision) {
  char buf[64];
  const auto res = precision > 0
                       ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, precision)
                       : std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, const std::filesystem::path& path) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw IoError("malformed number '" + std::string(field) + "' in " + path.string());
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

// ---- spec -------------------------------------------------------------------

void ExperimentSpec::validate() const {
  base.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (output_dir.empty()) throw ConfigError("output_dir must be set");
  if (jobs == 0) throw ConfigError("jobs must be >= 1");
  for (double a : sweeps.alpha)
    if (!(a > 0.0) || a > 1.0) throw ConfigError("sweep alpha values must lie in (0, 1]");
  const std::size_t points = std::max<std::size_t>(1, sweeps.alpha.size()) *
                             std::max<std::size_t>(1, sweeps.estimator_kind.size()) *
                             std::max<std::size_t>(1, sweeps.population.size());
  if (points * seeds.size() > max_runs)
    throw ConfigError("sweep expands to " + std::to_string(points * seeds.size()) +
                      " runs, above max_runs = " + std::to_string(max_runs));
}

std::vector<SimConfig> ExperimentSpec::expand() const {
  const auto pops = sweeps.population.empty() ? std::vector{base.population} : sweeps.population;
  const auto kinds =
      sweeps.estimator_kind.empty() ? std::vector{base.estimator_kind} : sweeps.estimator_kind;
  const auto alphas = sweeps.alpha.empty() ? std::vector{base.alpha} : sweeps.alpha;
  std::vector<SimConfig> out;
  for (Population p : pops)
    for (EstimatorKind k : kinds)
      for (double a : alphas)
        for (std::uint64_t s : seeds) {
          SimConfig c = base;
          c.population = p;
          c.estimator_kind = k;
          c.alpha = a;
          c.rng_seed = s;
          out.push_back(c);
        }
  return out;
}

std::vector<std::string> preset_names() {
  return {"paper-homogeneous", "paper-heterogeneous", "alpha-sweep-homogeneous",
          "alpha-sweep-heterogeneous"};
}

ExperimentSpec preset(std::string_view full_name) {
  std::string_view name = full_name;
  ExperimentSpec spec;
  spec.base.node_count = 200;
  spec.base.iterations = 500;
  spec.base.acquaintance_iterations = 50;
  spec.base.delta = 0.3;
  spec.base.alpha = 0.1;
  spec.sweeps.alpha = {0.1, 0.3};
  spec.sweeps.estimator_kind = {EstimatorKind::blue, EstimatorKind::baseline};
  if (name.starts_with("alpha-sweep-")) {
    spec.sweeps.alpha = {0.1, 0.01, 0.001};
    name.remove_prefix(12);
  } else if (name.starts_with("paper-")) {
    name.remove_prefix(6);
  } else {
    name = {};
  }
  if (name == "homogeneous") {
    spec.base.population = Population::homogeneous;
  } else if (name == "heterogeneous") {
    spec.base.population = Population::heterogeneous;
  } else {
    throw ConfigError("unknown preset '" + std::string(full_name) + "'");
  }
  spec.sweeps.population = {spec.base.population};
  return spec;
}

void overlay_config_text(ExperimentSpec& spec, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  expect_object(doc, "<root>");
  for (const auto& [k, v] : doc.items()) {
    if (k == "base") {
      read_sim_config(v, spec.base);
    } else if (k == "sweeps") {
      read_sweeps(v, spec.sweeps);
    } else if (k == "seeds") {
      if (!v.is_array()) throw ConfigError("config key 'seeds' must be an array");
      spec.seeds.clear();
      for (const auto& e : v) spec.seeds.push_back(get_as<std::uint64_t>(e, "seeds"));
    } else if (k == "output_dir") {
      spec.output_dir = get_as<std::string>(v, k);
    } else if (k == "max_runs") {
      spec.max_runs = get_as<std::size_t>(v, k);
    } else if (k == "jobs") {
      spec.jobs = get_as<unsigned>(v, k);
    } else {
      unknown_key("", k);
    }
  }
}

void overlay_config_file(ExperimentSpec& spec, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  overlay_config_text(spec, text.str());
}

std::string config_to_json(const SimConfig& config) { return sim_json(config).dump(); }

std::string config_hash(const SimConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_shortest(double value) { return format_double(value, 0); }
std::string format_exact(double value) { return format_double(value, 17); }

// ---- series -----------------------------------------------------------------

void emit_series(std::span<const IterationMetrics> rows, const std::filesystem::path& path) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.iteration);
    out += ',';
    out += format_exact(r.delta_r_raw);
    out += ',';
    out += format_exact(r.delta_r_norm);
    out += ',';
    out += format_exact(r.utilization);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<IterationMetrics> parse_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw IoError("missing or unexpected CSV header in " + path.string());
  std::vector<IterationMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 4) throw IoError("expected 4 fields per row in " + path.string());
    IterationMetrics r;
    std::size_t it = 0;
    const auto res = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), it);
    if (res.ec != std::errc{}) throw IoError("malformed iteration in " + path.string());
    r.iteration = it;
    r.delta_r_raw = parse_double(fields[1], path);
    r.delta_r_norm = parse_double(fields[2], path);
    r.utilization = parse_double(fields[3], path);
    rows.push_back(r);
  }
  return rows;
}

// ---- experiment -------------------------------------------------------------

std::string series_file_name(const SimConfig& config) {
  return std::string(to_string(config.population)) + "_" + std::string(to_string(config.estimator_kind)) +
         "_alpha" + format_shortest(config.alpha) + "_seed" + std::to_string(config.rng_seed) + ".csv";
}

std::vector<ManifestEntry> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto runs = spec.expand();

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec || !std::filesystem::is_directory(spec.output_dir))
    throw IoError("cannot create output directory " + spec.output_dir.string());

  std::vector<ManifestEntry> entries(runs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < runs.size();) {
      try {
        const SimConfig& c = runs[i];
        const SimReport report = run_simulation(c);
        const std::string name = series_file_name(c);
        emit_series(report, spec.output_dir / name);
        entries[i] = ManifestEntry{name, c.rng_seed, c.estimator_kind, c.alpha, c.population,
                                   config_hash(c)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs.size();
      }
    }
  };

  const unsigned threads = std::min<unsigned>(spec.jobs, static_cast<unsigned>(runs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  json manifest = json::array();
  for (const auto& e : entries) {
    manifest.push_back({{"file", e.file},
                        {"seed", e.seed},
                        {"estimator", to_string(e.estimator)},
                        {"alpha", e.alpha},
                        {"population", to_string(e.population)},
                        {"config_hash", e.config_hash}});
  }
  write_file(spec.output_dir / kManifestName, manifest.dump(2) + "\n");
  return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("manifest parse error: ") + e.what());
  }
  std::vector<ManifestEntry> out;
  for (const auto& e : doc) {
    ManifestEntry m;
    m.file = e.at("file").get<std::string>();
    m.seed = e.at("seed").get<std::uint64_t>();
    m.estimator = parse_estimator_kind(e.at("estimator").get<std::string>());
    m.alpha = e.at("alpha").get<double>();
    m.population = parse_population(e.at("population").get<std::string>());
    m.config_hash = e.at("config_hash").get<std::string>();
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace p2ptrust
