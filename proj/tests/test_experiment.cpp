#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "p2ptrust/errors.hpp"
#include "p2ptrust/experiment.hpp"

using namespace p2ptrust;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("p2ptrust_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const fs::path& p) {
  const std::string text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("named presets") {
  CHECK(preset_names().size() == 4);
  for (const auto& name : preset_names()) {
    const auto spec = preset(name);
    CHECK(spec.base.node_count == 200);
    CHECK(spec.base.iterations == 500);
    CHECK(spec.base.acquaintance_iterations == 50);
    CHECK(spec.base.delta == 0.3);
    if (name.starts_with("alpha-sweep-")) {
      CHECK(spec.sweeps.alpha == std::vector<double>{0.1, 0.01, 0.001});
      CHECK(spec.expand().size() == 6);
    } else {
      CHECK(spec.sweeps.alpha == std::vector<double>{0.1, 0.3});
      CHECK(spec.expand().size() == 4);
    }
  }
  CHECK(preset("alpha-sweep-heterogeneous").base.population == Population::heterogeneous);
  CHECK_THROWS_AS(preset("paper-"), ConfigError);
  CHECK_THROWS_AS(preset("alpha-sweep-mixed"), ConfigError);
  CHECK(preset("paper-heterogeneous").base.population == Population::heterogeneous);
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("config overlay sets nested keys and rejects unknown ones") {
  ExperimentSpec spec;
  overlay_config_text(spec, R"({
    "base": {"node_count": 12, "iterations": 30, "acquaintance_iterations": 5,
             "population": "heterogeneous", "estimator_kind": "baseline",
             "heterogeneous": {"max_served_requests": {"min": 1, "max": 3}},
             "tcp": {"p": {"min": 0.0, "max": 0.1}}},
    "sweeps": {"alpha": [0.01, 0.001]},
    "seeds": [3, 4],
    "output_dir": "somewhere"
  })");
  CHECK(spec.base.node_count == 12);
  CHECK(spec.base.population == Population::heterogeneous);
  CHECK(spec.base.estimator_kind == EstimatorKind::baseline);
  CHECK(spec.base.heterogeneous.max_served_requests.max == 3);
  CHECK(spec.base.tcp.p.max == 0.1);
  CHECK(spec.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(spec.output_dir == fs::path("somewhere"));
  CHECK(spec.expand().size() == 4);

  CHECK_THROWS_AS(overlay_config_text(spec, R"({"base": {"nodes": 3}})"), ConfigError);
  CHECK_THROWS_AS(overlay_config_text(spec, R"({"base": {"node_count": "three"}})"), ConfigError);
  CHECK_THROWS_AS(overlay_config_text(spec, R"({"sweeps": {"alpha": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(overlay_config_text(spec, "{not json"), ConfigError);
  CHECK_THROWS_AS(overlay_config_text(spec, R"({"base": {"population": "mixed"}})"), ConfigError);
}

TEST_CASE("sweep size is capped") {
  ExperimentSpec spec = preset("paper-homogeneous");
  spec.seeds = std::vector<std::uint64_t>(17, 1);  // 4 points x 17 seeds = 68 > 64
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.seeds.resize(16);
  CHECK_NOTHROW(spec.validate());
  spec.seeds.clear();
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("config hash tracks every field") {
  SimConfig a;
  SimConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.tcp.t0 = 2.0;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("series round-trip at full precision") {
  const fs::path dir = scratch("series");
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<IterationMetrics> rows;
  for (std::size_t i = 1; i <= 500; ++i) rows.push_back({i, 1000 * u(gen), u(gen) / 3.0, u(gen)});
  emit_series(rows, dir / "a.csv");
  CHECK(count_lines(dir / "a.csv") == 501);
  const auto back = parse_series(dir / "a.csv");
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].iteration == rows[i].iteration);
    CHECK(back[i].delta_r_raw == rows[i].delta_r_raw);
    CHECK(back[i].delta_r_norm == rows[i].delta_r_norm);
    CHECK(back[i].utilization == rows[i].utilization);
  }

  emit_series(std::vector<IterationMetrics>{}, dir / "empty.csv");
  CHECK(slurp(dir / "empty.csv") == std::string(kCsvHeader) + "\n");
  CHECK(parse_series(dir / "empty.csv").empty());
}

TEST_CASE("malformed series are rejected") {
  const fs::path dir = scratch("bad_series");
  std::ofstream(dir / "bad.csv") << "a,b\n";
  CHECK_THROWS_AS(parse_series(dir / "bad.csv"), IoError);
  std::ofstream(dir / "bad2.csv") << kCsvHeader << "\n1,0.5,x,0\n";
  CHECK_THROWS_AS(parse_series(dir / "bad2.csv"), IoError);
  CHECK_THROWS_AS(parse_series(dir / "missing.csv"), IoError);
}

TEST_CASE("simulation series parses back to the in-memory metrics") {
  const fs::path dir = scratch("sim_series");
  SimConfig c;
  c.node_count = 20;
  c.iterations = 25;
  c.acquaintance_iterations = 5;
  const auto report = run_simulation(c);
  emit_series(report, dir / "run.csv");
  const auto back = parse_series(dir / "run.csv");
  REQUIRE(back.size() == 25);
  CHECK(back.front().iteration == 1);
  CHECK(back.front().delta_r_raw == 0.0);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].delta_r_raw == report.metrics[i].delta_r_raw);
    CHECK(back[i].delta_r_norm == report.metrics[i].delta_r_norm);
    CHECK(back[i].utilization == report.metrics[i].utilization);
  }
}

TEST_CASE("experiment writes one series per run plus a manifest") {
  const fs::path dir = scratch("exp_single");
  ExperimentSpec spec;
  spec.base.node_count = 20;
  spec.base.iterations = 15;
  spec.base.acquaintance_iterations = 3;
  spec.seeds = {5};
  spec.output_dir = dir;
  const auto entries = run_experiment(spec);
  REQUIRE(entries.size() == 1);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 2);
  CHECK(fs::exists(dir / entries[0].file));
  CHECK(entries[0].file == "homogeneous_blue_alpha0.1_seed5.csv");

  const auto manifest = read_manifest(dir / kManifestName);
  REQUIRE(manifest.size() == 1);
  CHECK(manifest[0].file == entries[0].file);
  CHECK(manifest[0].seed == 5);
  CHECK(manifest[0].config_hash == entries[0].config_hash);
}

TEST_CASE("experiment output is byte-identical across reruns and job counts") {
  const fs::path a = scratch("exp_a");
  const fs::path b = scratch("exp_b");
  ExperimentSpec spec;
  overlay_config_text(spec, R"({
    "base": {"node_count": 25, "iterations": 20, "acquaintance_iterations": 4},
    "sweeps": {"alpha": [0.1, 0.3], "estimator_kind": ["blue", "baseline"],
               "population": ["homogeneous", "heterogeneous"]},
    "seeds": [1, 2]
  })");
  spec.output_dir = a;
  const auto first = run_experiment(spec);
  CHECK(first.size() == 16);
  spec.output_dir = b;
  spec.jobs = 4;
  const auto second = run_experiment(spec);
  std::set<std::string> hashes;
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].file == second[i].file);
    CHECK(slurp(a / first[i].file) == slurp(b / second[i].file));
    hashes.insert(first[i].config_hash);
  }
  CHECK(hashes.size() == 16);
  CHECK(slurp(a / kManifestName) == slurp(b / kManifestName));
}

TEST_CASE("experiment reports unwritable output") {
  const fs::path dir = scratch("exp_blocked");
  std::ofstream(dir / "file") << "x";
  ExperimentSpec spec;
  spec.base.node_count = 5;
  spec.base.iterations = 2;
  spec.base.acquaintance_iterations = 0;
  spec.output_dir = dir / "file" / "sub";
  CHECK_THROWS_AS(run_experiment(spec), IoError);
}
