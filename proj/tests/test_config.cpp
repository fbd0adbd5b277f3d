#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kgcast/config.hpp"
#include "kgcast/errors.hpp"

using namespace kgcast;

namespace {

std::filesystem::path write_temp_json(const char* name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path;
}

// Clears a KGCAST_* variable on scope exit so env tests cannot leak into
// each other or into later test cases.
struct ScopedEnv {
  std::string name;
  ScopedEnv(const char* n, const char* value) : name(n) { setenv(n, value, 1); }
  ~ScopedEnv() { unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("the defaults tree resolves every typed section") {
  const auto cfg = PipelineConfig::defaults();
  CHECK(cfg.t2() == 9);
  CHECK(cfg.t3() == 6);
  CHECK(cfg.years().first == 2012);
  CHECK(cfg.years().last == 2023);
  CHECK(cfg.path("graph") == std::filesystem::path("out/graph.bin"));
  CHECK(cfg.pagerank().damping == 0.85);
  CHECK(cfg.pagerank().max_iters == 100);

  const DatasetParams d = cfg.dataset();
  CHECK(d.year == 2019);
  CHECK(d.delta == 3);
  CHECK(d.ir == 3);
  CHECK(d.sample_size == 100000);
  CHECK(d.min_positives == 10);

  const Hyperparameters hp = cfg.model();
  CHECK(hp.kind == ModelKind::nn);
  CHECK(hp.standardize);

  const GridSpec grid = cfg.grid();
  REQUIRE(grid.models.size() == 1);
  CHECK(grid.models[0].hidden == std::vector<int>{600, 600, 600});
  REQUIRE(grid.train_intervals.size() == 1);
  CHECK(grid.train_intervals[0].start == 2016);
  CHECK(grid.train_intervals[0].end == 2019);
  CHECK(grid.eval_intervals[0].start == 2019);
  CHECK(grid.irs == std::vector<int64_t>{3});
  CHECK_FALSE(grid.no_retrain);

  const SynthParams sp = cfg.synth();
  CHECK(sp.n_concepts == 200);
  CHECK(sp.mode == SignalMode::planted);

  CHECK(cfg.at("thresholds.t2") == 9);
  CHECK_THROWS_WITH_AS(cfg.at("thresholds.t9"), doctest::Contains("missing config key"), ValidationError);
}

TEST_CASE("the config hash is stable and sensitive") {
  const auto a = PipelineConfig::defaults();
  auto b = PipelineConfig::defaults();
  CHECK(a.hash() == b.hash());
  b.apply_override("dataset.delta=5");
  CHECK(a.hash() != b.hash());

  // A round trip through dump() preserves the resolved tree exactly.
  const auto path = write_temp_json("kgcast_config_dump.json", b.dump());
  CHECK(PipelineConfig::load(path).hash() == b.hash());
  std::filesystem::remove(path);
}

TEST_CASE("a config file overrides defaults key by key") {
  const auto path = write_temp_json("kgcast_config_file.json", R"({
    "thresholds": {"t2": 4},
    "model": {"kind": "logistic", "epochs": 9},
    "paths": {"graph": "elsewhere/graph.bin"}
  })");
  const auto cfg = PipelineConfig::load(path);
  std::filesystem::remove(path);

  CHECK(cfg.t2() == 4);
  CHECK(cfg.t3() == 6);  // untouched keys keep their defaults
  CHECK(cfg.path("graph") == std::filesystem::path("elsewhere/graph.bin"));
  const Hyperparameters hp = cfg.model();
  CHECK(hp.kind == ModelKind::logistic);
  CHECK(hp.epochs == 9);
  CHECK(hp.hidden.empty());
  CHECK(hp.learning_rate == 0.01);
}

TEST_CASE("unknown or malformed config files fail loudly") {
  const auto typo = write_temp_json("kgcast_config_typo.json", R"({"pagerank": {"dampling": 0.9}})");
  CHECK_THROWS_WITH_AS(PipelineConfig::load(typo), doctest::Contains("unknown config key: pagerank.dampling"),
                       ValidationError);
  std::filesystem::remove(typo);

  const auto broken = write_temp_json("kgcast_config_broken.json", "{\"thresholds\": ");
  CHECK_THROWS_WITH_AS(PipelineConfig::load(broken), doctest::Contains("not valid JSON"), ValidationError);
  std::filesystem::remove(broken);

  CHECK_THROWS_WITH_AS(PipelineConfig::load("/nonexistent/kgcast.json"), doctest::Contains("cannot read config file"),
                       ValidationError);
}

TEST_CASE("--set assignments parse JSON values and bare words") {
  auto cfg = PipelineConfig::defaults();
  cfg.apply_override("dataset.delta=5");
  CHECK(cfg.dataset().delta == 5);

  cfg.apply_override("paths.graph=runs/alt.bin");  // bare word stays a string
  CHECK(cfg.path("graph") == std::filesystem::path("runs/alt.bin"));

  cfg.apply_override("grid.irs=[1,5,25]");
  CHECK(cfg.grid().irs == std::vector<int64_t>{1, 5, 25});

  cfg.apply_override("grid.no_retrain=true");
  CHECK(cfg.grid().no_retrain);

  CHECK_THROWS_AS(cfg.apply_override("no-equals-sign"), UsageError);
  CHECK_THROWS_WITH_AS(cfg.apply_override("pagerank.dampling=0.9"),
                       doctest::Contains("unknown config key: pagerank.dampling"), ValidationError);
  CHECK_THROWS_WITH_AS(cfg.apply_override("model=3"), doctest::Contains("is a section, not a value"),
                       ValidationError);
}

TEST_CASE("the model section accepts any hyperparameter sparsely") {
  auto cfg = PipelineConfig::defaults();
  cfg.apply_override("model.kind=forest");
  cfg.apply_override("model.n_trees=7");

  const Hyperparameters hp = cfg.model();
  CHECK(hp.kind == ModelKind::forest);
  CHECK(hp.n_trees == 7);
  CHECK(hp.max_depth == 25);     // kind defaults fill the gaps
  CHECK_FALSE(hp.standardize);   // tree kinds skip standardization

  CHECK_THROWS_WITH_AS(cfg.apply_override("model.n_treez=7"), doctest::Contains("unknown config key"),
                       ValidationError);
}

TEST_CASE("environment variables override the file layer") {
  auto cfg = PipelineConfig::defaults();
  {
    ScopedEnv t2("KGCAST_THRESHOLDS__T2", "3");
    ScopedEnv graph("KGCAST_PATHS__GRAPH", "env/graph.bin");
    cfg.apply_env();
  }
  CHECK(cfg.t2() == 3);
  CHECK(cfg.path("graph") == std::filesystem::path("env/graph.bin"));

  {
    ScopedEnv bogus("KGCAST_NO_SUCH_SECTION", "1");
    auto fresh = PipelineConfig::defaults();
    CHECK_THROWS_WITH_AS(fresh.apply_env(), doctest::Contains("unknown config key"), ValidationError);
  }
}

TEST_CASE("typed getters validate their sections") {
  auto cfg = PipelineConfig::defaults();
  cfg.apply_override("pagerank.damping=1.5");
  CHECK_THROWS_WITH_AS(cfg.pagerank(), doctest::Contains("(0, 1)"), ValidationError);

  cfg = PipelineConfig::defaults();
  cfg.apply_override("dataset.delta=0");
  CHECK_THROWS_WITH_AS(cfg.dataset(), doctest::Contains("delta"), ValidationError);

  cfg = PipelineConfig::defaults();
  cfg.apply_override("dataset.sample_size=0");
  CHECK_THROWS_AS(cfg.dataset(), ValidationError);

  cfg = PipelineConfig::defaults();
  cfg.apply_override("years.last=2010");
  CHECK_THROWS_WITH_AS(cfg.years(), doctest::Contains("precedes"), ValidationError);

  cfg = PipelineConfig::defaults();
  cfg.apply_override("synth.mode=sideways");
  CHECK_THROWS_WITH_AS(cfg.synth(), doctest::Contains("synth.mode"), ValidationError);
  // A bare "null" parses as JSON null, not the string; quote it to pick the
  // null-control mode from the command line.
  cfg.apply_override("synth.mode=null");
  CHECK_THROWS_WITH_AS(cfg.synth(), doctest::Contains("synth.mode"), ValidationError);
  cfg.apply_override("synth.mode=\"null\"");
  CHECK(cfg.synth().mode == SignalMode::null_control);
}

TEST_CASE("grid intervals must be ordered [start, end] pairs") {
  auto cfg = PipelineConfig::defaults();
  cfg.apply_override("grid.train_intervals=[[2016,2016]]");
  CHECK_THROWS_WITH_AS(cfg.grid(), doctest::Contains("interval end must exceed start"), ValidationError);

  cfg = PipelineConfig::defaults();
  cfg.apply_override("grid.train_intervals=[[2016]]");
  CHECK_THROWS_WITH_AS(cfg.grid(), doctest::Contains("[start, end] pair"), ValidationError);

  cfg = PipelineConfig::defaults();
  cfg.apply_override("grid.irs=[]");
  CHECK_THROWS_WITH_AS(cfg.grid(), doctest::Contains("non-empty"), ValidationError);

  cfg = PipelineConfig::defaults();
  cfg.apply_override("grid.models=[]");
  CHECK_THROWS_WITH_AS(cfg.grid(), doctest::Contains("grid.models"), ValidationError);

  // Grid model entries accept a bare kind name or a partial object.
  cfg = PipelineConfig::defaults();
  cfg.apply_override(R"(grid.models=["logistic", {"kind": "boosted", "rounds": 12}])");
  const GridSpec spec = cfg.grid();
  REQUIRE(spec.models.size() == 2);
  CHECK(spec.models[0].kind == ModelKind::logistic);
  CHECK(spec.models[1].kind == ModelKind::boosted);
  CHECK(spec.models[1].rounds == 12);

  cfg = PipelineConfig::defaults();
  cfg.apply_override(R"(grid.models=[{"kind": "nn", "depth": 3}])");
  CHECK_THROWS_WITH_AS(cfg.grid(), doctest::Contains("unknown hyperparameter"), ValidationError);
}
