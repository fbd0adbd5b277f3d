// Drives the installed binary end to end through a scratch directory: the
// happy-path pipeline, exit codes for each failure class, re-run determinism,
// the dry-run plan mode, and lineage verification on tampered inputs.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "kgcast_cli_scratch";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  const fs::path dir = scratch_dir();
  const std::string cmd = "cd '" + dir.string() + "' && '" + KGCAST_BIN + "' " + args +
                          " >cli_out.txt 2>cli_err.txt";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "cli_out.txt");
  r.err = slurp(dir / "cli_err.txt");
  return r;
}

// Every invocation shares one config file: a small corpus the whole chain can
// digest in seconds, with the bundled word lists addressed absolutely.
void write_config() {
  nlohmann::json cfg{
      {"paths",
       {{"stopwords", std::string(KGCAST_ASSET_DIR) + "/stopwords_en.txt"},
        {"filters", std::string(KGCAST_ASSET_DIR) + "/concept_filters.txt"}}},
      {"thresholds", {{"t2", 5}, {"t3", 5}}},
      {"dataset", {{"sample_size", 250}}},
      {"model", {{"kind", "logistic"}, {"epochs", 6}, {"batch_size", 50}}},
      {"synth",
       {{"n_concepts", 40},
        {"n_papers", 200},
        {"concepts_mean", 2.5},
        {"concepts_cap", 4},
        {"alpha", 0.0},
        {"lambda0", 1.0},
        {"tail_shape", 0.5},
        {"seed", 77}}}};
  std::ofstream out(scratch_dir() / "config.json");
  out << cfg.dump(2) << "\n";
}

constexpr const char* kCfg = "--config config.json ";

}  // namespace

TEST_CASE("the pipeline runs end to end in a scratch directory") {
  write_config();

  // Downstream before upstream: a validation failure, not a crash.
  RunResult r = run_cli(std::string(kCfg) + "train");
  CHECK(r.code == 2);
  CHECK(r.err.find("missing upstream: dataset") != std::string::npos);

  r = run_cli(std::string(kCfg) + "synth --out-corpus data/corpus.jsonl");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("synth: 200 papers over 40 concepts") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "data/corpus.jsonl"));
  CHECK(fs::exists(scratch_dir() / "data/corpus.jsonl.meta.json"));
  CHECK(fs::exists(scratch_dir() / "data/synth_truth.csv"));
  CHECK(fs::exists(scratch_dir() / "data/synth_concepts.txt"));

  r = run_cli(std::string(kCfg) + "ingest");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("ingested 200 records (0 rejected)") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "out/corpus.jsonl"));
  CHECK(fs::exists(scratch_dir() / "out/reports/rejections.txt"));

  r = run_cli(std::string(kCfg) + "concepts");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("lexicon holds") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "out/lexicon.tsv"));

  r = run_cli(std::string(kCfg) + "graph");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("graph: ") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "out/graph.bin"));

  r = run_cli(std::string(kCfg) + "features");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("features: 250 pairs at year 2019") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "out/matrices/features_2019.bin"));

  r = run_cli(std::string(kCfg) + "dataset");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("dataset: ") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "out/matrices/dataset_y2019_d3_ir3.bin"));

  r = run_cli(std::string(kCfg) + "dataset --eval");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("evalset: 250 rows") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "out/matrices/evalset_y2019_d3_ir3.bin"));

  r = run_cli(std::string(kCfg) + "train");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("trained logistic") != std::string::npos);
  REQUIRE(fs::exists(scratch_dir() / "out/models/model_logistic_y2019_d3_ir3.bin"));
  const std::string loss = slurp(scratch_dir() / "out/reports/loss_logistic_y2019_d3_ir3.csv");
  CHECK(loss.rfind("epoch,train_loss,test_loss\n", 0) == 0);

  r = run_cli(std::string(kCfg) + "eval");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("eval (eval rows):") != std::string::npos);
  const fs::path report_path = scratch_dir() / "out/reports/eval_logistic_y2019_d3_ir3.json";
  REQUIRE(fs::exists(report_path));
  const nlohmann::json report = nlohmann::json::parse(slurp(report_path));
  CHECK(report.at("model") == "logistic");
  CHECK(report.at("row_set") == "eval");
  CHECK(report.at("rows") == 250);
  CHECK(report.at("positives").get<int64_t>() >= 10);
  CHECK(report.at("auc").get<double>() >= 0.0);
  CHECK(report.at("auc").get<double>() <= 1.0);
  CHECK(report.at("bin_mean_citations").size() == 20);
  CHECK(report.at("topn").size() == 2);  // 10 and 100 fit into 250 rows

  r = run_cli(std::string(kCfg) + "predict");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("scored 250 pairs") != std::string::npos);
  const std::string predictions = slurp(scratch_dir() / "out/reports/predictions_y2019_d3_ir3.csv");
  CHECK(predictions.rfind("rank,concept_a,concept_b,score\n", 0) == 0);
  CHECK(fs::exists(scratch_dir() / "out/reports/predictions_y2019_d3_ir3.csv.meta.json"));

  r = run_cli(std::string(kCfg) + "top-growing --k 5");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("rank,concept_a,concept_b,growth,yearly\n", 0) == 0);

  r = run_cli(std::string(kCfg) + "suggest --top-k 5");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("suggest: kept 5") != std::string::npos);
  const std::string suggestions = slurp(scratch_dir() / "out/reports/suggestions.csv");
  CHECK(suggestions.rfind("rank,concept_a,concept_b,score,cosine,deg_a,deg_b\n", 0) == 0);

  r = run_cli(std::string(kCfg) + "explore");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("explore: 250 pairs") != std::string::npos);
  const std::string explore = slurp(scratch_dir() / "out/reports/explore.csv");
  CHECK(explore.rfind("concept_a,concept_b,score,", 0) == 0);
}

TEST_CASE("re-running a stage reproduces the artifact byte for byte") {
  const fs::path features = scratch_dir() / "out/matrices/features_2019.bin";
  const fs::path dataset = scratch_dir() / "out/matrices/dataset_y2019_d3_ir3.bin";
  REQUIRE(fs::exists(features));
  const std::string features_before = slurp(features);
  const std::string dataset_before = slurp(dataset);

  REQUIRE(run_cli(std::string(kCfg) + "features").code == 0);
  REQUIRE(run_cli(std::string(kCfg) + "dataset").code == 0);

  CHECK(slurp(features) == features_before);
  CHECK(slurp(dataset) == dataset_before);
}

TEST_CASE("dry runs print the plan and write nothing") {
  const RunResult r = run_cli(std::string(kCfg) + "--dry-run dataset --ir 7");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("plan:", 0) == 0);
  CHECK(r.out.find("dataset_y2019_d3_ir7.bin") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch_dir() / "out/matrices/dataset_y2019_d3_ir7.bin"));

  // --set overrides reach the plan too.
  const RunResult s = run_cli(std::string(kCfg) + "--dry-run --set dataset.delta=4 dataset");
  CHECK(s.code == 0);
  CHECK(s.out.find("dataset_y2019_d4_ir3.bin") != std::string::npos);
}

TEST_CASE("failure classes map to distinct exit codes") {
  RunResult r = run_cli("definitely-not-a-subcommand");
  CHECK(r.code == 1);

  r = run_cli(std::string(kCfg) + "--set no-equals-sign ingest");
  CHECK(r.code == 1);
  CHECK(r.err.find("usage error") != std::string::npos);

  r = run_cli("--config no_such_config.json ingest");
  CHECK(r.code == 2);
  CHECK(r.err.find("validation error") != std::string::npos);
  CHECK(r.err.find("cannot read config file") != std::string::npos);

  r = run_cli(std::string(kCfg) + "train --dataset out/matrices/no_such.bin");
  CHECK(r.code == 2);
  CHECK(r.err.find("missing upstream: dataset") != std::string::npos);
}

TEST_CASE("tampered upstream artifacts are refused") {
  // The graph remembers the lexicon it was built from; editing the lexicon
  // afterwards must fail any stage that pairs the two.
  {
    std::ofstream f(scratch_dir() / "out/lexicon.tsv", std::ios::app);
    f << "tampered row\n";
  }
  RunResult r = run_cli(std::string(kCfg) + "suggest --top-k 5");
  CHECK(r.code == 3);
  CHECK(r.err.find("integrity error") != std::string::npos);

  // Same for the feature matrix once its source graph changes underneath it.
  {
    std::ofstream f(scratch_dir() / "out/graph.bin", std::ios::app | std::ios::binary);
    f << 'x';
  }
  r = run_cli(std::string(kCfg) + "dataset");
  CHECK(r.code == 3);
  CHECK(r.err.find("integrity error") != std::string::npos);
}
