// Pipeline driver. Every subcommand wraps one library operation, stamps its
// outputs with the config hash plus input checksums, and verifies the
// checksums recorded by its upstream artifacts, so any report can be traced
// back to the exact files that produced it.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "kgcast/artifact.hpp"
#include "kgcast/bench.hpp"
#include "kgcast/config.hpp"
#include "kgcast/corpus.hpp"
#include "kgcast/dataset.hpp"
#include "kgcast/dates.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/features.hpp"
#include "kgcast/graph.hpp"
#include "kgcast/hash.hpp"
#include "kgcast/lexicon.hpp"
#include "kgcast/matrix.hpp"
#include "kgcast/metrics.hpp"
#include "kgcast/model.hpp"
#include "kgcast/rng.hpp"
#include "kgcast/snapshot.hpp"
#include "kgcast/suggest.hpp"
#include "kgcast/synth.hpp"

namespace fs = std::filesystem;
using namespace kgcast;

namespace {

struct Ctx {
  PipelineConfig cfg = PipelineConfig::defaults();
  int workers = 1;
  bool dry_run = false;
};

// Declared I/O of one subcommand run, printed verbatim under --dry-run.
struct Plan {
  std::string action;
  std::vector<fs::path> reads;
  std::vector<fs::path> writes;
};

// Prints the plan and reports whether execution should be skipped.
bool plan_only(const Ctx& ctx, const Plan& plan) {
  if (!ctx.dry_run) return false;
  std::cout << "plan: " << plan.action << "\n";
  for (const fs::path& p : plan.reads) std::cout << "  read  " << p.string() << "\n";
  for (const fs::path& p : plan.writes) std::cout << "  write " << p.string() << "\n";
  return true;
}

void require_artifact(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path))
    throw ValidationError("missing upstream: " + producer + " (expected " + path.string() + "; run `kgcast " +
                          producer + "` first)");
}

void ensure_parent(const fs::path& path) {
  const fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

ArtifactMeta stage_meta(const Ctx& ctx, const std::string& stage) {
  ArtifactMeta meta;
  meta.stage = stage;
  meta.config_hash = ctx.cfg.hash();
  return meta;
}

void record_input(ArtifactMeta& meta, const std::string& name, const fs::path& path) {
  meta.inputs[name] = checksum_hex(file_checksum(path));
}

void write_text_artifact(const fs::path& path, const std::string& body, const ArtifactMeta& meta) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw IntegrityError("failed writing " + path.string());
  out.close();
  write_meta_sidecar(path, meta);
}

// Canonical artifact names derived from the dataset block, shared by the
// producing and consuming subcommands.
fs::path features_path(const Ctx& ctx, int year) {
  return ctx.cfg.path("matrices") / ("features_" + std::to_string(year) + ".bin");
}

std::string dataset_tag(int year, int delta, int64_t ir) {
  return "y" + std::to_string(year) + "_d" + std::to_string(delta) + "_ir" + std::to_string(ir);
}

fs::path dataset_path(const Ctx& ctx, int year, int delta, int64_t ir) {
  return ctx.cfg.path("matrices") / ("dataset_" + dataset_tag(year, delta, ir) + ".bin");
}

fs::path evalset_path(const Ctx& ctx, int year, int delta, int64_t ir) {
  return ctx.cfg.path("matrices") / ("evalset_" + dataset_tag(year, delta, ir) + ".bin");
}

fs::path model_path(const Ctx& ctx, const Hyperparameters& hp, int year, int delta, int64_t ir) {
  return ctx.cfg.path("models") / ("model_" + model_kind_name(hp.kind) + "_" + dataset_tag(year, delta, ir) + ".bin");
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// ---------------------------------------------------------------- ingest --

int run_ingest(const Ctx& ctx, const std::string& input_override, bool strict) {
  const fs::path input = input_override.empty() ? ctx.cfg.path("corpus") : fs::path(input_override);
  const fs::path output = ctx.cfg.path("ingested");
  const fs::path report = ctx.cfg.path("reports") / "rejections.txt";
  if (plan_only(ctx, {"parse and canonicalize the corpus", {input}, {output, report}})) return 0;

  if (!fs::exists(input)) throw ValidationError("corpus file " + input.string() + " does not exist");
  const ParseResult parsed = load_corpus(input, strict);

  ArtifactMeta meta = stage_meta(ctx, "ingest");
  record_input(meta, "raw_corpus", input);
  meta.params["strict"] = strict;
  meta.params["records"] = parsed.records.size();
  meta.params["rejections"] = parsed.rejections.size();

  ensure_parent(output);
  save_corpus(parsed.records, output);
  write_meta_sidecar(output, meta);
  write_text_artifact(report, rejection_report_text(parsed.rejections), meta);

  std::cout << "ingested " << parsed.records.size() << " records (" << parsed.rejections.size() << " rejected) -> "
            << output.string() << "\n";
  return 0;
}

// -------------------------------------------------------------- concepts --

int run_concepts(const Ctx& ctx) {
  const fs::path corpus_file = ctx.cfg.path("ingested");
  const fs::path stopword_file = ctx.cfg.path("stopwords");
  const fs::path filter_file = ctx.cfg.path("filters");
  const fs::path output = ctx.cfg.path("lexicon");
  if (plan_only(ctx, {"extract concepts and build the lexicon", {corpus_file, stopword_file, filter_file}, {output}}))
    return 0;

  require_artifact(corpus_file, "ingest");
  if (!fs::exists(stopword_file)) throw ValidationError("stopword file " + stopword_file.string() + " does not exist");
  if (!fs::exists(filter_file)) throw ValidationError("filter file " + filter_file.string() + " does not exist");

  const std::vector<PaperRecord> records = load_corpus(corpus_file, true).records;
  const StopwordSet stopwords = load_stopwords(stopword_file);
  const std::vector<std::regex> filters = load_filters(filter_file);
  const ConceptLexicon lexicon = build_lexicon(records, stopwords, ctx.cfg.t2(), ctx.cfg.t3(), filters);

  ArtifactMeta meta = stage_meta(ctx, "concepts");
  record_input(meta, "corpus", corpus_file);
  record_input(meta, "stopwords", stopword_file);
  record_input(meta, "filters", filter_file);
  meta.params["t2"] = ctx.cfg.t2();
  meta.params["t3"] = ctx.cfg.t3();
  meta.params["concepts"] = lexicon.size();

  ensure_parent(output);
  lexicon.save(output);
  write_meta_sidecar(output, meta);

  std::cout << "lexicon holds " << lexicon.size() << " concepts (checksum " << checksum_hex(lexicon.checksum())
            << ") -> " << output.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- graph --

int run_graph(const Ctx& ctx) {
  const fs::path corpus_file = ctx.cfg.path("ingested");
  const fs::path lexicon_file = ctx.cfg.path("lexicon");
  const fs::path output = ctx.cfg.path("graph");
  if (plan_only(ctx, {"build the evolving co-mention graph", {corpus_file, lexicon_file}, {output}})) return 0;

  require_artifact(corpus_file, "ingest");
  require_artifact(lexicon_file, "concepts");
  // The lexicon must have been built from this same corpus.
  verify_input_checksum(read_meta_sidecar(lexicon_file), "corpus", corpus_file);

  const std::vector<PaperRecord> records = load_corpus(corpus_file, true).records;
  const ConceptLexicon lexicon = ConceptLexicon::load(lexicon_file);
  const EvolvingGraph graph = EvolvingGraph::build(records, lexicon, ctx.cfg.years());

  ArtifactMeta meta = stage_meta(ctx, "graph");
  record_input(meta, "corpus", corpus_file);
  record_input(meta, "lexicon", lexicon_file);
  ensure_parent(output);
  graph.save(output, meta);

  std::cout << "graph: " << graph.num_vertices() << " vertices, " << graph.edges().size() << " edges from "
            << graph.papers().size() << " contributing papers -> " << output.string() << "\n";
  return 0;
}

// -------------------------------------------------------------- snapshot --

int run_snapshot(const Ctx& ctx, int year, int64_t day_override) {
  const fs::path graph_file = ctx.cfg.path("graph");
  const bool by_day = day_override >= 0;
  const fs::path output = ctx.cfg.path("matrices") /
                          (by_day ? "snapshot_day" + std::to_string(day_override) + ".bin"
                                  : "snapshot_" + std::to_string(year) + ".bin");
  if (plan_only(ctx, {"freeze one graph snapshot", {graph_file}, {output}})) return 0;

  require_artifact(graph_file, "graph");
  const EvolvingGraph graph = EvolvingGraph::load(graph_file);
  const int64_t cutoff = by_day ? day_override : date_to_days(year, 12, 31);
  const GraphSnapshot snap = GraphSnapshot::build(graph, cutoff);
  snap.pagerank(ctx.cfg.pagerank());  // computed here so readers get it for free

  ArtifactMeta meta = stage_meta(ctx, "snapshot");
  record_input(meta, "graph", graph_file);
  meta.params["cutoff_day"] = cutoff;
  ensure_parent(output);
  snap.save(output, meta);

  std::cout << "snapshot at day " << cutoff << ": " << snap.num_vertices() << " vertices, " << snap.num_edges()
            << " connected pairs, pagerank " << (snap.pagerank_converged() ? "converged" : "NOT converged") << " -> "
            << output.string() << "\n";
  return 0;
}

// -------------------------------------------------------------- features --

int run_features(const Ctx& ctx, int year) {
  const fs::path graph_file = ctx.cfg.path("graph");
  const fs::path output = features_path(ctx, year);
  if (plan_only(ctx, {"sample unconnected pairs and compute their feature rows", {graph_file}, {output}})) return 0;

  require_artifact(graph_file, "graph");
  const DatasetParams d = ctx.cfg.dataset();
  const EvolvingGraph graph = EvolvingGraph::load(graph_file);
  const SnapshotTrio trio = SnapshotTrio::build(graph, year, ctx.cfg.pagerank());
  const uint64_t sample_seed = derive_seed(d.seed, "sample", uint64_t(year));
  std::vector<std::pair<int32_t, int32_t>> pairs = sample_unconnected(trio.at(0), d.sample_size, sample_seed);
  const FeatureMatrix matrix = make_feature_matrix(trio, std::move(pairs), ctx.workers);

  ArtifactMeta meta = stage_meta(ctx, "features");
  record_input(meta, "graph", graph_file);
  meta.params["year"] = year;
  meta.params["sample_size"] = d.sample_size;
  meta.params["sample_seed"] = sample_seed;
  ensure_parent(output);
  matrix.save(output, meta);

  std::cout << "features: " << matrix.rows() << " pairs at year " << year << ", layout "
            << checksum_hex(matrix.layout_checksum) << " -> " << output.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- dataset --

int run_dataset(const Ctx& ctx, int year, int delta, int64_t ir, bool eval_role) {
  const fs::path graph_file = ctx.cfg.path("graph");
  const fs::path matrix_file = features_path(ctx, year);
  const fs::path output = eval_role ? evalset_path(ctx, year, delta, ir) : dataset_path(ctx, year, delta, ir);
  if (plan_only(ctx, {eval_role ? "label the sampled pairs for evaluation"
                                : "label the sampled pairs and cut the balanced 85/15 split",
                      {graph_file, matrix_file},
                      {output}}))
    return 0;

  require_artifact(graph_file, "graph");
  require_artifact(matrix_file, "features");
  ArtifactMeta features_meta;
  FeatureMatrix matrix = FeatureMatrix::load(matrix_file, &features_meta);
  // The feature rows must come from the same graph we label from.
  verify_input_checksum(features_meta, "graph", graph_file);

  const DatasetParams d = ctx.cfg.dataset();
  const EvolvingGraph graph = EvolvingGraph::load(graph_file);
  const std::vector<LabeledPair> labeled = label_pairs(graph, matrix.pairs, year, delta, ir);
  int64_t positives = 0;
  for (const LabeledPair& lp : labeled) positives += lp.label ? 1 : 0;

  FeatureMatrix out;
  if (eval_role) {
    out = std::move(matrix);
    out.future_citations.resize(labeled.size());
    out.labels.resize(labeled.size());
    out.roles.assign(labeled.size(), uint8_t(RowRole::eval));
    for (size_t i = 0; i < labeled.size(); ++i) {
      out.future_citations[i] = labeled[i].future_citations;
      out.labels[i] = labeled[i].label ? 1 : 0;
    }
  } else {
    const uint64_t split_seed = derive_seed(d.seed, "balance", uint64_t(year));
    const SplitIndices split = balanced_build(labeled, split_seed, d.min_positives);
    std::vector<uint32_t> order = split.train;
    order.insert(order.end(), split.test.begin(), split.test.end());
    out = gather_rows(matrix, order);
    out.future_citations.resize(order.size());
    out.labels.resize(order.size());
    out.roles.resize(order.size());
    for (size_t i = 0; i < order.size(); ++i) {
      const LabeledPair& lp = labeled[order[i]];
      out.future_citations[i] = lp.future_citations;
      out.labels[i] = lp.label ? 1 : 0;
      out.roles[i] = uint8_t(i < split.train.size() ? RowRole::train : RowRole::test);
    }
    out.seed = split_seed;
  }
  out.delta = delta;
  out.ir = ir;

  ArtifactMeta meta = stage_meta(ctx, "dataset");
  record_input(meta, "graph", graph_file);
  record_input(meta, "features", matrix_file);
  meta.params["year"] = year;
  meta.params["delta"] = delta;
  meta.params["ir"] = ir;
  meta.params["positives"] = positives;
  ensure_parent(output);
  out.save(output, meta);

  std::cout << (eval_role ? "evalset: " : "dataset: ") << out.rows() << " rows (" << positives << " of "
            << labeled.size() << " sampled pairs positive at ir=" << ir << ") -> " << output.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- train --

int run_train(const Ctx& ctx, const std::string& dataset_override, const std::string& out_override) {
  const DatasetParams d = ctx.cfg.dataset();
  Hyperparameters hp = ctx.cfg.model();
  const fs::path input =
      dataset_override.empty() ? dataset_path(ctx, d.year, d.delta, d.ir) : fs::path(dataset_override);
  const fs::path output = out_override.empty() ? model_path(ctx, hp, d.year, d.delta, d.ir) : fs::path(out_override);
  const fs::path loss_csv =
      ctx.cfg.path("reports") / ("loss_" + model_kind_name(hp.kind) + "_" + dataset_tag(d.year, d.delta, d.ir) + ".csv");
  if (plan_only(ctx, {"train a " + model_kind_name(hp.kind) + " classifier", {input}, {output, loss_csv}})) return 0;

  require_artifact(input, "dataset");
  const FeatureMatrix data = FeatureMatrix::load(input);
  ModelArtifact model = train_model(data, hp);
  model.meta.year = data.year;
  model.meta.delta = data.delta;
  model.meta.ir = data.ir;
  model.meta.dataset_seed = data.seed;

  ArtifactMeta meta = stage_meta(ctx, "train");
  record_input(meta, "dataset", input);
  ensure_parent(output);
  model.save(output, meta);

  std::ostringstream csv;
  export_loss_csv(model, csv);
  write_text_artifact(loss_csv, csv.str(), meta);

  const size_t best = size_t(model.meta.best_epoch);
  std::cout << "trained " << model_kind_name(hp.kind) << ": best stage " << model.meta.best_epoch + 1 << "/"
            << model.meta.train_loss.size() << ", train loss " << model.meta.train_loss.at(best) << ", test loss "
            << model.meta.test_loss.at(best) << " -> " << output.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- predict --

int run_predict(const Ctx& ctx, const std::string& model_override, const std::string& matrix_override,
                const std::string& out_override) {
  const DatasetParams d = ctx.cfg.dataset();
  const Hyperparameters hp = ctx.cfg.model();
  const fs::path model_file =
      model_override.empty() ? model_path(ctx, hp, d.year, d.delta, d.ir) : fs::path(model_override);
  const fs::path matrix_file = matrix_override.empty() ? features_path(ctx, d.year) : fs::path(matrix_override);
  const fs::path lexicon_file = ctx.cfg.path("lexicon");
  const fs::path output = out_override.empty()
                              ? ctx.cfg.path("reports") / ("predictions_" + dataset_tag(d.year, d.delta, d.ir) + ".csv")
                              : fs::path(out_override);
  if (plan_only(ctx, {"score feature rows with a trained model", {model_file, matrix_file, lexicon_file}, {output}}))
    return 0;

  require_artifact(model_file, "train");
  require_artifact(matrix_file, "features");
  require_artifact(lexicon_file, "concepts");
  const ModelArtifact model = ModelArtifact::load(model_file);
  const FeatureMatrix matrix = FeatureMatrix::load(matrix_file);
  const ConceptLexicon lexicon = ConceptLexicon::load(lexicon_file);
  const std::vector<double> scores = predict(model, matrix, ctx.workers);

  std::vector<uint32_t> order(scores.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return scores[a] > scores[b]; });

  std::ostringstream csv;
  csv << "rank,concept_a,concept_b,score\n";
  for (size_t r = 0; r < order.size(); ++r) {
    const auto& [u, v] = matrix.pairs[order[r]];
    csv << r + 1 << ',' << csv_quote(lexicon.entry(u).phrase) << ',' << csv_quote(lexicon.entry(v).phrase) << ','
        << scores[order[r]] << "\n";
  }

  ArtifactMeta meta = stage_meta(ctx, "predict");
  record_input(meta, "model", model_file);
  record_input(meta, "features", matrix_file);
  record_input(meta, "lexicon", lexicon_file);
  write_text_artifact(output, csv.str(), meta);

  std::cout << "scored " << scores.size() << " pairs -> " << output.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ eval --

int run_eval(const Ctx& ctx, const std::string& model_override, const std::string& matrix_override,
             const std::string& out_override, int n_bins) {
  const DatasetParams d = ctx.cfg.dataset();
  const Hyperparameters hp = ctx.cfg.model();
  const fs::path model_file =
      model_override.empty() ? model_path(ctx, hp, d.year, d.delta, d.ir) : fs::path(model_override);
  fs::path matrix_file;
  if (!matrix_override.empty()) {
    matrix_file = fs::path(matrix_override);
  } else if (fs::exists(evalset_path(ctx, d.year, d.delta, d.ir))) {
    matrix_file = evalset_path(ctx, d.year, d.delta, d.ir);
  } else {
    matrix_file = dataset_path(ctx, d.year, d.delta, d.ir);
  }
  const fs::path output =
      out_override.empty()
          ? ctx.cfg.path("reports") /
                ("eval_" + model_kind_name(hp.kind) + "_" + dataset_tag(d.year, d.delta, d.ir) + ".json")
          : fs::path(out_override);
  if (plan_only(ctx, {"evaluate a trained model", {model_file, matrix_file}, {output}})) return 0;

  require_artifact(model_file, "train");
  require_artifact(matrix_file, "dataset");
  const ModelArtifact model = ModelArtifact::load(model_file);
  const FeatureMatrix data = FeatureMatrix::load(matrix_file);
  if (!data.has_labels()) throw ValidationError("evaluation needs a labeled matrix; run `kgcast dataset` first");

  // Held-out rows when present, otherwise everything the file offers.
  std::vector<uint32_t> rows = data.rows_with_role(RowRole::eval);
  std::string row_note = "eval";
  if (rows.empty()) {
    rows = data.rows_with_role(RowRole::test);
    row_note = "test";
  }
  if (rows.empty()) {
    rows.resize(data.rows());
    for (uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
    row_note = "all";
  }

  const FeatureMatrix subset = gather_rows(data, rows);
  const std::vector<double> scores = predict(model, subset, ctx.workers);
  const std::vector<uint8_t>& labels = subset.labels;
  int64_t positives = 0;
  for (uint8_t l : labels) positives += l;

  const double auc_value = auc(scores, labels);
  const RocCurve roc = roc_curve(scores, labels);
  const std::vector<double> bins = bin_report(scores, subset.future_citations, n_bins);
  std::vector<uint64_t> top_ns;
  for (uint64_t n : {uint64_t(10), uint64_t(100), uint64_t(1000)}) {
    if (n <= scores.size()) top_ns.push_back(n);
  }
  const auto topn = topn_mean(scores, subset.future_citations, top_ns);

  nlohmann::json report{{"model", model_kind_name(model.hp.kind)},
                        {"rows", rows.size()},
                        {"row_set", row_note},
                        {"positives", positives},
                        {"negatives", int64_t(rows.size()) - positives},
                        {"year", data.year},
                        {"delta", data.delta},
                        {"ir", data.ir},
                        {"auc", auc_value},
                        {"auc_trapezoid", roc.auc_trapezoid},
                        {"bin_mean_citations", bins}};
  nlohmann::json topn_json = nlohmann::json::array();
  for (const auto& [n, mean] : topn) topn_json.push_back({{"n", n}, {"mean_citations", mean}});
  report["topn"] = topn_json;

  ArtifactMeta meta = stage_meta(ctx, "eval");
  record_input(meta, "model", model_file);
  record_input(meta, "dataset", matrix_file);
  write_text_artifact(output, report.dump(2) + "\n", meta);

  std::cout << "eval (" << row_note << " rows): AUC " << auc_value << " on " << rows.size() << " rows (" << positives
            << " positives) -> " << output.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- bench --

int run_bench(const Ctx& ctx, bool scan, const std::string& scan_train, const std::string& scan_eval,
              const std::string& out_override) {
  if (scan) {
    const DatasetParams d = ctx.cfg.dataset();
    const fs::path train_file =
        scan_train.empty() ? dataset_path(ctx, d.year, d.delta, d.ir) : fs::path(scan_train);
    const fs::path eval_file = scan_eval.empty() ? evalset_path(ctx, d.year, d.delta, d.ir) : fs::path(scan_eval);
    const fs::path output =
        out_override.empty() ? ctx.cfg.path("reports") / "feature_auc.csv" : fs::path(out_override);
    if (plan_only(ctx, {"rank every feature by its single-feature AUC", {train_file, eval_file}, {output}})) return 0;

    require_artifact(train_file, "dataset");
    require_artifact(eval_file, "dataset");
    const FeatureMatrix train_data = FeatureMatrix::load(train_file);
    const FeatureMatrix eval_data = FeatureMatrix::load(eval_file);
    const std::vector<FeatureAuc> rows = per_feature_auc(train_data, eval_data, ctx.cfg.model());

    std::ostringstream csv;
    write_feature_auc_csv(rows, csv);
    ArtifactMeta meta = stage_meta(ctx, "bench");
    record_input(meta, "train", train_file);
    record_input(meta, "eval", eval_file);
    write_text_artifact(output, csv.str(), meta);

    std::cout << "feature scan: best " << rows.front().name << " (AUC " << rows.front().auc_value << ") -> "
              << output.string() << "\n";
    return 0;
  }

  const fs::path graph_file = ctx.cfg.path("graph");
  const fs::path output = out_override.empty() ? ctx.cfg.path("reports") / "grid.csv" : fs::path(out_override);
  if (plan_only(ctx, {"run the model x interval x impact-range benchmark grid", {graph_file}, {output}})) return 0;

  require_artifact(graph_file, "graph");
  const EvolvingGraph graph = EvolvingGraph::load(graph_file);
  GridSpec spec = ctx.cfg.grid();
  spec.workers = ctx.workers;
  const std::vector<BenchmarkCell> cells = benchmark_grid(graph, spec);

  std::ostringstream csv;
  write_grid_csv(cells, csv);
  ArtifactMeta meta = stage_meta(ctx, "bench");
  record_input(meta, "graph", graph_file);
  write_text_artifact(output, csv.str(), meta);

  size_t skipped = 0;
  for (const BenchmarkCell& c : cells) skipped += c.skipped ? 1 : 0;
  std::cout << "grid: " << cells.size() << " cells, " << skipped << " skipped -> " << output.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- suggest --

int run_suggest(const Ctx& ctx, int year, const std::string& model_override, const std::string& set_a_file,
                const std::string& set_b_file, double max_cosine, double min_degree, double max_degree, int64_t top_k,
                const std::string& out_override) {
  const DatasetParams d = ctx.cfg.dataset();
  const Hyperparameters hp = ctx.cfg.model();
  const fs::path graph_file = ctx.cfg.path("graph");
  const fs::path lexicon_file = ctx.cfg.path("lexicon");
  const fs::path model_file =
      model_override.empty() ? model_path(ctx, hp, d.year, d.delta, d.ir) : fs::path(model_override);
  const fs::path output = out_override.empty() ? ctx.cfg.path("reports") / "suggestions.csv" : fs::path(out_override);

  Plan plan{"rank unconnected pairs for suggestion", {graph_file, lexicon_file, model_file}, {output}};
  if (!set_a_file.empty()) plan.reads.push_back(set_a_file);
  if (!set_b_file.empty()) plan.reads.push_back(set_b_file);
  if (plan_only(ctx, plan)) return 0;

  require_artifact(graph_file, "graph");
  require_artifact(lexicon_file, "concepts");
  require_artifact(model_file, "train");
  // The graph must descend from this lexicon, or concept ids mean different
  // phrases here and there.
  ArtifactMeta graph_meta;
  const EvolvingGraph graph = EvolvingGraph::load(graph_file, &graph_meta);
  verify_input_checksum(graph_meta, "lexicon", lexicon_file);
  const ConceptLexicon lexicon = ConceptLexicon::load(lexicon_file);
  const ModelArtifact model = ModelArtifact::load(model_file);
  const SnapshotTrio trio = SnapshotTrio::build(graph, year, ctx.cfg.pagerank());

  SuggestionQuery query;
  query.top_k = top_k;
  if (max_cosine >= 0.0) query.max_cosine = max_cosine;
  if (min_degree >= 0.0) query.min_degree = min_degree;
  if (max_degree >= 0.0) query.max_degree = max_degree;
  auto load_set = [&](const std::string& file, const char* which) -> std::vector<int32_t> {
    auto [ids, unresolved] = load_concept_set(file, lexicon);
    for (const std::string& line : unresolved)
      std::cerr << "warning: " << which << " phrase not in lexicon: " << line << "\n";
    if (ids.empty()) throw ValidationError(std::string("concept set ") + file + " resolves to no lexicon entries");
    return ids;
  };
  if (!set_a_file.empty()) query.set_a = load_set(set_a_file, "set-a");
  if (!set_b_file.empty()) query.set_b = load_set(set_b_file, "set-b");

  const SuggestResult result = rank_pairs(trio, model, query, ctx.workers);

  std::ostringstream csv;
  write_suggestions_csv(result, lexicon, csv);
  ArtifactMeta meta = stage_meta(ctx, "suggest");
  record_input(meta, "graph", graph_file);
  record_input(meta, "lexicon", lexicon_file);
  record_input(meta, "model", model_file);
  meta.params["year"] = year;
  write_text_artifact(output, csv.str(), meta);

  std::cout << "suggest: kept " << result.top.size() << " of " << result.scored << " scored (" << result.candidates
            << " candidates) -> " << output.string() << "\n";
  for (size_t i = 0; i < result.top.size() && i < 5; ++i) {
    const Suggestion& s = result.top[i];
    std::cout << "  " << i + 1 << ". " << lexicon.entry(s.u).phrase << " + " << lexicon.entry(s.v).phrase
              << "  score " << s.score << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- explore --

int run_explore(const Ctx& ctx, const std::string& model_override, const std::string& matrix_override,
                const std::string& out_override) {
  const DatasetParams d = ctx.cfg.dataset();
  const Hyperparameters hp = ctx.cfg.model();
  const fs::path model_file =
      model_override.empty() ? model_path(ctx, hp, d.year, d.delta, d.ir) : fs::path(model_override);
  const fs::path matrix_file = matrix_override.empty() ? features_path(ctx, d.year) : fs::path(matrix_override);
  const fs::path lexicon_file = ctx.cfg.path("lexicon");
  const fs::path output = out_override.empty() ? ctx.cfg.path("reports") / "explore.csv" : fs::path(out_override);
  if (plan_only(ctx,
                {"export per-pair scatter data (score vs interpretable features)",
                 {model_file, matrix_file, lexicon_file},
                 {output}}))
    return 0;

  require_artifact(model_file, "train");
  require_artifact(matrix_file, "features");
  require_artifact(lexicon_file, "concepts");
  const ModelArtifact model = ModelArtifact::load(model_file);
  const FeatureMatrix matrix = FeatureMatrix::load(matrix_file);
  const ConceptLexicon lexicon = ConceptLexicon::load(lexicon_file);
  const std::vector<double> scores = predict(model, matrix, ctx.workers);

  std::ostringstream csv;
  write_explore_csv(lexicon, matrix, scores, csv);
  ArtifactMeta meta = stage_meta(ctx, "explore");
  record_input(meta, "model", model_file);
  record_input(meta, "features", matrix_file);
  record_input(meta, "lexicon", lexicon_file);
  write_text_artifact(output, csv.str(), meta);

  std::cout << "explore: " << matrix.rows() << " pairs -> " << output.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- synth --

int run_synth(const Ctx& ctx, const std::string& out_corpus, const std::string& out_truth,
              const std::string& out_concepts) {
  const fs::path corpus_file = out_corpus.empty() ? fs::path("data/synth_corpus.jsonl") : fs::path(out_corpus);
  const fs::path truth_file = out_truth.empty() ? fs::path("data/synth_truth.csv") : fs::path(out_truth);
  const fs::path concepts_file = out_concepts.empty() ? fs::path("data/synth_concepts.txt") : fs::path(out_concepts);
  if (plan_only(ctx, {"generate a synthetic corpus with planted pair quality", {}, {corpus_file, truth_file, concepts_file}}))
    return 0;

  const SynthParams params = ctx.cfg.synth();
  const SynthOutput out = generate_corpus(params);

  ArtifactMeta meta = stage_meta(ctx, "synth");
  meta.params = ctx.cfg.at("synth");

  ensure_parent(corpus_file);
  save_corpus(out.papers, corpus_file);
  write_meta_sidecar(corpus_file, meta);

  std::ostringstream truth;
  write_ground_truth_csv(out, truth);
  write_text_artifact(truth_file, truth.str(), meta);

  std::ostringstream concepts;
  write_concepts_txt(out, concepts);
  write_text_artifact(concepts_file, concepts.str(), meta);

  std::cout << "synth: " << out.papers.size() << " papers over " << out.phrases.size() << " concepts (seed "
            << params.seed << ", " << (params.mode == SignalMode::planted ? "planted" : "null") << ") -> "
            << corpus_file.string() << "\n";
  return 0;
}

// ----------------------------------------------------------- top-growing --

int run_top_growing(const Ctx& ctx, int y1, int y2, int64_t k, bool pairs_mode, const std::string& out_override) {
  const fs::path graph_file = ctx.cfg.path("graph");
  const fs::path lexicon_file = ctx.cfg.path("lexicon");
  Plan plan{"list the fastest-growing concepts or pairs", {graph_file, lexicon_file}, {}};
  if (!out_override.empty()) plan.writes.push_back(out_override);
  if (plan_only(ctx, plan)) return 0;

  require_artifact(graph_file, "graph");
  require_artifact(lexicon_file, "concepts");
  const EvolvingGraph graph = EvolvingGraph::load(graph_file);
  const ConceptLexicon lexicon = ConceptLexicon::load(lexicon_file);
  const std::vector<TrajectoryEntry> entries =
      pairs_mode ? graph.top_growing_pairs(y1, y2, k) : graph.top_growing_concepts(y1, y2, k);

  std::ostringstream csv;
  csv << "rank,concept_a,concept_b,growth,yearly\n";
  for (size_t i = 0; i < entries.size(); ++i) {
    const TrajectoryEntry& e = entries[i];
    csv << i + 1 << ',' << csv_quote(lexicon.entry(e.u).phrase) << ',';
    if (e.v >= 0) csv << csv_quote(lexicon.entry(e.v).phrase);
    csv << ',' << e.growth << ',';
    for (size_t t = 0; t < e.yearly.size(); ++t) csv << (t ? ";" : "") << e.yearly[t];
    csv << "\n";
  }

  if (out_override.empty()) {
    std::cout << csv.str();
  } else {
    ArtifactMeta meta = stage_meta(ctx, "top-growing");
    record_input(meta, "graph", graph_file);
    record_input(meta, "lexicon", lexicon_file);
    meta.params["y1"] = y1;
    meta.params["y2"] = y2;
    meta.params["k"] = k;
    meta.params["pairs"] = pairs_mode;
    write_text_artifact(out_override, csv.str(), meta);
    std::cout << "top-growing: " << entries.size() << " rows -> " << out_override << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolving knowledge-graph pipeline: ingest papers, extract concepts, build snapshots, train and apply"
               " citation-impact forecasters"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::vector<std::string> overrides;
  int workers = int(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  bool dry_run = false;
  app.add_option("--config", config_file, "JSON config file merged over the built-in defaults");
  app.add_option("--set", overrides, "Override one config key, e.g. --set dataset.year=2018 (flags win)");
  app.add_option("--workers", workers, "Worker threads for parallel stages (1 = fully serial)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--dry-run", dry_run, "Print the execution plan without reading or writing artifacts");

  // ingest
  auto* c_ingest = app.add_subcommand("ingest", "Parse the raw corpus into canonical records plus a rejection report");
  std::string ingest_input;
  bool ingest_strict = false;
  c_ingest->add_option("--input", ingest_input, "Raw corpus path (default: paths.corpus)");
  c_ingest->add_flag("--strict", ingest_strict, "Fail on the first rejected record");

  // concepts
  auto* c_concepts = app.add_subcommand("concepts", "Extract candidate phrases and build the concept lexicon");

  // graph
  auto* c_graph = app.add_subcommand("graph", "Build the evolving co-mention multigraph");

  // snapshot
  auto* c_snapshot = app.add_subcommand("snapshot", "Freeze and store one aggregated snapshot");
  int snap_year = 0;
  int64_t snap_day = -1;
  c_snapshot->add_option("--year", snap_year, "Cutoff = December 31 of this year (default: dataset.year)");
  c_snapshot->add_option("--day", snap_day, "Exact cutoff day (overrides --year)");

  // features
  auto* c_features = app.add_subcommand("features", "Sample unconnected pairs and compute their feature rows");
  int feat_year = 0;
  c_features->add_option("--year", feat_year, "Snapshot year (default: dataset.year)");

  // dataset
  auto* c_dataset = app.add_subcommand("dataset", "Label sampled pairs and cut the balanced train/test split");
  int ds_year = 0, ds_delta = 0;
  int64_t ds_ir = 0;
  bool ds_eval = false;
  c_dataset->add_option("--year", ds_year, "Snapshot year (default: dataset.year)");
  c_dataset->add_option("--delta", ds_delta, "Label horizon in years (default: dataset.delta)");
  c_dataset->add_option("--ir", ds_ir, "Impact range: citations needed for a positive (default: dataset.ir)");
  c_dataset->add_flag("--eval", ds_eval, "Keep every sampled pair, labeled, with the eval role (no split)");

  // train
  auto* c_train = app.add_subcommand("train", "Train the configured model on a dataset");
  std::string train_dataset, train_out;
  c_train->add_option("--dataset", train_dataset, "Dataset matrix (default: derived from the dataset config)");
  c_train->add_option("--out", train_out, "Model output path (default: derived from kind and dataset config)");

  // predict
  auto* c_predict = app.add_subcommand("predict", "Score a feature matrix with a trained model");
  std::string pred_model, pred_matrix, pred_out;
  c_predict->add_option("--model", pred_model, "Model artifact (default: derived)");
  c_predict->add_option("--matrix", pred_matrix, "Feature matrix (default: derived)");
  c_predict->add_option("--out", pred_out, "Output CSV (default: under paths.reports)");

  // eval
  auto* c_eval = app.add_subcommand("eval", "Compute AUC, the ROC curve, and the sorted-bin citation report");
  std::string eval_model, eval_matrix, eval_out;
  int eval_bins = 20;
  c_eval->add_option("--model", eval_model, "Model artifact (default: derived)");
  c_eval->add_option("--matrix", eval_matrix, "Labeled matrix (default: evalset if present, else dataset)");
  c_eval->add_option("--out", eval_out, "Report JSON (default: under paths.reports)");
  c_eval->add_option("--bins", eval_bins, "Sorted-score bins in the citation report")->check(CLI::PositiveNumber);

  // bench
  auto* c_bench = app.add_subcommand("bench", "Run the benchmark grid (or the per-feature AUC scan with --scan)");
  bool bench_scan = false;
  std::string bench_train, bench_eval, bench_out;
  c_bench->add_flag("--scan", bench_scan, "Rank individual features by single-feature AUC instead");
  c_bench->add_option("--scan-train", bench_train, "Training matrix for --scan (default: the dataset matrix)");
  c_bench->add_option("--scan-eval", bench_eval, "Evaluation matrix for --scan (default: the evalset matrix)");
  c_bench->add_option("--out", bench_out, "Output CSV (default: under paths.reports)");

  // suggest
  auto* c_suggest = app.add_subcommand("suggest", "Rank unconnected concept pairs, optionally within concept sets");
  int sug_year = 0;
  std::string sug_model, sug_a, sug_b, sug_out;
  double sug_max_cos = -1.0, sug_min_deg = -1.0, sug_max_deg = -1.0;
  int64_t sug_top_k = 100;
  c_suggest->add_option("--year", sug_year, "Snapshot year (default: dataset.year)");
  c_suggest->add_option("--model", sug_model, "Model artifact (default: derived)");
  c_suggest->add_option("--set-a", sug_a, "File of phrases; pair endpoint A must come from it");
  c_suggest->add_option("--set-b", sug_b, "File of phrases; pair endpoint B must come from it");
  c_suggest->add_option("--max-cosine", sug_max_cos, "Keep pairs with cosine similarity at most this");
  c_suggest->add_option("--min-degree", sug_min_deg, "Both endpoints need at least this many neighbors");
  c_suggest->add_option("--max-degree", sug_max_deg, "Both endpoints may have at most this many neighbors");
  c_suggest->add_option("--top-k", sug_top_k, "Suggestions to keep")->check(CLI::PositiveNumber);
  c_suggest->add_option("--out", sug_out, "Output CSV (default: under paths.reports)");

  // explore
  auto* c_explore = app.add_subcommand("explore", "Export scatter data: model score vs interpretable pair features");
  std::string exp_model, exp_matrix, exp_out;
  c_explore->add_option("--model", exp_model, "Model artifact (default: derived)");
  c_explore->add_option("--matrix", exp_matrix, "Feature matrix (default: derived)");
  c_explore->add_option("--out", exp_out, "Output CSV (default: under paths.reports)");

  // synth
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted pair quality");
  std::string synth_corpus, synth_truth, synth_concepts;
  c_synth->add_option("--out-corpus", synth_corpus, "Corpus JSONL output (default: data/synth_corpus.jsonl)");
  c_synth->add_option("--out-truth", synth_truth, "Ground-truth CSV output (default: data/synth_truth.csv)");
  c_synth->add_option("--out-concepts", synth_concepts, "Concept list output (default: data/synth_concepts.txt)");

  // top-growing
  auto* c_top = app.add_subcommand("top-growing", "List the concepts or pairs with the largest edge growth");
  int top_y1 = 0, top_y2 = 0;
  int64_t top_k = 20;
  bool top_pairs = false;
  std::string top_out;
  c_top->add_option("--y1", top_y1, "Window start year (default: years.first)");
  c_top->add_option("--y2", top_y2, "Window end year (default: years.last)");
  c_top->add_option("--k", top_k, "Entries to keep")->check(CLI::PositiveNumber);
  c_top->add_flag("--pairs", top_pairs, "Rank concept pairs instead of single concepts");
  c_top->add_option("--out", top_out, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);

    Ctx ctx;
    if (!config_file.empty()) ctx.cfg = PipelineConfig::load(config_file);
    ctx.cfg.apply_env();
    for (const std::string& assignment : overrides) ctx.cfg.apply_override(assignment);
    ctx.workers = workers;
    ctx.dry_run = dry_run;
    const DatasetParams d = ctx.cfg.dataset();
    const YearRange yr = ctx.cfg.years();

    if (c_ingest->parsed()) return run_ingest(ctx, ingest_input, ingest_strict);
    if (c_concepts->parsed()) return run_concepts(ctx);
    if (c_graph->parsed()) return run_graph(ctx);
    if (c_snapshot->parsed()) return run_snapshot(ctx, snap_year ? snap_year : d.year, snap_day);
    if (c_features->parsed()) return run_features(ctx, feat_year ? feat_year : d.year);
    if (c_dataset->parsed())
      return run_dataset(ctx, ds_year ? ds_year : d.year, ds_delta ? ds_delta : d.delta, ds_ir ? ds_ir : d.ir,
                         ds_eval);
    if (c_train->parsed()) return run_train(ctx, train_dataset, train_out);
    if (c_predict->parsed()) return run_predict(ctx, pred_model, pred_matrix, pred_out);
    if (c_eval->parsed()) return run_eval(ctx, eval_model, eval_matrix, eval_out, eval_bins);
    if (c_bench->parsed()) return run_bench(ctx, bench_scan, bench_train, bench_eval, bench_out);
    if (c_suggest->parsed())
      return run_suggest(ctx, sug_year ? sug_year : d.year, sug_model, sug_a, sug_b, sug_max_cos, sug_min_deg,
                         sug_max_deg, sug_top_k, sug_out);
    if (c_explore->parsed()) return run_explore(ctx, exp_model, exp_matrix, exp_out);
    if (c_synth->parsed()) return run_synth(ctx, synth_corpus, synth_truth, synth_concepts);
    if (c_top->parsed())
      return run_top_growing(ctx, top_y1 ? top_y1 : yr.first, top_y2 ? top_y2 : yr.last, top_k, top_pairs, top_out);
    throw UsageError("no subcommand selected");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help and version end successful; any real parse problem is a usage error
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
