#include "kgcast/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "kgcast/dates.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/hash.hpp"
#include "kgcast/ranking.hpp"

namespace kgcast {

namespace {

const char* year_tag(int k) { return k == 0 ? "y" : (k == 1 ? "ym1" : "ym2"); }
const char* year_sym(int k) { return k == 0 ? "y" : (k == 1 ? "y-1" : "y-2"); }

std::vector<FeatureSlot> build_feature_index() {
  std::vector<FeatureSlot> slots;
  slots.reserve(kNumFeatures);
  auto add = [&](const std::string& name, const std::string& formula) { slots.push_back({name, formula}); };

  auto per_year_uv = [&](const std::string& base, const std::string& sym) {
    for (int k = 0; k < 3; ++k) {
      for (const char* side : {"u", "v"}) {
        add(base + "_" + side + "_" + year_tag(k), sym + "[" + side + "," + year_sym(k) + "]");
      }
    }
  };
  auto per_lookback_uv = [&](const std::string& base, const std::string& sym, bool ranked) {
    for (int lb = 1; lb <= 2; ++lb) {
      for (const char* side : {"u", "v"}) {
        std::string delta =
            sym + "[" + side + ",y]-" + sym + "[" + side + ",y-" + std::to_string(lb) + "]";
        if (ranked) {
          add("rank_" + base + "_" + std::to_string(lb) + "y_" + side, "rank(" + delta + ")");
        } else {
          add(base + "_" + std::to_string(lb) + "y_" + side, delta);
        }
      }
    }
  };
  auto per_year_pair = [&](const std::string& base, const std::string& formula_pattern) {
    // formula_pattern uses {Y} as the year placeholder
    for (int k = 0; k < 3; ++k) {
      std::string f = formula_pattern;
      size_t pos;
      while ((pos = f.find("{Y}")) != std::string::npos) f.replace(pos, 3, year_sym(k));
      add(base + "_" + year_tag(k), f);
    }
  };

  // 0-19: node network
  per_year_uv("neighbors", "N");                           // 0-5
  per_lookback_uv("new_neighbors", "N", false);            // 6-9
  per_lookback_uv("new_neighbors", "N", true);             // 10-13
  per_year_uv("pagerank", "PR");                           // 14-19
  // 20-77: node citation
  per_year_uv("yearly_citations", "C");                    // 20-25
  per_year_uv("total_citations", "Ct");                    // 26-31
  per_year_uv("citations_3y", "Ct3");                      // 32-37
  per_year_uv("paper_count", "Pn");                        // 38-43
  per_year_uv("mean_yearly_citations", "Cm");              // 44-49
  per_year_uv("mean_total_citations", "Ctm");              // 50-55
  per_year_uv("mean_citations_3y", "Ctm3");                // 56-61
  per_lookback_uv("new_citations", "Ct", false);           // 62-65
  per_lookback_uv("new_citations", "Ct", true);            // 66-69
  per_lookback_uv("new_papers", "Pn", false);              // 70-73
  per_lookback_uv("new_papers", "Pn", true);               // 74-77
  // 78-98: pair network
  per_year_pair("shared_neighbors", "Ns[{Y}]");                                   // 78-80
  per_year_pair("geometric", "Ns[{Y}]^2/(N[u,{Y}]*N[v,{Y}])");                    // 81-83
  per_year_pair("cosine", "sqrt(Geo[{Y}])");                                      // 84-86
  per_year_pair("simpson", "Ns[{Y}]/min(N[u,{Y}],N[v,{Y}])");                     // 87-89
  per_year_pair("preferential", "N[u,{Y}]*N[v,{Y}]");                             // 90-92
  per_year_pair("sorensen", "2*Ns[{Y}]/(N[u,{Y}]+N[v,{Y}])");                     // 93-95
  per_year_pair("jaccard", "Ns[{Y}]/(N[u,{Y}]+N[v,{Y}]-Ns[{Y}])");                // 96-98
  // 99-140: pair citation
  per_year_pair("citation_sum_ratio", "(Ct[u,{Y}]+Ct[v,{Y}])/(Pn[u,{Y}]+Pn[v,{Y}])");      // 99-101
  per_year_pair("citation_product_ratio", "(Ct[u,{Y}]*Ct[v,{Y}])/(Pn[u,{Y}]+Pn[v,{Y}])");  // 102-104
  per_year_pair("sum_mean_yearly_citations", "Cm[u,{Y}]+Cm[v,{Y}]");                       // 105-107
  per_year_pair("sum_mean_total_citations", "Ctm[u,{Y}]+Ctm[v,{Y}]");                      // 108-110
  per_year_pair("sum_citations_3y", "Ct3[u,{Y}]+Ct3[v,{Y}]");                              // 111-113
  per_year_pair("sum_mean_citations_3y", "Ctm3[u,{Y}]+Ctm3[v,{Y}]");                       // 114-116
  per_year_pair("min_yearly_citations", "min(C[u,{Y}],C[v,{Y}])");                         // 117-119
  per_year_pair("max_yearly_citations", "max(C[u,{Y}],C[v,{Y}])");                         // 120-122
  per_year_pair("min_total_citations", "min(Ct[u,{Y}],Ct[v,{Y}])");                        // 123-125
  per_year_pair("max_total_citations", "max(Ct[u,{Y}],Ct[v,{Y}])");                        // 126-128
  per_year_pair("min_citations_3y", "min(Ct3[u,{Y}],Ct3[v,{Y}])");                         // 129-131
  per_year_pair("max_citations_3y", "max(Ct3[u,{Y}],Ct3[v,{Y}])");                         // 132-134
  per_year_pair("min_paper_count", "min(Pn[u,{Y}],Pn[v,{Y}])");                            // 135-137
  per_year_pair("max_paper_count", "max(Pn[u,{Y}],Pn[v,{Y}])");                            // 138-140

  if (slots.size() != kNumFeatures)
    throw std::logic_error("feature index has " + std::to_string(slots.size()) + " slots, expected 141");
  return slots;
}

inline double div0(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

const std::vector<FeatureSlot>& feature_index() {
  static const std::vector<FeatureSlot> index = build_feature_index();
  return index;
}

uint64_t feature_layout_checksum() {
  static const uint64_t value = [] {
    Fnv64 h;
    const auto& idx = feature_index();
    for (size_t i = 0; i < idx.size(); ++i) {
      h.update_u64(i);
      h.update(idx[i].name);
      h.update(idx[i].formula);
    }
    return h.value();
  }();
  return value;
}

std::string feature_index_tsv() {
  std::ostringstream os;
  os << "index\tname\tformula\n";
  const auto& idx = feature_index();
  for (size_t i = 0; i < idx.size(); ++i) os << i << '\t' << idx[i].name << '\t' << idx[i].formula << '\n';
  return os.str();
}

void SnapshotTrio::finish() {
  for (const GraphSnapshot& s : snaps) s.pagerank(pr_params);  // prime caches

  const int32_t v = snaps[0].num_vertices();
  for (int lb = 1; lb <= 2; ++lb) {
    const size_t nv = size_t(v);
    std::vector<double> dn(nv), dc(nv), dp(nv);
    const GraphSnapshot& now = snaps[0];
    const GraphSnapshot& then = snaps[size_t(lb)];
    for (int32_t w = 0; w < v; ++w) {
      dn[size_t(w)] = double(now.degree(w) - then.degree(w));
      dc[size_t(w)] = double(now.cumulative_citations(w, year) - then.cumulative_citations(w, year - lb));
      dp[size_t(w)] = double(now.paper_count(w) - then.paper_count(w));
    }
    rank_new_neighbors[lb - 1] = rank_transform(dn);
    rank_new_citations[lb - 1] = rank_transform(dc);
    rank_new_papers[lb - 1] = rank_transform(dp);
  }
}

SnapshotTrio SnapshotTrio::build(const EvolvingGraph& graph, int year, const PagerankParams& params) {
  SnapshotTrio trio;
  trio.year = year;
  trio.pr_params = params;
  trio.snaps.reserve(3);
  for (int k = 0; k < 3; ++k) trio.snaps.push_back(GraphSnapshot::build(graph, year_end_day(year - k)));
  trio.finish();
  return trio;
}

SnapshotTrio SnapshotTrio::assemble(std::vector<GraphSnapshot> snaps, int year, const PagerankParams& params) {
  if (snaps.size() != 3) throw ValidationError("a snapshot trio needs exactly three snapshots");
  for (int k = 0; k < 3; ++k) {
    if (snaps[size_t(k)].cutoff_day() != year_end_day(year - k))
      throw ValidationError("snapshot cutoff does not match year " + std::to_string(year - k));
    if (snaps[size_t(k)].lexicon_checksum() != snaps[0].lexicon_checksum())
      throw IntegrityError("snapshot trio mixes different lexicons");
  }
  SnapshotTrio trio;
  trio.year = year;
  trio.pr_params = params;
  trio.snaps = std::move(snaps);
  trio.finish();
  return trio;
}

void fill_feature_row(const SnapshotTrio& trio, int32_t u, int32_t v, double* out) {
  struct NodeStats {
    double n, pr, c, ct, ct3, pn, cm, ctm, ctm3;
  };
  NodeStats st[3][2];  // [years back][side]
  const int32_t w[2] = {u, v};

  for (int k = 0; k < 3; ++k) {
    const GraphSnapshot& snap = trio.at(k);
    const std::vector<double>& pr = snap.pagerank(trio.pr_params);
    const int year_k = trio.year - k;
    for (int s = 0; s < 2; ++s) {
      NodeStats& a = st[k][s];
      a.n = double(snap.degree(w[s]));
      a.pr = pr[size_t(w[s])];
      a.c = double(snap.yearly_citations(w[s], year_k));
      a.ct = double(snap.cumulative_citations(w[s], year_k));
      a.ct3 = double(snap.trailing3_citations(w[s], year_k));
      a.pn = double(snap.paper_count(w[s]));
      a.cm = div0(a.c, a.pn);
      a.ctm = div0(a.ct, a.pn);
      a.ctm3 = div0(a.ct3, a.pn);
    }
  }

  size_t i = 0;
  auto put = [&](double x) { out[i++] = x; };
  auto per_year_uv = [&](auto get) {
    for (int k = 0; k < 3; ++k) {
      for (int s = 0; s < 2; ++s) put(get(st[k][s]));
    }
  };
  auto per_lookback_uv = [&](auto get) {
    for (int lb = 1; lb <= 2; ++lb) {
      for (int s = 0; s < 2; ++s) put(get(lb, s));
    }
  };

  // 0-19
  per_year_uv([](const NodeStats& a) { return a.n; });
  per_lookback_uv([&](int lb, int s) { return st[0][s].n - st[lb][s].n; });
  per_lookback_uv([&](int lb, int s) { return trio.rank_new_neighbors[lb - 1][size_t(w[s])]; });
  per_year_uv([](const NodeStats& a) { return a.pr; });
  // 20-77
  per_year_uv([](const NodeStats& a) { return a.c; });
  per_year_uv([](const NodeStats& a) { return a.ct; });
  per_year_uv([](const NodeStats& a) { return a.ct3; });
  per_year_uv([](const NodeStats& a) { return a.pn; });
  per_year_uv([](const NodeStats& a) { return a.cm; });
  per_year_uv([](const NodeStats& a) { return a.ctm; });
  per_year_uv([](const NodeStats& a) { return a.ctm3; });
  per_lookback_uv([&](int lb, int s) { return st[0][s].ct - st[lb][s].ct; });
  per_lookback_uv([&](int lb, int s) { return trio.rank_new_citations[lb - 1][size_t(w[s])]; });
  per_lookback_uv([&](int lb, int s) { return st[0][s].pn - st[lb][s].pn; });
  per_lookback_uv([&](int lb, int s) { return trio.rank_new_papers[lb - 1][size_t(w[s])]; });

  // Pair blocks want per-year values grouped by quantity, so collect first.
  double ns[3];
  for (int k = 0; k < 3; ++k) ns[k] = double(trio.at(k).shared_neighbors(u, v));
  auto per_year = [&](auto get) {
    for (int k = 0; k < 3; ++k) put(get(k));
  };

  // 78-98
  per_year([&](int k) { return ns[k]; });
  per_year([&](int k) { return div0(ns[k] * ns[k], st[k][0].n * st[k][1].n); });
  per_year([&](int k) { return std::sqrt(div0(ns[k] * ns[k], st[k][0].n * st[k][1].n)); });
  per_year([&](int k) { return div0(ns[k], std::min(st[k][0].n, st[k][1].n)); });
  per_year([&](int k) { return st[k][0].n * st[k][1].n; });
  per_year([&](int k) { return div0(2.0 * ns[k], st[k][0].n + st[k][1].n); });
  per_year([&](int k) { return div0(ns[k], st[k][0].n + st[k][1].n - ns[k]); });
  // 99-140
  per_year([&](int k) { return div0(st[k][0].ct + st[k][1].ct, st[k][0].pn + st[k][1].pn); });
  per_year([&](int k) { return div0(st[k][0].ct * st[k][1].ct, st[k][0].pn + st[k][1].pn); });
  per_year([&](int k) { return st[k][0].cm + st[k][1].cm; });
  per_year([&](int k) { return st[k][0].ctm + st[k][1].ctm; });
  per_year([&](int k) { return st[k][0].ct3 + st[k][1].ct3; });
  per_year([&](int k) { return st[k][0].ctm3 + st[k][1].ctm3; });
  per_year([&](int k) { return std::min(st[k][0].c, st[k][1].c); });
  per_year([&](int k) { return std::max(st[k][0].c, st[k][1].c); });
  per_year([&](int k) { return std::min(st[k][0].ct, st[k][1].ct); });
  per_year([&](int k) { return std::max(st[k][0].ct, st[k][1].ct); });
  per_year([&](int k) { return std::min(st[k][0].ct3, st[k][1].ct3); });
  per_year([&](int k) { return std::max(st[k][0].ct3, st[k][1].ct3); });
  per_year([&](int k) { return std::min(st[k][0].pn, st[k][1].pn); });
  per_year([&](int k) { return std::max(st[k][0].pn, st[k][1].pn); });

  if (i != kNumFeatures) throw std::logic_error("feature row filled " + std::to_string(i) + " slots");
}

std::array<double, kNumFeatures> feature_vector(const SnapshotTrio& trio, int32_t u, int32_t v) {
  if (u == v) throw ValidationError("feature_vector requires two distinct concepts");
  if (trio.at(0).connected(u, v))
    throw ValidationError("feature_vector is defined for unconnected pairs, but (" + std::to_string(u) + "," +
                          std::to_string(v) + ") are connected at year " + std::to_string(trio.year));
  std::array<double, kNumFeatures> row;
  fill_feature_row(trio, u, v, row.data());
  return row;
}

std::vector<double> compute_feature_rows(const SnapshotTrio& trio, const std::vector<std::pair<int32_t, int32_t>>& pairs,
                                         int workers) {
  std::vector<double> values(pairs.size() * kNumFeatures);
  if (pairs.empty()) return values;
  if (workers <= 0) workers = int(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, int(pairs.size())));

  auto run = [&](size_t begin, size_t end) {
    for (size_t r = begin; r < end; ++r) {
      fill_feature_row(trio, pairs[r].first, pairs[r].second, values.data() + r * kNumFeatures);
    }
  };
  if (workers == 1) {
    run(0, pairs.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (pairs.size() + size_t(workers) - 1) / size_t(workers);
    for (int t = 0; t < workers; ++t) {
      const size_t begin = size_t(t) * chunk;
      const size_t end = std::min(pairs.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }
  return values;
}

}  // namespace kgcast
