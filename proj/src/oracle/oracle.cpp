#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "kgcast/dates.hpp"
#include "kgcast/errors.hpp"

namespace kgcast::oracle {

namespace {

// Everything known about one vertex at one cutoff, rebuilt from scratch.
struct VertexTally {
  std::set<int32_t> neighbors;
  std::vector<const PaperRecord*> papers;  // papers mentioning the vertex
};

struct WorldAtCutoff {
  std::vector<VertexTally> vertices;
  std::vector<double> pagerank;
};

int64_t yearly_at(const PaperRecord& p, int year, const OracleParams& prm) {
  if (year < prm.year_first || year > prm.year_last) return 0;
  auto it = p.yearly_citations.find(year);
  return it == p.yearly_citations.end() ? 0 : it->second;
}

WorldAtCutoff build_world(const std::vector<PaperRecord>& corpus, const ConceptLexicon& lexicon, int64_t cutoff_day,
                          const OracleParams& prm) {
  WorldAtCutoff world;
  world.vertices.resize(size_t(lexicon.size()));
  for (const PaperRecord& p : corpus) {
    if (p.pub_day > cutoff_day) continue;
    const std::vector<int32_t> cs = lexicon.match(paper_text(p));
    if (cs.size() < 2) continue;  // papers that co-mention nothing form no edges
    for (int32_t c : cs) world.vertices[size_t(c)].papers.push_back(&p);
    for (size_t i = 0; i < cs.size(); ++i) {
      for (size_t j = i + 1; j < cs.size(); ++j) {
        world.vertices[size_t(cs[i])].neighbors.insert(cs[j]);
        world.vertices[size_t(cs[j])].neighbors.insert(cs[i]);
      }
    }
  }

  // Plain power iteration with the dangling mass spread uniformly. The
  // update expression matches the production contract term for term so the
  // two implementations are comparable at tight tolerances.
  const size_t n = world.vertices.size();
  if (n == 0) return world;
  const double d = prm.damping;
  const double inv_n = 1.0 / double(n);
  std::vector<double> x(n, inv_n), next(n);
  for (int iter = 1; iter <= prm.max_iters; ++iter) {
    double dangling = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (world.vertices[i].neighbors.empty()) dangling += x[i];
    }
    for (size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int32_t j : world.vertices[i].neighbors) {
        s += x[size_t(j)] / double(world.vertices[size_t(j)].neighbors.size());
      }
      next[i] = (1.0 - d) * inv_n + d * s + d * dangling * inv_n;
    }
    double delta = 0.0;
    for (size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - x[i]);
    x.swap(next);
    if (delta < prm.tolerance) break;
  }
  world.pagerank = std::move(x);
  return world;
}

int64_t count_papers(const WorldAtCutoff& w, int32_t c) { return int64_t(w.vertices[size_t(c)].papers.size()); }

int64_t yearly_citations(const WorldAtCutoff& w, int32_t c, int year, const OracleParams& prm) {
  int64_t sum = 0;
  for (const PaperRecord* p : w.vertices[size_t(c)].papers) sum += yearly_at(*p, year, prm);
  return sum;
}

int64_t cumulative_citations(const WorldAtCutoff& w, int32_t c, int year, const OracleParams& prm) {
  int64_t sum = 0;
  for (int t = prm.year_first; t <= std::min(year, prm.year_last); ++t) sum += yearly_citations(w, c, t, prm);
  return sum;
}

int64_t trailing3_citations(const WorldAtCutoff& w, int32_t c, int year, const OracleParams& prm) {
  int64_t sum = 0;
  for (int t = year - 2; t <= year; ++t) {
    if (t >= prm.year_first && t <= prm.year_last) sum += yearly_citations(w, c, t, prm);
  }
  return sum;
}

// Fractional rank by literal counting: strictly-smaller count plus the mean
// position within the tie group.
std::vector<double> naive_ranks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n; ++i) {
    size_t less = 0, eq = 0;
    for (size_t j = 0; j < n; ++j) {
      if (values[j] < values[i]) ++less;
      else if (values[j] == values[i]) ++eq;
    }
    ranks[i] = (double(less + 1) + double(less + eq)) / 2.0;
  }
  return ranks;
}

double div0(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

int64_t end_of_year_day(int year) { return date_to_days(year, 12, 31); }

}  // namespace

std::array<double, 141> oracle_features(const std::vector<PaperRecord>& corpus, const ConceptLexicon& lexicon,
                                        int32_t u, int32_t v, int y, const OracleParams& params) {
  WorldAtCutoff world[3] = {build_world(corpus, lexicon, end_of_year_day(y), params),
                            build_world(corpus, lexicon, end_of_year_day(y - 1), params),
                            build_world(corpus, lexicon, end_of_year_day(y - 2), params)};

  const int32_t n_vertices = lexicon.size();
  std::vector<double> rank_dn[2], rank_dc[2], rank_dp[2];
  for (int lb = 1; lb <= 2; ++lb) {
    const size_t nv = size_t(n_vertices);
    std::vector<double> dn(nv), dc(nv), dp(nv);
    for (int32_t c = 0; c < n_vertices; ++c) {
      dn[size_t(c)] = double(int64_t(world[0].vertices[size_t(c)].neighbors.size()) -
                             int64_t(world[lb].vertices[size_t(c)].neighbors.size()));
      dc[size_t(c)] =
          double(cumulative_citations(world[0], c, y, params) - cumulative_citations(world[lb], c, y - lb, params));
      dp[size_t(c)] = double(count_papers(world[0], c) - count_papers(world[lb], c));
    }
    rank_dn[lb - 1] = naive_ranks(dn);
    rank_dc[lb - 1] = naive_ranks(dc);
    rank_dp[lb - 1] = naive_ranks(dp);
  }

  struct Node {
    double n, pr, c, ct, ct3, pn, cm, ctm, ctm3;
  };
  Node st[3][2];
  const int32_t w[2] = {u, v};
  for (int k = 0; k < 3; ++k) {
    for (int s = 0; s < 2; ++s) {
      Node& a = st[k][s];
      a.n = double(world[k].vertices[size_t(w[s])].neighbors.size());
      a.pr = world[k].pagerank[size_t(w[s])];
      a.c = double(yearly_citations(world[k], w[s], y - k, params));
      a.ct = double(cumulative_citations(world[k], w[s], y - k, params));
      a.ct3 = double(trailing3_citations(world[k], w[s], y - k, params));
      a.pn = double(count_papers(world[k], w[s]));
      a.cm = div0(a.c, a.pn);
      a.ctm = div0(a.ct, a.pn);
      a.ctm3 = div0(a.ct3, a.pn);
    }
  }

  double ns[3];
  for (int k = 0; k < 3; ++k) {
    const auto& nu = world[k].vertices[size_t(u)].neighbors;
    const auto& nv = world[k].vertices[size_t(v)].neighbors;
    int64_t shared = 0;
    for (int32_t c : nu) shared += nv.count(c);
    ns[k] = double(shared);
  }

  std::array<double, 141> out{};
  size_t i = 0;
  auto put = [&](double x) { out[i++] = x; };

  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].n);
  for (int lb = 1; lb <= 2; ++lb)
    for (int s = 0; s < 2; ++s) put(st[0][s].n - st[lb][s].n);
  for (int lb = 1; lb <= 2; ++lb)
    for (int s = 0; s < 2; ++s) put(rank_dn[lb - 1][size_t(w[s])]);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].pr);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].c);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].ct);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].ct3);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].pn);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].cm);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].ctm);
  for (int k = 0; k < 3; ++k)
    for (int s = 0; s < 2; ++s) put(st[k][s].ctm3);
  for (int lb = 1; lb <= 2; ++lb)
    for (int s = 0; s < 2; ++s) put(st[0][s].ct - st[lb][s].ct);
  for (int lb = 1; lb <= 2; ++lb)
    for (int s = 0; s < 2; ++s) put(rank_dc[lb - 1][size_t(w[s])]);
  for (int lb = 1; lb <= 2; ++lb)
    for (int s = 0; s < 2; ++s) put(st[0][s].pn - st[lb][s].pn);
  for (int lb = 1; lb <= 2; ++lb)
    for (int s = 0; s < 2; ++s) put(rank_dp[lb - 1][size_t(w[s])]);

  for (int k = 0; k < 3; ++k) put(ns[k]);
  for (int k = 0; k < 3; ++k) put(div0(ns[k] * ns[k], st[k][0].n * st[k][1].n));
  for (int k = 0; k < 3; ++k) put(std::sqrt(div0(ns[k] * ns[k], st[k][0].n * st[k][1].n)));
  for (int k = 0; k < 3; ++k) put(div0(ns[k], std::min(st[k][0].n, st[k][1].n)));
  for (int k = 0; k < 3; ++k) put(st[k][0].n * st[k][1].n);
  for (int k = 0; k < 3; ++k) put(div0(2.0 * ns[k], st[k][0].n + st[k][1].n));
  for (int k = 0; k < 3; ++k) put(div0(ns[k], st[k][0].n + st[k][1].n - ns[k]));
  for (int k = 0; k < 3; ++k) put(div0(st[k][0].ct + st[k][1].ct, st[k][0].pn + st[k][1].pn));
  for (int k = 0; k < 3; ++k) put(div0(st[k][0].ct * st[k][1].ct, st[k][0].pn + st[k][1].pn));
  for (int k = 0; k < 3; ++k) put(st[k][0].cm + st[k][1].cm);
  for (int k = 0; k < 3; ++k) put(st[k][0].ctm + st[k][1].ctm);
  for (int k = 0; k < 3; ++k) put(st[k][0].ct3 + st[k][1].ct3);
  for (int k = 0; k < 3; ++k) put(st[k][0].ctm3 + st[k][1].ctm3);
  for (int k = 0; k < 3; ++k) put(std::min(st[k][0].c, st[k][1].c));
  for (int k = 0; k < 3; ++k) put(std::max(st[k][0].c, st[k][1].c));
  for (int k = 0; k < 3; ++k) put(std::min(st[k][0].ct, st[k][1].ct));
  for (int k = 0; k < 3; ++k) put(std::max(st[k][0].ct, st[k][1].ct));
  for (int k = 0; k < 3; ++k) put(std::min(st[k][0].ct3, st[k][1].ct3));
  for (int k = 0; k < 3; ++k) put(std::max(st[k][0].ct3, st[k][1].ct3));
  for (int k = 0; k < 3; ++k) put(std::min(st[k][0].pn, st[k][1].pn));
  for (int k = 0; k < 3; ++k) put(std::max(st[k][0].pn, st[k][1].pn));

  if (i != out.size()) throw std::logic_error("oracle filled " + std::to_string(i) + " slots");
  return out;
}

double oracle_auc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  double wins = 0.0;
  int64_t positives = 0, negatives = 0;
  for (size_t i = 0; i < labels.size(); ++i) (labels[i] ? positives : negatives) += 1;
  if (positives == 0) throw ValidationError("cannot compute AUC: no positive examples");
  if (negatives == 0) throw ValidationError("cannot compute AUC: no negative examples");
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / (double(positives) * double(negatives));
}

int64_t oracle_pair_citations(const std::vector<PaperRecord>& corpus, const ConceptLexicon& lexicon, int32_t u,
                              int32_t v, int y, int delta, const OracleParams& params) {
  int64_t sum = 0;
  for (const PaperRecord& p : corpus) {
    const std::vector<int32_t> cs = lexicon.match(paper_text(p));
    const bool has_u = std::find(cs.begin(), cs.end(), u) != cs.end();
    const bool has_v = std::find(cs.begin(), cs.end(), v) != cs.end();
    if (!has_u || !has_v) continue;
    for (int t = y + 1; t <= y + delta; ++t) sum += yearly_at(p, t, params);
  }
  return sum;
}

}  // namespace kgcast::oracle
