#include "kgcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "kgcast/dates.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/rng.hpp"

namespace kgcast {

namespace {

// Fixed-width base-26 index, 'a'..'z', collision-free and digit-free so the
// default lexicon filters leave synthetic concepts alone.
std::string letters(int value, int width) {
  std::string s(size_t(width), 'a');
  for (int pos = width - 1; pos >= 0 && value > 0; --pos) {
    s[size_t(pos)] = char('a' + value % 26);
    value /= 26;
  }
  return s;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Pair-keyed uniform noise without RNG state, stable in (seed, u, v).
double pair_noise(uint64_t seed, std::string_view stream, int32_t u, int32_t v) {
  const uint64_t key = (uint64_t(uint32_t(u)) << 32) | uint32_t(v);
  uint64_t s = derive_seed(seed, stream, key);
  return double(splitmix64(s) >> 11) * 0x1.0p-53;
}

double blend_quality(const std::vector<double>& latent, uint64_t seed, std::string_view stream, int32_t u, int32_t v) {
  return clamp01(0.7 * (latent[size_t(u)] + latent[size_t(v)]) / 2.0 + 0.3 * pair_noise(seed, stream, u, v));
}

}  // namespace

void SynthParams::validate() const {
  if (n_concepts < 2) throw ValidationError("generator needs at least 2 concepts");
  if (n_papers < 1) throw ValidationError("generator needs at least 1 paper");
  if (years.first > years.last) throw ValidationError("generator year span is empty");
  if (concepts_cap > n_concepts)
    throw ValidationError("concepts-per-paper cap " + std::to_string(concepts_cap) + " exceeds the " +
                          std::to_string(n_concepts) + " available concepts");
  if (concepts_cap < 1) throw ValidationError("concepts-per-paper cap must be at least 1");
  if (!(concepts_mean > 0)) throw ValidationError("concepts-per-paper mean must be positive");
  if (!(lambda0 > 0)) throw ValidationError("base citation rate must be positive");
  if (beta < 0) throw ValidationError("quality coupling must be non-negative");
  if (alpha < 0) throw ValidationError("attachment strength must be non-negative");
  if (tail_shape < 0) throw ValidationError("tail shape must be non-negative");
  if (drift < 0) throw ValidationError("drift rate must be non-negative");
}

double SynthOutput::quality(int32_t u, int32_t v) const {
  if (u > v) std::swap(u, v);
  return blend_quality(latent0, seed, "pair-noise-0", u, v);
}

double SynthOutput::quality_at(int32_t u, int32_t v, int year) const {
  const double q0 = quality(u, v);
  const double w = clamp01(drift * double(year - first_year));
  if (w == 0.0) return q0;
  if (u > v) std::swap(u, v);
  const double q1 = blend_quality(latent1, seed, "pair-noise-1", u, v);
  return (1.0 - w) * q0 + w * q1;
}

SynthOutput generate_corpus(const SynthParams& params) {
  params.validate();

  SynthOutput out;
  out.seed = params.seed;
  out.drift = params.drift;
  out.beta = params.mode == SignalMode::null_control ? 0.0 : params.beta;
  out.first_year = params.years.first;

  const int width = std::max(1, int(std::ceil(std::log(double(std::max(params.n_concepts, params.n_papers))) /
                                              std::log(26.0))));
  out.phrases.reserve(size_t(params.n_concepts));
  for (int c = 0; c < params.n_concepts; ++c) {
    const std::string tag = letters(c, width);
    out.phrases.push_back("zq" + tag + " vt" + tag);
  }

  Rng latent_rng(derive_seed(params.seed, "latents"));
  out.latent0.resize(size_t(params.n_concepts));
  out.latent1.resize(size_t(params.n_concepts));
  for (double& a : out.latent0) a = latent_rng.uniform01();
  for (double& a : out.latent1) a = latent_rng.uniform01();

  // Publication days first, then everything else in chronological order so
  // preferential attachment sees the past only.
  Rng day_rng(derive_seed(params.seed, "days"));
  const int64_t day_lo = date_to_days(params.years.first, 1, 1);
  const int64_t day_hi = date_to_days(params.years.last, 12, 31);
  std::vector<int64_t> days(size_t(params.n_papers));
  for (int64_t& d : days) d = day_lo + int64_t(day_rng.below(uint64_t(day_hi - day_lo + 1)));
  std::sort(days.begin(), days.end());

  Rng rng(derive_seed(params.seed, "papers"));
  std::vector<double> usage(size_t(params.n_concepts), 1.0);  // attachment counts, start at 1
  std::vector<int32_t> concepts;
  out.papers.reserve(size_t(params.n_papers));

  for (int p = 0; p < params.n_papers; ++p) {
    const int64_t day = days[size_t(p)];
    const int pub_year = year_of_day(day);

    int k = int(rng.poisson(params.concepts_mean));
    k = std::clamp(k, 1, params.concepts_cap);

    concepts.clear();
    double total_weight = 0;
    std::vector<double> weight(size_t(params.n_concepts));
    for (int c = 0; c < params.n_concepts; ++c) {
      weight[size_t(c)] = params.alpha == 0.0 ? 1.0 : std::pow(usage[size_t(c)], params.alpha);
      total_weight += weight[size_t(c)];
    }
    while (int(concepts.size()) < k) {
      double r = rng.uniform01() * total_weight;
      int32_t pick = params.n_concepts - 1;
      for (int c = 0; c < params.n_concepts; ++c) {
        r -= weight[size_t(c)];
        if (r <= 0) {
          pick = c;
          break;
        }
      }
      if (std::find(concepts.begin(), concepts.end(), pick) == concepts.end()) concepts.push_back(pick);
    }
    std::sort(concepts.begin(), concepts.end());
    for (int32_t c : concepts) usage[size_t(c)] += 1.0;

    // Mean planted quality over the paper's concept pairs, recomputed per
    // calendar year when drift is active.
    auto mean_quality = [&](int year) {
      if (concepts.size() < 2) return 0.0;
      double sum = 0;
      size_t n_pairs = 0;
      for (size_t i = 0; i < concepts.size(); ++i) {
        for (size_t j = i + 1; j < concepts.size(); ++j) {
          sum += out.quality_at(concepts[i], concepts[j], year);
          ++n_pairs;
        }
      }
      return sum / double(n_pairs);
    };

    const double tail =
        params.tail_shape == 0.0
            ? 1.0
            : std::exp(params.tail_shape * rng.normal() - params.tail_shape * params.tail_shape / 2.0);

    PaperRecord rec;
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "S%06d", p);
    rec.paper_id = idbuf;
    rec.title = "p" + letters(p, width);
    rec.pub_day = day;
    for (size_t i = 0; i < concepts.size(); ++i) {
      if (i) rec.abstract += "; ";
      rec.abstract += out.phrases[size_t(concepts[i])];
    }
    for (int year = pub_year; year <= params.years.last; ++year) {
      const double rate = params.lambda0 * (1.0 + out.beta * mean_quality(year)) * tail;
      const int64_t n = int64_t(rng.poisson(rate));
      if (n > 0) rec.yearly_citations[year] = n;
      rec.total_citations += n;
    }
    out.papers.push_back(std::move(rec));
  }
  return out;
}

void write_ground_truth_csv(const SynthOutput& out, std::ostream& os) {
  os << "u,v,quality\n";
  char buf[40];
  const int32_t n = int32_t(out.phrases.size());
  for (int32_t u = 0; u < n; ++u) {
    for (int32_t v = u + 1; v < n; ++v) {
      std::snprintf(buf, sizeof buf, "%.17g", out.quality(u, v));
      os << u << ',' << v << ',' << buf << '\n';
    }
  }
}

void write_concepts_txt(const SynthOutput& out, std::ostream& os) {
  for (const std::string& p : out.phrases) os << p << '\n';
}

}  // namespace kgcast
