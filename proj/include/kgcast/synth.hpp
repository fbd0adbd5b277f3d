#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgcast/corpus.hpp"
#include "kgcast/graph.hpp"

namespace kgcast {

enum class SignalMode { planted, null_control };

// Knobs for the synthetic evolving corpus. Concept usage follows preferential
// attachment with strength alpha (0 = uniform); citations follow a Poisson
// law whose rate couples to the planted pair quality with strength beta and
// carries a log-normal heavy tail of shape sigma. Null mode forces beta = 0.
struct SynthParams {
  int n_concepts = 200;
  int n_papers = 2000;
  YearRange years;
  double concepts_mean = 4.0;  // Poisson mean for concepts per paper
  int concepts_cap = 8;
  double alpha = 1.0;
  double lambda0 = 0.4;    // base yearly citations per paper
  double beta = 6.0;       // quality coupling
  double tail_shape = 1.0; // log-normal sigma; 0 disables the tail
  double drift = 0.0;      // per-year blend rate toward a second latent
  SignalMode mode = SignalMode::planted;
  uint64_t seed = 0;

  void validate() const;
};

struct SynthOutput {
  std::vector<PaperRecord> papers;    // chronological, ids S000000..
  std::vector<std::string> phrases;   // generator concept id -> two-word phrase
  std::vector<double> latent0;        // per-concept base latent in [0,1]
  std::vector<double> latent1;        // drift target latent
  uint64_t seed = 0;
  double drift = 0.0;
  double beta = 0.0;                  // effective (zero in null mode)
  int first_year = 0;

  // The planted pair quality in [0,1]: a blend of the endpoint latents plus
  // pair-specific noise, all pinned by the seed.
  double quality(int32_t u, int32_t v) const;
  // Quality after drift has blended toward the second latent by `year`.
  double quality_at(int32_t u, int32_t v, int year) const;
};

SynthOutput generate_corpus(const SynthParams& params);

// CSV "u,v,quality" over all generator concept pairs u < v. Ids index the
// concept list (write_concepts_txt), not any downstream lexicon.
void write_ground_truth_csv(const SynthOutput& out, std::ostream& os);

// One phrase per line; line number = generator concept id.
void write_concepts_txt(const SynthOutput& out, std::ostream& os);

}  // namespace kgcast
