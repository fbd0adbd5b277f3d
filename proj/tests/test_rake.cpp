#include <doctest.h>

#include <algorithm>

#include "kgcast/rake.hpp"

using namespace kgcast;

namespace {

StopwordSet sample_stopwords() {
  return {"have", "significantly", "the", "of", "in", "a", "an", "and", "is", "are", "to"};
}

}  // namespace

TEST_CASE("candidate phrases are maximal stopword-free runs") {
  const auto candidates = rake_extract(
      "Recurrent neural networks have significantly improved the accuracy of image recognition in "
      "large-scale scientific collaboration networks.",
      sample_stopwords());
  const std::vector<std::string> expected{"recurrent neural networks", "improved", "accuracy", "image recognition",
                                          "large-scale scientific collaboration networks"};
  CHECK(candidates == expected);
}

TEST_CASE("empty text yields no candidates") { CHECK(rake_extract("", sample_stopwords()).empty()); }

TEST_CASE("duplicates within one document are preserved") {
  const auto candidates = rake_extract("alpha beta. alpha beta.", sample_stopwords());
  CHECK(candidates == std::vector<std::string>{"alpha beta", "alpha beta"});
}

TEST_CASE("punctuation splits candidates, hyphens do not") {
  const auto candidates = rake_extract("phase transition, large-scale dynamics", sample_stopwords());
  CHECK(candidates == std::vector<std::string>{"phase transition", "large-scale dynamics"});
}

TEST_CASE("token stream ignores delimiters that extraction honors") {
  // "beta, gamma" cannot be one candidate but is contiguous in the stream,
  // so matching stays at least as permissive as extraction.
  const auto stream = token_stream("Alpha beta, gamma!");
  CHECK(stream == std::vector<std::string>{"alpha", "beta", "gamma"});
  const auto runs = token_runs("Alpha beta, gamma!");
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == std::vector<std::string>{"alpha", "beta"});
  CHECK(runs[1] == std::vector<std::string>{"gamma"});
}

TEST_CASE("single candidate scores degree over frequency summed") {
  // One candidate "image recognition": each word has degree 2, frequency 1,
  // so the phrase scores 2/1 + 2/1 = 4.
  const auto scores = rake_score({"image recognition"});
  CHECK(scores.at("image recognition") == doctest::Approx(4.0));
}

TEST_CASE("shared words average their degrees across candidates") {
  // Candidates {a b, a}: word a has degree 2+1=3 over frequency 2 (score
  // 1.5); word b has degree 2 over frequency 1 (score 2). Phrase "a b"
  // scores 3.5.
  const auto scores = rake_score({"a b", "a"});
  CHECK(scores.at("a") == doctest::Approx(1.5));
  CHECK(scores.at("a b") == doctest::Approx(3.5));
}

TEST_CASE("empty candidate list scores nothing") { CHECK(rake_score({}).empty()); }

TEST_CASE("duplicate candidates raise word frequency") {
  // {x y, x y}: word degrees 2+2=4, frequencies 2, scores 2 each; the phrase
  // still sums its word scores once.
  const auto scores = rake_score({"x y", "x y"});
  CHECK(scores.at("x y") == doctest::Approx(4.0));
}
