#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "commlm/corpus.hpp"

namespace commlm {

/// Parameters of the synthetic community corpus.
///
/// Positive (hate) and negative (support) documents draw each token from the
/// shared topical vocabulary with probability overlap_weight and from their
/// own planted vocabulary otherwise. Background documents draw from a
/// generic vocabulary, except that fractions of them are generated from the
/// support and hate distributions (a random sample of a platform contains
/// some on-topic content).
struct SynthSpec {
  std::size_t n_docs = 1000;  ///< per side
  std::size_t vocab_core = 20;
  std::size_t vocab_shared = 20;
  double overlap_weight = 0.3;
  std::size_t min_length = 8;
  std::size_t max_length = 24;
  std::size_t n_background = 0;  ///< 0 means n_docs
  std::size_t vocab_background = 200;
  double background_support_fraction = 0.0;
  double background_hate_fraction = 0.0;
  /// Zipf (1/rank) weights inside each term class instead of uniform.
  bool zipf = false;
  std::uint64_t seed = 0;

  /// Throws UsageError on counts < 1, probabilities outside [0,1], or
  /// min_length > max_length.
  void validate() const;
  nlohmann::json to_json() const;
  static SynthSpec from_json(const nlohmann::json& j);
};

struct SynthTruth {
  std::vector<std::string> positive_core;
  std::vector<std::string> negative_core;
  std::vector<std::string> shared;
  std::vector<std::string> background;
  nlohmann::json to_json() const;
};

struct SynthCorpus {
  CorpusSlice positive;
  CorpusSlice negative;
  CorpusSlice background;
  SynthTruth truth;
};

SynthCorpus generate(const SynthSpec& spec);

/// Writes positive.jsonl, negative.jsonl, background.jsonl and truth.json
/// (ground-truth term sets plus the spec) into dir.
void write_synth_corpus(const std::filesystem::path& dir, const SynthSpec& spec,
                        const SynthCorpus& corpus);

}  // namespace commlm
