#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "commlm/corpus.hpp"

namespace commlm {

struct LldaConfig {
  double alpha = 0.5;
  double beta = 0.1;
  std::size_t iterations = 1000;
  std::size_t burn_in = 200;
  std::uint64_t seed = 0;

  /// Throws UsageError unless alpha > 0, beta > 0, iterations > burn_in.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Labeled LDA with one topic per label.
struct LldaModel {
  std::vector<std::string> labels;
  std::vector<std::string> vocab;  ///< lexicographic order
  /// Post-burn-in averaged topic-term counts, [topic][term].
  std::vector<std::vector<double>> topic_word_counts;
  /// (counts + beta) / (topic total + V * beta), [topic][term].
  std::vector<std::vector<double>> phi;

  std::size_t label_index(const std::string& label) const;
};

/// Collapsed Gibbs sampling where each document's tokens may only take the
/// topics of that document's labels:
///   p(z = k | rest) ~ (n_dk + alpha) (n_kw + beta) / (n_k + V beta),  k in labels(d)
/// After burn_in sweeps the topic-term counts are averaged over the
/// remaining sweeps and phi is computed from the average. A token whose
/// document has a single label has a point-mass conditional and is assigned
/// without a draw.
LldaModel fit_llda_multilabel(std::span<const TokenList> documents,
                              std::span<const std::vector<std::string>> doc_labels,
                              const LldaConfig& config);

/// Single label per document (the community-vs-background setup). Requires
/// at least two distinct labels. Throws DataError on empty labels or an
/// empty vocabulary.
LldaModel fit_llda(std::span<const TokenList> documents, std::span<const std::string> doc_labels,
                   const LldaConfig& config);

enum class TermRanking {
  /// phi(label)[t] - max over other labels of phi(other)[t]
  distinctiveness,
  raw_phi,
};

struct ScoredTerm {
  std::string term;
  double score = 0.0;
  friend bool operator==(const ScoredTerm&, const ScoredTerm&) = default;
};

/// k best terms for a label, score descending, ties lexicographic. Returns
/// the whole vocabulary when it has fewer than k terms.
std::vector<ScoredTerm> top_terms(const LldaModel& model, const std::string& label, std::size_t k,
                                  TermRanking ranking = TermRanking::distinctiveness);

/// |a n b| / |a u b|; 0 when both are empty.
double jaccard_index(const std::set<std::string>& a, const std::set<std::string>& b);

// ---------------------------------------------------------------------------
// Community topic reports

struct TopicColumn {
  std::string name;
  std::vector<ScoredTerm> terms;
};

struct TopicReport {
  std::size_t k = 0;
  std::vector<TopicColumn> columns;
  /// (column i, column j, JI) for every pair i < j.
  std::vector<std::tuple<std::string, std::string, double>> jaccard;

  nlohmann::json to_json() const;
  /// Aligned table: one column per community, k ranked rows, then JI lines.
  std::string to_text() const;
};

/// Fits community-vs-background LLDA after subsampling both sides to the
/// same size (seeded) and returns the community's top-k terms.
std::vector<ScoredTerm> community_topics(const std::vector<TokenList>& community,
                                         const std::vector<TokenList>& background, std::size_t k,
                                         const LldaConfig& config,
                                         TermRanking ranking = TermRanking::distinctiveness);

/// Report comparing columns by pairwise Jaccard index over their term sets.
TopicReport make_topic_report(std::vector<TopicColumn> columns, std::size_t k);

}  // namespace commlm
