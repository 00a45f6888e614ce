#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "commlm/corpus.hpp"
#include "commlm/textprep.hpp"
#include "commlm/topics.hpp"

namespace commlm {

enum class KeywordMethod { LLDA, CHI2_I, CHI2_II };

std::string_view to_string(KeywordMethod m);
KeywordMethod parse_keyword_method(std::string_view s);

struct KeywordSet {
  KeywordMethod method = KeywordMethod::CHI2_I;
  std::string target_group;
  std::size_t k = 30;
  std::vector<ScoredTerm> terms;
  /// Communities the keywords were mined from; keyword-matched pools must
  /// not contain them.
  std::set<std::string> source_communities;
  /// Set when the vocabulary held fewer than k candidate terms.
  bool truncated = false;

  std::set<std::string> term_set() const;
  nlohmann::json to_json() const;
  static KeywordSet from_json(const nlohmann::json& j);
  /// One keyword per line.
  std::string to_plain_list() const;
};

/// Chi-square statistic per term over the 2x2 table of document presence
/// against corpus (no continuity correction):
///   a = positive docs containing t   b = negative docs containing t
///   c = positive docs without t      d = negative docs without t
///   chi2 = N (ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d))
/// Terms present in every document score 0. Terms with document frequency
/// below min_df (over both corpora) are left out.
std::map<std::string, double> chi2_scores(std::span<const TokenList> positive_docs,
                                          std::span<const TokenList> negative_docs,
                                          std::size_t min_df = 5);

struct KeywordParams {
  std::size_t k = 30;
  std::size_t min_df = 5;
  LldaConfig llda;
  std::string target_group;
  std::set<std::string> source_communities;
};

/// Top-k keywords. CHI2_I contrasts hate with a random background, CHI2_II
/// hate with its support community; both rank by chi2_scores. LLDA fits a
/// hate-vs-contrast model and takes the hate topic's top terms.
KeywordSet build_keyword_set(KeywordMethod method, std::span<const TokenList> hate_docs,
                             std::span<const TokenList> contrast_docs, const KeywordParams& params);

struct KeywordMatchCounts {
  std::size_t matching = 0;
  std::size_t non_matching = 0;
};

/// Labels pool comments by keyword presence in their preprocessed tokens
/// (exact token equality): any keyword -> positive, none -> negative. Then
/// samples n_pos and n_neg uniformly under the seed. Throws DataError when
/// the pool contains a source community or either side runs short.
LabeledDataset keyword_match_dataset(const CorpusSlice& pool, const KeywordSet& keywords,
                                     std::size_t n_pos, std::size_t n_neg,
                                     const PreprocessConfig& config, std::uint64_t seed,
                                     KeywordMatchCounts* counts = nullptr);

}  // namespace commlm
