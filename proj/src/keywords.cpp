#include "commlm/keywords.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "commlm/error.hpp"
#include "commlm/rng.hpp"

namespace commlm {

using nlohmann::json;

std::string_view to_string(KeywordMethod m) {
  switch (m) {
    case KeywordMethod::LLDA: return "LLDA";
    case KeywordMethod::CHI2_I: return "CHI2_I";
    case KeywordMethod::CHI2_II: return "CHI2_II";
  }
  return "CHI2_I";
}

KeywordMethod parse_keyword_method(std::string_view s) {
  if (s == "LLDA" || s == "llda") return KeywordMethod::LLDA;
  if (s == "CHI2_I" || s == "chi2-i" || s == "chi2i") return KeywordMethod::CHI2_I;
  if (s == "CHI2_II" || s == "chi2-ii" || s == "chi2ii") return KeywordMethod::CHI2_II;
  throw UsageError("unknown keyword method '" + std::string(s) + "' (expected llda, chi2-i or chi2-ii)");
}

std::set<std::string> KeywordSet::term_set() const {
  std::set<std::string> out;
  for (const auto& t : terms) out.insert(t.term);
  return out;
}

json KeywordSet::to_json() const {
  json ts = json::array();
  for (const auto& t : terms) ts.push_back({{"term", t.term}, {"score", t.score}});
  return {{"method", std::string(to_string(method))},
          {"target_group", target_group},
          {"k", k},
          {"terms", std::move(ts)},
          {"source_communities", source_communities},
          {"truncated", truncated}};
}

KeywordSet KeywordSet::from_json(const json& j) {
  try {
    KeywordSet s;
    s.method = parse_keyword_method(j.at("method").get<std::string>());
    s.target_group = j.value("target_group", std::string{});
    s.k = j.at("k").get<std::size_t>();
    for (const auto& t : j.at("terms")) s.terms.push_back({t.at("term").get<std::string>(), t.at("score").get<double>()});
    s.source_communities = j.value("source_communities", std::set<std::string>{});
    s.truncated = j.value("truncated", false);
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed keyword set: ") + e.what());
  }
}

std::string KeywordSet::to_plain_list() const {
  std::string out;
  for (const auto& t : terms) out += t.term + "\n";
  return out;
}

namespace {

struct Presence {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

void tally(std::span<const TokenList> docs, bool positive, std::unordered_map<std::string, Presence>& table) {
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : docs) {
    seen.clear();
    for (const auto& t : doc) {
      if (!seen.insert(t).second) continue;
      auto& p = table[t];
      (positive ? p.pos : p.neg) += 1;
    }
  }
}

double chi2(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double denom = (a + b) * (c + d) * (a + c) * (b + d);
  if (denom == 0.0) return 0.0;
  const double diff = a * d - b * c;
  return n * diff * diff / denom;
}

std::vector<ScoredTerm> rank(std::vector<ScoredTerm> terms, std::size_t k) {
  std::sort(terms.begin(), terms.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
    return a.score != b.score ? a.score > b.score : a.term < b.term;
  });
  if (terms.size() > k) terms.resize(k);
  return terms;
}

}  // namespace

std::map<std::string, double> chi2_scores(std::span<const TokenList> positive_docs,
                                          std::span<const TokenList> negative_docs, std::size_t min_df) {
  if (positive_docs.empty() || negative_docs.empty()) throw DataError("chi-square scoring needs both corpora non-empty");
  std::unordered_map<std::string, Presence> table;
  tally(positive_docs, true, table);
  tally(negative_docs, false, table);
  const auto n_pos = static_cast<double>(positive_docs.size());
  const auto n_neg = static_cast<double>(negative_docs.size());
  std::map<std::string, double> out;
  for (const auto& [term, p] : table) {
    if (p.pos + p.neg < min_df) continue;
    const auto a = static_cast<double>(p.pos);
    const auto b = static_cast<double>(p.neg);
    out.emplace(term, chi2(a, b, n_pos - a, n_neg - b));
  }
  return out;
}

KeywordSet build_keyword_set(KeywordMethod method, std::span<const TokenList> hate_docs,
                             std::span<const TokenList> contrast_docs, const KeywordParams& params) {
  if (params.k == 0) throw UsageError("keyword set size k must be >= 1");
  if (hate_docs.empty() || contrast_docs.empty()) throw DataError("keyword extraction needs both corpora non-empty");
  KeywordSet set;
  set.method = method;
  set.k = params.k;
  set.target_group = params.target_group;
  set.source_communities = params.source_communities;

  if (method == KeywordMethod::LLDA) {
    std::vector<TokenList> hate(hate_docs.begin(), hate_docs.end());
    std::vector<TokenList> contrast(contrast_docs.begin(), contrast_docs.end());
    set.terms = community_topics(hate, contrast, params.k, params.llda);
  } else {
    // Only terms over-represented in the hate corpus are keyword candidates;
    // chi-square alone is symmetric in the direction of association.
    std::unordered_map<std::string, Presence> table;
    tally(hate_docs, true, table);
    tally(contrast_docs, false, table);
    const auto n_pos = static_cast<double>(hate_docs.size());
    const auto n_neg = static_cast<double>(contrast_docs.size());
    std::vector<ScoredTerm> candidates;
    for (const auto& [term, score] : chi2_scores(hate_docs, contrast_docs, params.min_df)) {
      const auto& p = table.at(term);
      if (static_cast<double>(p.pos) * n_neg > static_cast<double>(p.neg) * n_pos) candidates.push_back({term, score});
    }
    set.terms = rank(std::move(candidates), params.k);
  }
  set.truncated = set.terms.size() < params.k;
  return set;
}

LabeledDataset keyword_match_dataset(const CorpusSlice& pool, const KeywordSet& keywords, std::size_t n_pos,
                                     std::size_t n_neg, const PreprocessConfig& config, std::uint64_t seed,
                                     KeywordMatchCounts* counts) {
  const std::set<std::string> terms = keywords.term_set();
  std::vector<TokenList> docs;
  std::vector<Provenance> prov;
  std::vector<std::size_t> matching, other;
  for (const auto& c : pool.comments) {
    if (keywords.source_communities.contains(c.community))
      throw DataError("keyword pool contains comments from '" + c.community +
                      "', a community the keywords were mined from");
    if (c.deleted) continue;
    TokenList tokens = preprocess(c.body, config);
    if (tokens.empty()) continue;
    const bool hit = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return terms.contains(t); });
    (hit ? matching : other).push_back(docs.size());
    docs.push_back(std::move(tokens));
    prov.push_back({c.id, c.community});
  }
  if (counts) *counts = {matching.size(), other.size()};
  if (matching.size() < n_pos || other.size() < n_neg)
    throw DataError("keyword pool too small: requested " + std::to_string(n_pos) + " matching and " +
                    std::to_string(n_neg) + " non-matching comments, available " +
                    std::to_string(matching.size()) + " matching and " + std::to_string(other.size()) +
                    " non-matching");

  Rng rng(seed);
  LabeledDataset out;
  out.seed = seed;
  auto take = [&](const std::vector<std::size_t>& from, std::size_t n, Label label) {
    for (std::size_t k : sample_indices(from.size(), n, rng)) {
      out.documents.push_back(docs[from[k]]);
      out.labels.push_back(label);
      out.provenance.push_back(prov[from[k]]);
    }
  };
  take(matching, n_pos, Label::positive);
  take(other, n_neg, Label::negative);
  return out;
}

}  // namespace commlm
