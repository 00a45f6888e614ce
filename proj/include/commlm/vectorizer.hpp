#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "commlm/corpus.hpp"

namespace commlm {

struct SparseEntry {
  std::uint32_t index = 0;
  double weight = 0.0;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse feature vector with strictly increasing indices below dim.
struct SparseVector {
  std::vector<SparseEntry> entries;
  std::size_t dim = 0;

  bool empty() const { return entries.empty(); }
  double norm() const;
  double dot(std::span<const double> dense) const;
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Vocabulary and document frequencies fit on a training corpus.
///
/// Weighting:
///   idf(t)    = ln((1 + n_docs) / (1 + df(t))) + 1
///   weight(t) = count(t in doc) * idf(t), then L2-normalised
/// Terms are indexed in byte-wise lexicographic order.
class TfidfModel {
 public:
  static constexpr int kFormatVersion = 1;

  TfidfModel() = default;

  /// Keeps terms with document frequency >= min_df. Throws DataError if the
  /// corpus is empty or every document is empty.
  static TfidfModel fit(std::span<const TokenList> documents, std::size_t min_df = 2);

  SparseVector transform(const TokenList& document) const;
  /// Raw in-vocabulary term counts, no idf and no normalisation.
  SparseVector counts(const TokenList& document) const;

  std::size_t dim() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  std::size_t min_df() const { return min_df_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
  const std::vector<double>& idf() const { return idf_; }
  /// Index of a term, or -1 when out of vocabulary.
  std::int64_t index_of(const std::string& term) const;

  nlohmann::json to_json() const;
  /// idf is recomputed from df and n_docs on load.
  static TfidfModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static TfidfModel load(const std::filesystem::path& path);

  /// Fingerprint of the serialised form; ties classifier models and reports
  /// to the exact vocabulary they were built with.
  std::string fingerprint() const;

 private:
  TfidfModel(std::vector<std::string> terms, std::vector<std::size_t> doc_freq, std::size_t n_docs,
             std::size_t min_df);

  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t n_docs_ = 0;
  std::size_t min_df_ = 2;
};

}  // namespace commlm
