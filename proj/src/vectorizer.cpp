#include "commlm/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "commlm/error.hpp"
#include "commlm/hash.hpp"
#include "commlm/line_io.hpp"

namespace commlm {

using nlohmann::json;

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * e.weight;
  return std::sqrt(s);
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * dense[e.index];
  return s;
}

TfidfModel::TfidfModel(std::vector<std::string> terms, std::vector<std::size_t> doc_freq, std::size_t n_docs,
                       std::size_t min_df)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs), min_df_(min_df) {
  idf_.resize(terms_.size());
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    idf_[i] = std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(doc_freq_[i]))) + 1.0;
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

TfidfModel TfidfModel::fit(std::span<const TokenList> documents, std::size_t min_df) {
  if (documents.empty()) throw DataError("cannot fit tf-idf on an empty corpus");
  if (min_df == 0) throw UsageError("min_df must be >= 1");
  std::map<std::string, std::size_t> df;  // ordered: byte-wise lexicographic
  bool any_tokens = false;
  std::vector<std::string_view> seen;
  for (const auto& doc : documents) {
    any_tokens |= !doc.empty();
    seen.assign(doc.begin(), doc.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  if (!any_tokens) throw DataError("cannot fit tf-idf: every document is empty");

  std::vector<std::string> terms;
  std::vector<std::size_t> freqs;
  for (auto& [term, count] : df) {
    if (count < min_df) continue;
    terms.push_back(term);
    freqs.push_back(count);
  }
  return TfidfModel(std::move(terms), std::move(freqs), documents.size(), min_df);
}

std::int64_t TfidfModel::index_of(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector TfidfModel::counts(const TokenList& document) const {
  SparseVector v;
  v.dim = dim();
  std::vector<std::uint32_t> ids;
  ids.reserve(document.size());
  for (const auto& t : document) {
    auto it = index_.find(t);
    if (it != index_.end()) ids.push_back(it->second);
  }
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    v.entries.push_back({ids[i], static_cast<double>(j - i)});
    i = j;
  }
  return v;
}

SparseVector TfidfModel::transform(const TokenList& document) const {
  SparseVector v = counts(document);
  for (auto& e : v.entries) e.weight *= idf_[e.index];
  const double n = v.norm();
  if (n > 0.0)
    for (auto& e : v.entries) e.weight /= n;
  return v;
}

json TfidfModel::to_json() const {
  json terms = json::array();
  for (std::size_t i = 0; i < terms_.size(); ++i) terms.push_back({{"term", terms_[i]}, {"df", doc_freq_[i]}});
  return {{"version", kFormatVersion}, {"n_docs", n_docs_}, {"min_df", min_df_}, {"terms", std::move(terms)}};
}

TfidfModel TfidfModel::from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kFormatVersion)
      throw DataError("unsupported vectorizer format version " + j.at("version").dump());
    std::vector<std::string> terms;
    std::vector<std::size_t> df;
    for (const auto& t : j.at("terms")) {
      terms.push_back(t.at("term").get<std::string>());
      df.push_back(t.at("df").get<std::size_t>());
    }
    if (!std::is_sorted(terms.begin(), terms.end()) ||
        std::adjacent_find(terms.begin(), terms.end()) != terms.end())
      throw DataError("vectorizer terms are not in strictly increasing order");
    return TfidfModel(std::move(terms), std::move(df), j.at("n_docs").get<std::size_t>(),
                      j.at("min_df").get<std::size_t>());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed vectorizer model: ") + e.what());
  }
}

void TfidfModel::save(const std::filesystem::path& path) const { write_text_file(path, to_json().dump(1) + "\n"); }

TfidfModel TfidfModel::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string TfidfModel::fingerprint() const { return Fnv1a64{}.update(to_json().dump()).hex(); }

}  // namespace commlm
