#include "commlm/topics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "commlm/error.hpp"
#include "commlm/rng.hpp"

namespace commlm {

using nlohmann::json;

void LldaConfig::validate() const {
  if (!(alpha > 0.0)) throw UsageError("LLDA alpha must be > 0");
  if (!(beta > 0.0)) throw UsageError("LLDA beta must be > 0");
  if (iterations <= burn_in) throw UsageError("LLDA iterations must exceed burn_in");
}

json LldaConfig::to_json() const {
  return {{"alpha", alpha}, {"beta", beta}, {"iterations", iterations}, {"burn_in", burn_in}, {"seed", seed}};
}

std::size_t LldaModel::label_index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DataError("unknown topic label '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

LldaModel fit_llda_multilabel(std::span<const TokenList> documents,
                              std::span<const std::vector<std::string>> doc_labels, const LldaConfig& config) {
  config.validate();
  if (documents.empty()) throw DataError("LLDA needs a non-empty corpus");
  if (documents.size() != doc_labels.size())
    throw DataError("LLDA: " + std::to_string(documents.size()) + " documents but " +
                    std::to_string(doc_labels.size()) + " label lists");

  LldaModel model;
  std::map<std::string, std::size_t> label_ids;
  std::map<std::string, std::uint32_t> term_ids;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    if (doc_labels[d].empty()) throw DataError("LLDA: document " + std::to_string(d) + " has no label");
    for (const auto& l : doc_labels[d]) {
      if (l.empty()) throw DataError("LLDA: document " + std::to_string(d) + " has an empty label");
      label_ids.emplace(l, 0);
    }
    for (const auto& t : documents[d]) term_ids.emplace(t, 0);
  }
  if (term_ids.empty()) throw DataError("LLDA: vocabulary is empty");
  for (auto& [l, id] : label_ids) {
    id = model.labels.size();
    model.labels.push_back(l);
  }
  for (auto& [t, id] : term_ids) {
    id = static_cast<std::uint32_t>(model.vocab.size());
    model.vocab.push_back(t);
  }
  const std::size_t K = model.labels.size();
  const std::size_t V = model.vocab.size();
  const double vbeta = static_cast<double>(V) * config.beta;

  struct Doc {
    std::vector<std::uint32_t> words;
    std::vector<std::size_t> topics;  // allowed topic ids, ascending
    std::vector<std::size_t> z;       // per-token position in `topics`
    std::vector<double> n_topic;      // tokens per allowed topic
  };
  std::vector<Doc> docs(documents.size());
  bool any_choice = false;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (const auto& t : documents[d]) docs[d].words.push_back(term_ids.at(t));
    for (const auto& l : doc_labels[d]) docs[d].topics.push_back(label_ids.at(l));
    std::sort(docs[d].topics.begin(), docs[d].topics.end());
    docs[d].topics.erase(std::unique(docs[d].topics.begin(), docs[d].topics.end()), docs[d].topics.end());
    any_choice |= docs[d].topics.size() > 1 && !docs[d].words.empty();
  }

  std::vector<std::vector<double>> n_kw(K, std::vector<double>(V, 0.0));
  std::vector<double> n_k(K, 0.0);
  Rng rng(config.seed);
  for (auto& doc : docs) {
    doc.n_topic.assign(doc.topics.size(), 0.0);
    doc.z.resize(doc.words.size());
    for (std::size_t i = 0; i < doc.words.size(); ++i) {
      const std::size_t slot = doc.topics.size() == 1 ? 0 : static_cast<std::size_t>(rng.below(doc.topics.size()));
      doc.z[i] = slot;
      doc.n_topic[slot] += 1.0;
      n_kw[doc.topics[slot]][doc.words[i]] += 1.0;
      n_k[doc.topics[slot]] += 1.0;
    }
  }

  std::vector<std::vector<double>> acc(K, std::vector<double>(V, 0.0));
  std::size_t samples = 0;
  std::vector<double> p;
  if (!any_choice) {
    // Every conditional is a point mass, so each sweep leaves the state
    // unchanged and the post-burn-in average equals the initial counts.
    acc = n_kw;
    samples = 1;
  } else {
    for (std::size_t it = 0; it < config.iterations; ++it) {
      for (auto& doc : docs) {
        if (doc.topics.size() == 1) continue;
        p.resize(doc.topics.size());
        for (std::size_t i = 0; i < doc.words.size(); ++i) {
          const std::uint32_t w = doc.words[i];
          std::size_t slot = doc.z[i];
          doc.n_topic[slot] -= 1.0;
          n_kw[doc.topics[slot]][w] -= 1.0;
          n_k[doc.topics[slot]] -= 1.0;

          double total = 0.0;
          for (std::size_t s = 0; s < doc.topics.size(); ++s) {
            const std::size_t k = doc.topics[s];
            total += (doc.n_topic[s] + config.alpha) * (n_kw[k][w] + config.beta) / (n_k[k] + vbeta);
            p[s] = total;
          }
          const double u = rng.uniform() * total;
          slot = 0;
          while (slot + 1 < p.size() && u >= p[slot]) ++slot;

          doc.z[i] = slot;
          doc.n_topic[slot] += 1.0;
          n_kw[doc.topics[slot]][w] += 1.0;
          n_k[doc.topics[slot]] += 1.0;
        }
      }
      if (it >= config.burn_in) {
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t w = 0; w < V; ++w) acc[k][w] += n_kw[k][w];
        ++samples;
      }
    }
  }

  model.topic_word_counts.assign(K, std::vector<double>(V, 0.0));
  model.phi.assign(K, std::vector<double>(V, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    double total = 0.0;
    for (std::size_t w = 0; w < V; ++w) {
      model.topic_word_counts[k][w] = acc[k][w] / static_cast<double>(samples);
      total += model.topic_word_counts[k][w];
    }
    for (std::size_t w = 0; w < V; ++w)
      model.phi[k][w] = (model.topic_word_counts[k][w] + config.beta) / (total + vbeta);
  }
  return model;
}

LldaModel fit_llda(std::span<const TokenList> documents, std::span<const std::string> doc_labels,
                   const LldaConfig& config) {
  if (documents.size() != doc_labels.size())
    throw DataError("LLDA: " + std::to_string(documents.size()) + " documents but " +
                    std::to_string(doc_labels.size()) + " labels");
  std::vector<std::vector<std::string>> sets;
  sets.reserve(doc_labels.size());
  for (std::size_t d = 0; d < doc_labels.size(); ++d) {
    if (doc_labels[d].empty()) throw DataError("LLDA: document " + std::to_string(d) + " has no label");
    sets.push_back({doc_labels[d]});
  }
  std::vector<std::string> distinct(doc_labels.begin(), doc_labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw DataError("LLDA needs documents from at least two labels");
  return fit_llda_multilabel(documents, sets, config);
}

std::vector<ScoredTerm> top_terms(const LldaModel& model, const std::string& label, std::size_t k,
                                  TermRanking ranking) {
  if (k == 0) throw UsageError("top_terms: k must be >= 1");
  const std::size_t li = model.label_index(label);
  const std::size_t V = model.vocab.size();
  std::vector<ScoredTerm> scored;
  scored.reserve(V);
  for (std::size_t w = 0; w < V; ++w) {
    double s = model.phi[li][w];
    if (ranking == TermRanking::distinctiveness) {
      double other = -INFINITY;
      for (std::size_t o = 0; o < model.labels.size(); ++o)
        if (o != li) other = std::max(other, model.phi[o][w]);
      if (std::isfinite(other)) s -= other;
    }
    scored.push_back({model.vocab[w], s});
  }
  const std::size_t n = std::min(k, V);
  auto better = [](const ScoredTerm& a, const ScoredTerm& b) {
    return a.score != b.score ? a.score > b.score : a.term < b.term;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return scored;
}

double jaccard_index(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : a) common += b.contains(t);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

// ---------------------------------------------------------------------------

std::vector<ScoredTerm> community_topics(const std::vector<TokenList>& community,
                                         const std::vector<TokenList>& background, std::size_t k,
                                         const LldaConfig& config, TermRanking ranking) {
  if (community.empty() || background.empty()) throw DataError("topic analysis needs both corpora non-empty");
  const std::size_t n = std::min(community.size(), background.size());
  Rng rng(derive_seed(config.seed, "topics/balance"));
  std::vector<TokenList> docs;
  std::vector<std::string> labels;
  docs.reserve(2 * n);
  auto take = [&](const std::vector<TokenList>& side, const std::string& label) {
    for (std::size_t i : sample_indices(side.size(), n, rng)) {
      docs.push_back(side[i]);
      labels.push_back(label);
    }
  };
  take(community, "community");
  take(background, "background");
  const LldaModel model = fit_llda(docs, labels, config);
  return top_terms(model, "community", k, ranking);
}

TopicReport make_topic_report(std::vector<TopicColumn> columns, std::size_t k) {
  TopicReport r;
  r.k = k;
  r.columns = std::move(columns);
  for (std::size_t i = 0; i < r.columns.size(); ++i)
    for (std::size_t j = i + 1; j < r.columns.size(); ++j) {
      std::set<std::string> a, b;
      for (const auto& t : r.columns[i].terms) a.insert(t.term);
      for (const auto& t : r.columns[j].terms) b.insert(t.term);
      r.jaccard.emplace_back(r.columns[i].name, r.columns[j].name, jaccard_index(a, b));
    }
  return r;
}

json TopicReport::to_json() const {
  json cols = json::array();
  for (const auto& c : columns) {
    json terms = json::array();
    for (const auto& t : c.terms) terms.push_back({{"term", t.term}, {"score", t.score}});
    cols.push_back({{"name", c.name}, {"terms", std::move(terms)}});
  }
  json ji = json::array();
  for (const auto& [a, b, v] : jaccard) ji.push_back({{"a", a}, {"b", b}, {"jaccard", v}});
  return {{"k", k}, {"columns", std::move(cols)}, {"jaccard", std::move(ji)}};
}

std::string TopicReport::to_text() const {
  std::vector<std::size_t> width;
  std::size_t rows = 0;
  for (const auto& c : columns) {
    std::size_t w = c.name.size();
    for (const auto& t : c.terms) w = std::max(w, t.term.size());
    width.push_back(w);
    rows = std::max(rows, c.terms.size());
  }
  std::ostringstream os;
  auto cell = [&](const std::string& s, std::size_t w, bool last) {
    os << s;
    if (!last) os << std::string(w - s.size() + 2, ' ');
  };
  os << "rank  ";
  for (std::size_t c = 0; c < columns.size(); ++c) cell(columns[c].name, width[c], c + 1 == columns.size());
  os << '\n';
  std::size_t rule = 6;
  for (auto w : width) rule += w + 2;
  os << std::string(rule - 2, '-') << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    char rank[32];
    std::snprintf(rank, sizeof rank, "%-4zu  ", r + 1);
    os << rank;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string s = r < columns[c].terms.size() ? columns[c].terms[r].term : "";
      cell(s, width[c], c + 1 == columns.size());
    }
    os << '\n';
  }
  for (const auto& [a, b, v] : jaccard) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    os << "Jaccard index (" << a << ", " << b << "): " << buf << '\n';
  }
  return os.str();
}

}  // namespace commlm
