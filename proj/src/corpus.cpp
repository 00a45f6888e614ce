#include "commlm/corpus.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <numeric>

#include "commlm/error.hpp"
#include "commlm/hash.hpp"
#include "commlm/line_io.hpp"
#include "commlm/rng.hpp"
#include "commlm/textprep.hpp"

namespace commlm {

using nlohmann::json;

std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::reddit: return "reddit";
    case Platform::voat: return "voat";
    case Platform::forum: return "forum";
    case Platform::other: return "other";
  }
  return "other";
}

std::string_view to_string(SourceLabel s) {
  switch (s) {
    case SourceLabel::hate: return "hate";
    case SourceLabel::support: return "support";
    case SourceLabel::background: return "background";
  }
  return "background";
}

std::string_view to_string(Label l) { return l == Label::positive ? "positive" : "negative"; }

Platform parse_platform(std::string_view s) {
  if (s == "reddit") return Platform::reddit;
  if (s == "voat") return Platform::voat;
  if (s == "forum") return Platform::forum;
  if (s == "other") return Platform::other;
  throw UsageError("unknown platform '" + std::string(s) + "' (expected reddit, voat, forum or other)");
}

SourceLabel parse_source_label(std::string_view s) {
  if (s == "hate") return SourceLabel::hate;
  if (s == "support") return SourceLabel::support;
  if (s == "background") return SourceLabel::background;
  throw UsageError("unknown source label '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
  if (s == "positive") return Label::positive;
  if (s == "negative") return Label::negative;
  throw DataError("unknown label '" + std::string(s) + "' (expected positive or negative)");
}

bool is_deleted_body(std::string_view body) {
  return body.empty() || body == "[deleted]" || body == "[removed]";
}

std::size_t LabeledDataset::count(Label l) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

void LabeledDataset::validate() const {
  if (documents.size() != labels.size() || documents.size() != provenance.size())
    throw DataError("dataset vectors differ in length: " + std::to_string(documents.size()) +
                    " documents, " + std::to_string(labels.size()) + " labels, " +
                    std::to_string(provenance.size()) + " provenance entries");
}

std::string LabeledDataset::fingerprint() const {
  Fnv1a64 h;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    h.update(labels[i] == Label::positive ? "+" : "-");
    h.update(provenance[i].id).update(std::string_view("\0", 1));
    h.update(provenance[i].community).update(std::string_view("\0", 1));
    for (const auto& t : documents[i]) h.update(t).update("\x1f");
    h.update("\x1e");
  }
  return h.hex();
}

// ---------------------------------------------------------------------------

namespace {

const json* find_field(const json& record, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    auto it = record.find(n);
    if (it != record.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::int64_t parse_timestamp(const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) return static_cast<std::int64_t>(std::llround(v.get<double>()));
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && p == s.data() + s.size()) return out;
  }
  throw DataError("created_utc is not an integer timestamp");
}

}  // namespace

Comment comment_from_json(const json& record, Platform default_platform) {
  if (!record.is_object()) throw DataError("record is not a JSON object");
  Comment c;
  c.platform = default_platform;

  const json* id = find_field(record, {"id"});
  if (!id) throw DataError("missing 'id'");
  if (id->is_string()) c.id = id->get<std::string>();
  else if (id->is_number_integer()) c.id = std::to_string(id->get<std::int64_t>());
  else throw DataError("'id' must be a string");
  if (c.id.empty()) throw DataError("empty 'id'");

  const json* body = find_field(record, {"body"});
  if (!body) throw DataError("missing 'body'");
  if (!body->is_string()) throw DataError("'body' must be a string");
  c.body = body->get<std::string>();
  c.deleted = is_deleted_body(c.body);

  const json* community = find_field(record, {"community", "subreddit", "subverse", "board"});
  if (!community) throw DataError("missing community field (subreddit/community/subverse/board)");
  if (!community->is_string()) throw DataError("community field must be a string");
  c.community = community->get<std::string>();
  if (c.community.empty()) throw DataError("empty community");

  if (const json* ts = find_field(record, {"created_utc", "created_at"})) c.created_at = parse_timestamp(*ts);
  if (const json* author = find_field(record, {"author"})) {
    if (!author->is_string()) throw DataError("'author' must be a string");
    c.author = author->get<std::string>();
  }
  if (const json* platform = find_field(record, {"platform"})) {
    if (!platform->is_string()) throw DataError("'platform' must be a string");
    try {
      c.platform = parse_platform(platform->get_ref<const std::string&>());
    } catch (const UsageError& e) {
      throw DataError(e.what());
    }
  }
  return c;
}

json comment_to_json(const Comment& c) {
  return json{{"id", c.id},
              {"body", c.body},
              {"community", c.community},
              {"platform", std::string(to_string(c.platform))},
              {"created_at", c.created_at},
              {"author", c.author}};
}

std::size_t for_each_comment(const std::filesystem::path& path, Platform platform, ParseMode mode,
                             const std::function<void(Comment&&)>& visit) {
  LineReader reader(path);
  std::string line;
  std::size_t skipped = 0;
  while (reader.next(line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Comment c;
    try {
      c = comment_from_json(json::parse(line), platform);
    } catch (const std::exception& e) {
      if (mode == ParseMode::lenient) {
        ++skipped;
        continue;
      }
      throw DataError(path.string() + ":" + std::to_string(reader.line_number()) + ": " + e.what());
    }
    visit(std::move(c));
  }
  return skipped;
}

LoadResult load_jsonl(const std::filesystem::path& path, const LoadOptions& options) {
  LoadResult result;
  const auto* filter = options.community_filter ? &*options.community_filter : nullptr;
  result.skipped = for_each_comment(path, options.platform, options.mode, [&](Comment&& c) {
    if (filter && !filter->contains(c.community)) return;
    result.slice.comments.push_back(std::move(c));
  });
  return result;
}

void write_jsonl(const std::filesystem::path& path, const CorpusSlice& slice) {
  LineWriter out(path);
  for (const auto& c : slice.comments) out.write_line(comment_to_json(c).dump());
  out.close();
}

// ---------------------------------------------------------------------------

CorpusSlice sample_background(const CorpusSlice& slice, std::size_t n,
                              const std::set<std::string>& exclude_communities, std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  eligible.reserve(slice.comments.size());
  for (std::size_t i = 0; i < slice.comments.size(); ++i)
    if (!exclude_communities.contains(slice.comments[i].community)) eligible.push_back(i);
  if (eligible.size() < n)
    throw DataError("background sample needs " + std::to_string(n) + " comments but only " +
                    std::to_string(eligible.size()) + " remain after excluding communities (short by " +
                    std::to_string(n - eligible.size()) + ")");
  Rng rng(seed);
  CorpusSlice out;
  out.source_label = slice.source_label;
  out.target_group = slice.target_group;
  out.comments.reserve(n);
  for (std::size_t k : sample_indices(eligible.size(), n, rng)) out.comments.push_back(slice.comments[eligible[k]]);
  return out;
}

CorpusSlice reservoir_sample_jsonl(const std::filesystem::path& path, std::size_t n,
                                   const std::set<std::string>& exclude_communities, Platform platform,
                                   ParseMode mode, std::uint64_t seed) {
  Rng rng(seed);
  // (ordinal among eligible records, comment)
  std::vector<std::pair<std::size_t, Comment>> reservoir;
  reservoir.reserve(n);
  std::size_t seen = 0;
  for_each_comment(path, platform, mode, [&](Comment&& c) {
    if (exclude_communities.contains(c.community)) return;
    if (reservoir.size() < n) {
      reservoir.emplace_back(seen, std::move(c));
    } else if (n > 0) {
      const auto j = static_cast<std::size_t>(rng.below(seen + 1));
      if (j < n) reservoir[j] = {seen, std::move(c)};
    }
    ++seen;
  });
  if (reservoir.size() < n)
    throw DataError("background sample needs " + std::to_string(n) + " comments but " + path.string() +
                    " has only " + std::to_string(reservoir.size()) + " after exclusions");
  std::sort(reservoir.begin(), reservoir.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  CorpusSlice out;
  out.comments.reserve(n);
  for (auto& [_, c] : reservoir) out.comments.push_back(std::move(c));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Prepared {
  std::vector<TokenList> docs;
  std::vector<Provenance> provenance;
  std::size_t dropped_empty = 0;
  std::size_t dropped_deleted = 0;
};

Prepared prepare(const CorpusSlice& slice, const PreprocessConfig& config) {
  Prepared p;
  for (const auto& c : slice.comments) {
    if (c.deleted) {
      ++p.dropped_deleted;
      continue;
    }
    TokenList tokens = preprocess(c.body, config);
    if (tokens.empty()) {
      ++p.dropped_empty;
      continue;
    }
    p.docs.push_back(std::move(tokens));
    p.provenance.push_back({c.id, c.community});
  }
  return p;
}

void append(LabeledDataset& out, Prepared& side, const std::vector<std::size_t>& picks, Label label) {
  for (std::size_t i : picks) {
    out.documents.push_back(std::move(side.docs[i]));
    out.labels.push_back(label);
    out.provenance.push_back(std::move(side.provenance[i]));
  }
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

BuiltDataset build_balanced(const CorpusSlice& positive, const CorpusSlice& negative,
                            const PreprocessConfig& config, std::uint64_t seed) {
  Prepared pos = prepare(positive, config);
  Prepared neg = prepare(negative, config);
  if (pos.docs.empty()) throw DataError("positive corpus is empty after preprocessing");
  if (neg.docs.empty()) throw DataError("negative corpus is empty after preprocessing");

  const std::size_t n = std::min(pos.docs.size(), neg.docs.size());
  Rng rng(seed);
  const auto pos_pick = pos.docs.size() > n ? sample_indices(pos.docs.size(), n, rng) : all_indices(n);
  const auto neg_pick = neg.docs.size() > n ? sample_indices(neg.docs.size(), n, rng) : all_indices(n);

  BuiltDataset out;
  out.dataset.seed = seed;
  out.dataset.documents.reserve(2 * n);
  append(out.dataset, pos, pos_pick, Label::positive);
  append(out.dataset, neg, neg_pick, Label::negative);
  out.dropped_empty = pos.dropped_empty + neg.dropped_empty;
  out.dropped_deleted = pos.dropped_deleted + neg.dropped_deleted;
  return out;
}

std::string ImbalanceRatio::str() const { return "1:" + std::to_string(negatives_per_positive); }

ImbalanceRatio ImbalanceRatio::parse(std::string_view text) {
  const auto colon = text.find(':');
  auto bad = [&] {
    return UsageError("invalid ratio '" + std::string(text) + "' (expected 1:N with N >= 1)");
  };
  if (colon == std::string_view::npos || text.substr(0, colon) != "1") throw bad();
  const auto rhs = text.substr(colon + 1);
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), n);
  if (ec != std::errc() || p != rhs.data() + rhs.size() || n == 0) throw bad();
  return ImbalanceRatio{n};
}

BuiltDataset build_imbalanced_testset(const CorpusSlice& positive, const CorpusSlice& negative,
                                      ImbalanceRatio ratio, const PreprocessConfig& config,
                                      std::uint64_t seed, std::optional<std::size_t> positive_cap) {
  if (ratio.negatives_per_positive == 0) throw UsageError("ratio must be 1:N with N >= 1");
  Prepared pos = prepare(positive, config);
  Prepared neg = prepare(negative, config);
  if (pos.docs.empty()) throw DataError("positive corpus is empty after preprocessing");

  Rng rng(seed);
  const std::size_t n_pos = positive_cap ? std::min(*positive_cap, pos.docs.size()) : pos.docs.size();
  if (n_pos == 0) throw DataError("positive cap of 0 leaves an empty test set");
  const std::size_t n_neg = n_pos * ratio.negatives_per_positive;
  if (neg.docs.size() < n_neg)
    throw DataError("ratio " + ratio.str() + " with " + std::to_string(n_pos) + " positives requires " +
                    std::to_string(n_neg) + " negatives but only " + std::to_string(neg.docs.size()) +
                    " are available");
  const auto pos_pick = n_pos < pos.docs.size() ? sample_indices(pos.docs.size(), n_pos, rng) : all_indices(n_pos);
  const auto neg_pick = sample_indices(neg.docs.size(), n_neg, rng);

  BuiltDataset out;
  out.dataset.seed = seed;
  append(out.dataset, pos, pos_pick, Label::positive);
  append(out.dataset, neg, neg_pick, Label::negative);
  out.dropped_empty = pos.dropped_empty + neg.dropped_empty;
  out.dropped_deleted = pos.dropped_deleted + neg.dropped_deleted;
  return out;
}

std::vector<Fold> kfold_split(const LabeledDataset& dataset, std::size_t k, std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (k < 2) throw UsageError("k-fold split needs k >= 2 (got " + std::to_string(k) + ")");
  if (k > n) throw DataError("k-fold split with k=" + std::to_string(k) + " exceeds dataset size " + std::to_string(n));

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < n; ++i) (dataset.labels[i] == Label::positive ? pos : neg).push_back(i);
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);

  std::vector<std::size_t> assignment(n);
  std::size_t slot = 0;
  for (std::size_t i : pos) assignment[i] = slot++ % k;
  for (std::size_t i : neg) assignment[i] = slot++ % k;

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < k; ++f) (f == assignment[i] ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

// ---------------------------------------------------------------------------

void write_dataset(const std::filesystem::path& path, const LabeledDataset& dataset) {
  dataset.validate();
  LineWriter out(path);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    json line{{"tokens", dataset.documents[i]},
              {"label", std::string(to_string(dataset.labels[i]))},
              {"id", dataset.provenance[i].id},
              {"community", dataset.provenance[i].community}};
    out.write_line(line.dump());
  }
  out.close();
}

LabeledDataset read_dataset(const std::filesystem::path& path) {
  LabeledDataset d;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      d.documents.push_back(j.at("tokens").get<TokenList>());
      d.labels.push_back(parse_label(j.at("label").get<std::string>()));
      d.provenance.push_back({j.value("id", std::string{}), j.value("community", std::string{})});
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(reader.line_number()) + ": " + e.what());
    }
  }
  return d;
}

}  // namespace commlm
