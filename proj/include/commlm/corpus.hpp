#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace commlm {

struct PreprocessConfig;

using TokenList = std::vector<std::string>;

enum class Platform { reddit, voat, forum, other };
enum class SourceLabel { hate, support, background };
enum class Label : std::uint8_t { negative = 0, positive = 1 };

std::string_view to_string(Platform p);
std::string_view to_string(SourceLabel s);
std::string_view to_string(Label l);
Platform parse_platform(std::string_view s);
SourceLabel parse_source_label(std::string_view s);
Label parse_label(std::string_view s);

/// One post or comment with the community it was published in.
struct Comment {
  std::string id;
  std::string body;
  std::string community;
  Platform platform = Platform::other;
  std::int64_t created_at = 0;
  std::string author;
  /// Body was "[deleted]" or "[removed]" (or empty) in the source dump.
  bool deleted = false;

  friend bool operator==(const Comment&, const Comment&) = default;
};

bool is_deleted_body(std::string_view body);

struct CorpusSlice {
  std::vector<Comment> comments;
  SourceLabel source_label = SourceLabel::background;
  std::string target_group;

  std::size_t size() const { return comments.size(); }
  friend bool operator==(const CorpusSlice&, const CorpusSlice&) = default;
};

struct Provenance {
  std::string id;
  std::string community;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Preprocessed documents with binary labels. The three vectors are
/// parallel; `seed` records the seed used to assemble the dataset.
struct LabeledDataset {
  std::vector<TokenList> documents;
  std::vector<Label> labels;
  std::vector<Provenance> provenance;
  std::uint64_t seed = 0;

  std::size_t size() const { return documents.size(); }
  std::size_t count(Label l) const;
  /// Checks the parallel-vector invariant; throws DataError if violated.
  void validate() const;
  /// Content fingerprint over tokens, labels and provenance.
  std::string fingerprint() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

// ---------------------------------------------------------------------------
// JSONL ingestion

enum class ParseMode { strict, lenient };

struct LoadOptions {
  /// Keep only records whose community is in this set (all if absent).
  std::optional<std::set<std::string>> community_filter;
  Platform platform = Platform::reddit;
  ParseMode mode = ParseMode::strict;
};

struct LoadResult {
  CorpusSlice slice;
  /// Malformed lines skipped in lenient mode.
  std::size_t skipped = 0;
};

/// Maps one JSON object to a Comment. Field mapping:
///   id -> id; body -> body; subreddit | community | subverse | board ->
///   community; created_utc | created_at -> created_at (integer or numeric
///   string); author -> author; platform (optional) overrides the default.
/// Unknown fields are ignored. Throws DataError describing the problem if
/// id, body or community is missing or has the wrong type.
Comment comment_from_json(const nlohmann::json& record, Platform default_platform);

/// Canonical output form: {id, body, community, platform, created_at, author}.
nlohmann::json comment_to_json(const Comment& c);

/// Streams records from a JSONL (or .jsonl.gz) file one at a time.
/// Blank lines are ignored. In strict mode a malformed line throws a
/// DataError naming the file and line; in lenient mode it is counted and
/// skipped. Returns the skip tally.
std::size_t for_each_comment(const std::filesystem::path& path, Platform platform, ParseMode mode,
                             const std::function<void(Comment&&)>& visit);

LoadResult load_jsonl(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes comments in canonical form; ".gz" paths are compressed.
void write_jsonl(const std::filesystem::path& path, const CorpusSlice& slice);

// ---------------------------------------------------------------------------
// Sampling and dataset assembly

/// Uniform sample of n comments without replacement, excluding the given
/// communities. Selected comments keep their original relative order.
CorpusSlice sample_background(const CorpusSlice& slice, std::size_t n,
                              const std::set<std::string>& exclude_communities, std::uint64_t seed);

/// Streaming reservoir sample (Algorithm R) over a file too large to load.
/// Memory is O(n). Selected comments are returned in file order.
CorpusSlice reservoir_sample_jsonl(const std::filesystem::path& path, std::size_t n,
                                   const std::set<std::string>& exclude_communities, Platform platform,
                                   ParseMode mode, std::uint64_t seed);

struct BuiltDataset {
  LabeledDataset dataset;
  /// Comments whose tokens were empty after preprocessing.
  std::size_t dropped_empty = 0;
  /// Comments flagged deleted, excluded before preprocessing.
  std::size_t dropped_deleted = 0;
};

/// Preprocesses both slices, drops deleted and empty documents, then
/// downsamples the larger side so both classes have min(|pos|, |neg|)
/// documents. Output lists positives first, each side in source order.
BuiltDataset build_balanced(const CorpusSlice& positive, const CorpusSlice& negative,
                            const PreprocessConfig& config, std::uint64_t seed);

/// Negatives per positive, written "1:N".
struct ImbalanceRatio {
  std::size_t negatives_per_positive = 1;
  std::string str() const;
  static ImbalanceRatio parse(std::string_view text);
  friend bool operator==(const ImbalanceRatio&, const ImbalanceRatio&) = default;
};

/// Test set with exactly ratio.negatives_per_positive negatives per
/// positive. All usable positives are taken unless positive_cap is set, in
/// which case at most that many are sampled.
BuiltDataset build_imbalanced_testset(const CorpusSlice& positive, const CorpusSlice& negative,
                                      ImbalanceRatio ratio, const PreprocessConfig& config,
                                      std::uint64_t seed,
                                      std::optional<std::size_t> positive_cap = std::nullopt);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified k-fold split. Indices of each class are shuffled under the
/// seed, positives and then negatives are dealt round-robin to folds, so
/// fold sizes differ by at most one and each fold's class counts differ
/// from the proportional share by at most one. Index lists are sorted.
std::vector<Fold> kfold_split(const LabeledDataset& dataset, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dataset persistence: one {tokens, label, id, community} object per line.

void write_dataset(const std::filesystem::path& path, const LabeledDataset& dataset);
LabeledDataset read_dataset(const std::filesystem::path& path);

}  // namespace commlm
