#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>

#include "commlm/corpus.hpp"

namespace commlm {

struct PreprocessConfig {
  std::unordered_set<std::string> stopwords;
  std::set<std::string> bot_authors;
  bool strip_urls = true;
  bool strip_digits = true;
  bool strip_punct = true;
  bool lowercase = true;

  /// Shipped stopword list (data/stopwords_en.txt) and {"AutoModerator"}.
  static PreprocessConfig defaults();
};

/// Text of the shipped stopword file, embedded at build time.
std::string_view builtin_stopword_text();

/// Parses a stopword file: one term per line, '#' starts a comment line,
/// surrounding whitespace trimmed, terms lowercased.
std::unordered_set<std::string> parse_stopwords(std::string_view text);
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// Removes URLs: tokens starting with http://, https:// or www. (case
/// insensitive, at a word boundary) and bare domains followed by a path such
/// as "example.org/page". Removed spans are replaced by a space.
std::string strip_urls(std::string_view text);

/// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters.
/// Other code points pass through unchanged. Invalid UTF-8 bytes become
/// U+FFFD.
std::string utf8_lowercase(std::string_view text);

/// Runs, in order: URL removal, lowercasing, punctuation to space, digits
/// to space, whitespace tokenization, stopword removal.
///
/// "Punctuation" is any ASCII non-alphanumeric character and any non-ASCII
/// code point in the Unicode punctuation, symbol and emoji blocks; non-ASCII
/// letters and combining marks are kept. Digits are ASCII and fullwidth 0-9.
TokenList preprocess(std::string_view body, const PreprocessConfig& config);

/// Drops comments by bot authors and comments flagged deleted. Stable.
CorpusSlice filter_noise(const CorpusSlice& slice, const PreprocessConfig& config);

}  // namespace commlm
