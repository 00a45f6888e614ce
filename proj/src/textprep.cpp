#include "commlm/textprep.hpp"

#include <algorithm>
#include <cstdint>

#include "commlm/line_io.hpp"

namespace commlm {

namespace detail {
extern const std::string_view kBuiltinStopwords;
}

std::string_view builtin_stopword_text() { return detail::kBuiltinStopwords; }

std::unordered_set<std::string> parse_stopwords(std::string_view text) {
  std::unordered_set<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) continue;
    line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    if (line.front() == '#') continue;
    out.insert(utf8_lowercase(line));
  }
  return out;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  return parse_stopwords(read_text_file(path));
}

PreprocessConfig PreprocessConfig::defaults() {
  PreprocessConfig c;
  c.stopwords = parse_stopwords(builtin_stopword_text());
  c.bot_authors = {"AutoModerator"};
  return c;
}

// ---------------------------------------------------------------------------
// UTF-8 helpers

namespace {

constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point at s[i], advancing i. Malformed sequences yield
/// U+FFFD and consume one byte.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) len = 2, cp = b0 & 0x1F;
  else if ((b0 & 0xF0) == 0xE0) len = 3, cp = b0 & 0x0F;
  else if ((b0 & 0xF8) == 0xF0) len = 4, cp = b0 & 0x07;
  else {
    ++i;
    return kReplacement;
  }
  if (i + static_cast<std::size_t>(len) > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kReplacement;
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Simple (one-to-one) lowercase mappings from UnicodeData for the blocks
// listed in the header.
char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 0x20 : cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x100, 0x17F)) {
    if (cp == 0x130) return 'i';
    if (cp == 0x178) return 0xFF;
    if ((in(cp, 0x100, 0x12F) || in(cp, 0x132, 0x137) || in(cp, 0x14A, 0x177)) && cp % 2 == 0) return cp + 1;
    if ((in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) && cp % 2 == 1) return cp + 1;
    return cp;
  }
  if (in(cp, 0x370, 0x3FF)) {
    if (in(cp, 0x391, 0x3A1) || in(cp, 0x3A3, 0x3AB)) return cp + 0x20;
    if (cp == 0x386) return 0x3AC;
    if (in(cp, 0x388, 0x38A)) return cp + 0x25;
    if (cp == 0x38C) return 0x3CC;
    if (in(cp, 0x38E, 0x38F)) return cp + 0x3F;
    return cp;
  }
  if (in(cp, 0x400, 0x4FF)) {
    if (in(cp, 0x410, 0x42F)) return cp + 0x20;
    if (in(cp, 0x400, 0x40F)) return cp + 0x50;
    if ((in(cp, 0x460, 0x481) || in(cp, 0x48A, 0x4BF) || in(cp, 0x4D0, 0x4FF)) && cp % 2 == 0) return cp + 1;
    if (cp == 0x4C0) return 0x4CF;
    if (in(cp, 0x4C1, 0x4CE) && cp % 2 == 1) return cp + 1;
    return cp;
  }
  return cp;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' || cp == 0x85 ||
         cp == 0xA0 || cp == 0x1680 || in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_digit(char32_t cp) {
  return in(cp, '0', '9') || in(cp, 0xFF10, 0xFF19) || in(cp, 0x660, 0x669) || in(cp, 0x6F0, 0x6F9) ||
         in(cp, 0x966, 0x96F);
}

// Punctuation, symbols, emoji and other non-letter code points.
bool is_punct(char32_t cp) {
  if (cp < 0x80) return !((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9'));
  if (in(cp, 0x80, 0xBF)) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp == 0x37E || cp == 0x387) return true;
  return in(cp, 0x2000, 0x2BFF) || in(cp, 0x2E00, 0x2E7F) || in(cp, 0x3000, 0x303F) ||
         in(cp, 0xE000, 0xF8FF) || in(cp, 0xFE00, 0xFE1F) || in(cp, 0xFE30, 0xFE6F) ||
         in(cp, 0xFF01, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) ||
         in(cp, 0xFF5B, 0xFF65) || in(cp, 0xFFF0, 0xFFFF) || in(cp, 0x1F000, 0x1FBFF) ||
         in(cp, 0xE0000, 0xE007F);
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 0x20) : c; }
bool ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
bool ascii_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// Position where a URL starts inside a whitespace-free chunk, or npos.
std::size_t url_start(std::string_view chunk) {
  std::string lower(chunk);
  std::transform(lower.begin(), lower.end(), lower.begin(), ascii_lower);

  for (std::size_t p = 0; p < lower.size(); ++p) {
    if (p > 0 && ascii_alnum(lower[p - 1])) continue;
    const std::string_view rest(lower.data() + p, lower.size() - p);
    if (rest.starts_with("http://") || rest.starts_with("https://") || rest.starts_with("www.")) return p;
  }

  // Bare domain with a path: label(.label)+/... where the last label is
  // alphabetic and at least two characters long.
  for (std::size_t slash = lower.find('/'); slash != std::string::npos; slash = lower.find('/', slash + 1)) {
    std::size_t d = slash;
    auto domain_char = [](char c) { return ascii_alnum(c) || c == '.' || c == '-'; };
    while (d > 0 && domain_char(lower[d - 1])) --d;
    const std::string_view domain(lower.data() + d, slash - d);
    if (domain.empty() || domain.front() == '.' || domain.back() == '.') continue;
    const auto dot = domain.rfind('.');
    if (dot == std::string_view::npos) continue;
    const auto tld = domain.substr(dot + 1);
    if (tld.size() < 2 ||
        !std::all_of(tld.begin(), tld.end(), [](char c) { return c >= 'a' && c <= 'z'; }))
      continue;
    return d;
  }
  return std::string::npos;
}

}  // namespace

std::string strip_urls(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (ascii_ws(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !ascii_ws(text[j])) ++j;
    const std::string_view chunk = text.substr(i, j - i);
    const std::size_t cut = url_start(chunk);
    if (cut == std::string::npos) {
      out.append(chunk);
    } else {
      out.append(chunk.substr(0, cut));
      out.push_back(' ');
    }
    i = j;
  }
  return out;
}

std::string utf8_lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) encode(to_lower(decode(text, i)), out);
  return out;
}

TokenList preprocess(std::string_view body, const PreprocessConfig& config) {
  std::string text = config.strip_urls ? strip_urls(body) : std::string(body);

  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    char32_t cp = decode(text, i);
    if (config.lowercase) cp = to_lower(cp);
    if (is_space(cp) || (config.strip_digits && is_digit(cp)) || (config.strip_punct && is_punct(cp)))
      cp = ' ';
    encode(cp, cleaned);
  }

  TokenList tokens;
  std::size_t pos = 0;
  while (pos < cleaned.size()) {
    const auto b = cleaned.find_first_not_of(' ', pos);
    if (b == std::string::npos) break;
    auto e = cleaned.find(' ', b);
    if (e == std::string::npos) e = cleaned.size();
    std::string tok = cleaned.substr(b, e - b);
    if (!config.stopwords.contains(tok)) tokens.push_back(std::move(tok));
    pos = e;
  }
  return tokens;
}

CorpusSlice filter_noise(const CorpusSlice& slice, const PreprocessConfig& config) {
  CorpusSlice out;
  out.source_label = slice.source_label;
  out.target_group = slice.target_group;
  for (const auto& c : slice.comments)
    if (!c.deleted && !config.bot_authors.contains(c.author)) out.comments.push_back(c);
  return out;
}

}  // namespace commlm
