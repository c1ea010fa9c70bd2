#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace intentminer {

namespace text {

// Decodes one UTF-8 code point starting at s[i]; advances i. Bytes that do
// not form a valid sequence are consumed one at a time and returned as-is,
// so malformed input degrades to per-byte handling instead of throwing.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + len > s.size()) {
    ++i;
    return b0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

inline bool is_space_cp(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x0085:
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return (cp >= 0x2000 && cp <= 0x200A);
  }
}

inline bool is_punct_cp(char32_t cp) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
  }
  switch (cp) {
    case 0x2018:  // left/right single quote
    case 0x2019:
    case 0x201C:  // left/right double quote
    case 0x201D:
    case 0x2013:  // dashes
    case 0x2014:
    case 0x2026:  // ellipsis
    case 0x00A1:
    case 0x00BF:
    case 0x00AB:
    case 0x00BB:
      return true;
    default:
      return false;
  }
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline bool is_url(std::string_view token) {
  const std::string t = to_lower(token);
  return t.rfind("http://", 0) == 0 || t.rfind("https://", 0) == 0 ||
         t.rfind("www.", 0) == 0;
}

// Strips leading and trailing punctuation code points ('#' and '@' prefixes
// included); interior punctuation is left alone.
inline std::string strip_edge_punct(std::string_view token) {
  std::vector<std::pair<std::size_t, std::size_t>> cps;  // (offset, length)
  std::size_t i = 0;
  std::vector<char32_t> decoded;
  while (i < token.size()) {
    const std::size_t start = i;
    decoded.push_back(decode_utf8(token, i));
    cps.emplace_back(start, i - start);
  }
  std::size_t lo = 0, hi = cps.size();
  while (lo < hi && is_punct_cp(decoded[lo])) ++lo;
  while (hi > lo && is_punct_cp(decoded[hi - 1])) --hi;
  if (lo >= hi) return {};
  const std::size_t begin = cps[lo].first;
  const std::size_t end = cps[hi - 1].first + cps[hi - 1].second;
  return std::string(token.substr(begin, end - begin));
}

// Whitespace split on Unicode spaces, then edge punctuation strip per token.
// Tokens that are pure punctuation vanish here.
inline std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t i = 0;
  std::size_t word_start = 0;
  bool in_word = false;
  const auto flush = [&](std::size_t end) {
    if (!in_word) return;
    std::string tok = strip_edge_punct(raw.substr(word_start, end - word_start));
    if (!tok.empty()) out.push_back(std::move(tok));
    in_word = false;
  };
  while (i < raw.size()) {
    const std::size_t at = i;
    const char32_t cp = decode_utf8(raw, i);
    if (is_space_cp(cp)) {
      flush(at);
    } else if (!in_word) {
      in_word = true;
      word_start = at;
    }
  }
  flush(raw.size());
  return out;
}

// Splits a token at interior punctuation, e.g. "don't" -> {"don", "t"}.
inline std::vector<std::string> split_on_punct(std::string_view token) {
  std::vector<std::string> out;
  std::string current;
  std::size_t i = 0;
  while (i < token.size()) {
    const std::size_t start = i;
    const char32_t cp = decode_utf8(token, i);
    if (is_punct_cp(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(token.substr(start, i - start));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace text

// Fixed English stopword list shipped with the artifact.
inline constexpr std::string_view kStopwordListId = "en-basic-v1";

inline const std::unordered_set<std::string_view>& stopword_list(
    std::string_view list_id = kStopwordListId) {
  static const std::unordered_set<std::string_view> words = {
      "a",          "about",   "above",    "after",   "again",      "against",
      "all",        "am",      "an",       "and",     "any",        "are",
      "as",         "at",      "be",       "because", "been",       "before",
      "being",      "below",   "between",  "both",    "but",        "by",
      "can",        "cannot",  "could",    "did",     "do",         "does",
      "doing",      "down",    "during",   "each",    "few",        "for",
      "from",       "further", "had",      "has",     "have",       "having",
      "he",         "her",     "here",     "hers",    "herself",    "him",
      "himself",    "his",     "how",      "i",       "if",         "in",
      "into",       "is",      "it",       "its",     "itself",     "just",
      "me",         "more",    "most",     "my",      "myself",     "no",
      "nor",        "not",     "now",      "of",      "off",        "on",
      "once",       "only",    "or",       "other",   "our",        "ours",
      "ourselves",  "out",     "over",     "own",     "same",       "she",
      "should",     "so",      "some",     "such",    "than",       "that",
      "the",        "their",   "theirs",   "them",    "themselves", "then",
      "there",      "these",   "they",     "this",    "those",      "through",
      "to",         "too",     "under",    "until",   "up",         "very",
      "was",        "we",      "were",     "what",    "when",       "where",
      "which",      "while",   "who",      "whom",    "why",        "will",
      "with",       "would",   "you",      "your",    "yours",      "yourself",
      "yourselves",
  };
  if (list_id != kStopwordListId)
    throw std::invalid_argument("unknown stopword list id: " + std::string(list_id));
  return words;
}

enum class PosTag { noun, verb, adjective, adverb, function_word };

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual PosTag tag(std::string_view token) const = 0;
};

// Closed-class lexicon plus suffix rules. The original workflow used a
// trained tagger; this stays dependency-free and errs toward keeping words
// (unknown words tag as nouns and survive the content filter).
class HeuristicPosTagger final : public PosTagger {
 public:
  PosTag tag(std::string_view token) const override {
    if (stopword_list().count(token) > 0) return PosTag::function_word;
    const auto ends_with = [&](std::string_view suffix) {
      return token.size() > suffix.size() + 1 &&
             token.substr(token.size() - suffix.size()) == suffix;
    };
    if (ends_with("ly")) return PosTag::adverb;
    if (ends_with("ing") || ends_with("ed")) return PosTag::verb;
    for (std::string_view s : {"ous", "ful", "ive", "ish", "less", "able", "ible", "ic"})
      if (ends_with(s)) return PosTag::adjective;
    return PosTag::noun;
  }
};

inline const PosTagger& default_pos_tagger() {
  static const HeuristicPosTagger tagger;
  return tagger;
}

}  // namespace intentminer
