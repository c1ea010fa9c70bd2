#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "intentminer/parallel.hpp"
#include "intentminer/text.hpp"

namespace intentminer {

enum class Label : std::uint8_t { No = 0, Yes = 1 };

inline std::string_view to_string(Label label) {
  return label == Label::Yes ? "Yes" : "No";
}

inline Label label_from_string(std::string_view s) {
  if (s == "Yes") return Label::Yes;
  if (s == "No") return Label::No;
  throw std::invalid_argument("label must be \"Yes\" or \"No\", got \"" + std::string(s) + "\"");
}

struct Document {
  std::string id;
  std::string raw_text;
  std::string lang = "unknown";
  std::vector<std::string> tokens;  // empty until preprocessed
  std::optional<Label> label;
};

// The class set is fixed and binary: {Yes, No}.
struct Corpus {
  std::vector<Document> docs;

  std::size_t size() const { return docs.size(); }
  bool fully_labeled() const {
    for (const auto& d : docs)
      if (!d.label) return false;
    return true;
  }
};

struct SeedVector {
  std::vector<std::string> phrases;  // lowercase, 1+ tokens each

  // The intention seed phrases the corpus labeling is built around.
  static SeedVector defaults() {
    return {{"wish", "want", "need", "look for", "request", "like", "desire"}};
  }

  void validate() const {
    if (phrases.empty()) throw std::invalid_argument("seed vector is empty");
    std::unordered_set<std::string_view> seen;
    for (const auto& p : phrases) {
      if (text::tokenize(text::to_lower(p)).empty())
        throw std::invalid_argument("seed phrase has no tokens: \"" + p + "\"");
      if (!seen.insert(p).second)
        throw std::invalid_argument("duplicate seed phrase: \"" + p + "\"");
    }
  }
};

struct PreprocessConfig {
  bool strip_urls = true;
  bool lowercase = true;
  bool remove_punct = true;
  bool remove_stopwords = true;
  bool pos_filter = false;
  std::string stopword_list_id = std::string(kStopwordListId);
};

namespace detail {

inline std::string jsonl_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

inline Document doc_from_json(const nlohmann::json& obj, std::size_t line_no) {
  if (!obj.is_object()) throw std::runtime_error(jsonl_error(line_no, "not a JSON object"));
  Document doc;
  if (!obj.contains("id") || !obj["id"].is_string() || obj["id"].get<std::string>().empty())
    throw std::runtime_error(jsonl_error(line_no, "missing or empty `id` field"));
  doc.id = obj["id"].get<std::string>();
  if (!obj.contains("text") || !obj["text"].is_string())
    throw std::runtime_error(jsonl_error(line_no, "missing `text` field"));
  doc.raw_text = obj["text"].get<std::string>();
  if (obj.contains("lang")) {
    if (!obj["lang"].is_string())
      throw std::runtime_error(jsonl_error(line_no, "`lang` must be a string"));
    doc.lang = obj["lang"].get<std::string>();
  }
  if (obj.contains("label")) {
    if (!obj["label"].is_string())
      throw std::runtime_error(jsonl_error(line_no, "`label` must be a string"));
    try {
      doc.label = label_from_string(obj["label"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(jsonl_error(line_no, e.what()));
    }
  }
  return doc;
}

// RFC 4180 record reader: quoted fields, doubled-quote escapes, CRLF line
// ends, embedded newlines inside quotes.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(std::move(field));
  return true;
}

inline void check_duplicate_ids(const Corpus& corpus) {
  std::unordered_set<std::string_view> ids;
  for (const auto& doc : corpus.docs)
    if (!ids.insert(doc.id).second)
      throw std::runtime_error("duplicate document id: \"" + doc.id + "\"");
}

}  // namespace detail

inline Corpus ingest_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(detail::jsonl_error(line_no, std::string("malformed JSON (") + e.what() + ")"));
    }
    corpus.docs.push_back(detail::doc_from_json(obj, line_no));
  }
  detail::check_duplicate_ids(corpus);
  return corpus;
}

// CSV ingestion with the same record semantics as JSONL. Header must name
// `id` and `text`; `lang` and `label` columns are optional.
inline Corpus ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<std::string> fields;
  if (!detail::read_csv_record(in, fields))
    throw std::runtime_error("empty CSV file: " + path);
  int id_col = -1, text_col = -1, lang_col = -1, label_col = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "id") id_col = static_cast<int>(i);
    else if (fields[i] == "text") text_col = static_cast<int>(i);
    else if (fields[i] == "lang") lang_col = static_cast<int>(i);
    else if (fields[i] == "label") label_col = static_cast<int>(i);
  }
  if (id_col < 0 || text_col < 0)
    throw std::runtime_error("CSV header must contain `id` and `text` columns");

  Corpus corpus;
  std::size_t line_no = 1;
  while (detail::read_csv_record(in, fields)) {
    ++line_no;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank trailing line
    const auto get = [&](int col) -> std::string {
      if (col < 0 || static_cast<std::size_t>(col) >= fields.size()) return {};
      return fields[static_cast<std::size_t>(col)];
    };
    Document doc;
    doc.id = get(id_col);
    if (doc.id.empty())
      throw std::runtime_error(detail::jsonl_error(line_no, "missing or empty `id` field"));
    if (static_cast<std::size_t>(text_col) >= fields.size())
      throw std::runtime_error(detail::jsonl_error(line_no, "missing `text` field"));
    doc.raw_text = get(text_col);
    const std::string lang = get(lang_col);
    if (!lang.empty()) doc.lang = lang;
    const std::string label = get(label_col);
    if (!label.empty()) {
      try {
        doc.label = label_from_string(label);
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(detail::jsonl_error(line_no, e.what()));
      }
    }
    corpus.docs.push_back(std::move(doc));
  }
  detail::check_duplicate_ids(corpus);
  return corpus;
}

inline void write_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.docs) {
    nlohmann::json obj;
    obj["id"] = doc.id;
    obj["text"] = doc.raw_text;
    obj["lang"] = doc.lang;
    if (doc.label) obj["label"] = std::string(to_string(*doc.label));
    obj["tokens"] = doc.tokens;
    out << obj.dump() << "\n";
  }
}

inline void write_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  write_jsonl(corpus, out);
}

inline Corpus filter_language(const Corpus& corpus, const std::string& lang) {
  if (lang.size() != 2 || !std::isalpha(static_cast<unsigned char>(lang[0])) ||
      !std::isalpha(static_cast<unsigned char>(lang[1])))
    throw std::invalid_argument("language filter expects an ISO-639-1 code, got \"" + lang + "\"");
  Corpus out;
  for (const auto& doc : corpus.docs)
    if (doc.lang == lang) out.docs.push_back(doc);
  return out;
}

namespace detail {

inline bool contains_phrase(const std::vector<std::string>& tokens,
                            const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) {
      if (tokens[i + k] != phrase[k]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace detail

// Yes iff any seed phrase occurs as a whole-token contiguous subsequence of
// the lowercased, punctuation-stripped token stream. No stemming: "looking"
// does not match "look".
inline Corpus label_by_seeds(Corpus corpus, const SeedVector& seeds = SeedVector::defaults()) {
  seeds.validate();
  std::vector<std::vector<std::string>> phrase_tokens;
  phrase_tokens.reserve(seeds.phrases.size());
  for (const auto& p : seeds.phrases)
    phrase_tokens.push_back(text::tokenize(text::to_lower(p)));

  parallel_for(corpus.docs.size(), [&](std::size_t i) {
    auto& doc = corpus.docs[i];
    const auto tokens = text::tokenize(text::to_lower(doc.raw_text));
    bool hit = false;
    for (const auto& phrase : phrase_tokens) {
      if (detail::contains_phrase(tokens, phrase)) {
        hit = true;
        break;
      }
    }
    doc.label = hit ? Label::Yes : Label::No;
  });
  return corpus;
}

// Populates tokens per config. Stages run in a fixed order: URL removal,
// lowercasing, punctuation splitting, stopword removal, POS filtering.
// raw_text is never touched; a document may end up with zero tokens.
inline Corpus preprocess(Corpus corpus, const PreprocessConfig& config = {},
                         const PosTagger& tagger = default_pos_tagger()) {
  const auto& stopwords = stopword_list(config.stopword_list_id);
  parallel_for(corpus.docs.size(), [&](std::size_t i) {
    auto& doc = corpus.docs[i];
    std::vector<std::string> tokens;
    for (auto& tok : text::tokenize(doc.raw_text)) {
      if (config.strip_urls && text::is_url(tok)) continue;
      std::string t = config.lowercase ? text::to_lower(tok) : std::move(tok);
      std::vector<std::string> parts;
      if (config.remove_punct) {
        parts = text::split_on_punct(t);
      } else {
        parts.push_back(std::move(t));
      }
      for (auto& part : parts) {
        if (config.remove_stopwords && stopwords.count(part) > 0) continue;
        if (config.pos_filter && tagger.tag(part) == PosTag::function_word) continue;
        tokens.push_back(std::move(part));
      }
    }
    doc.tokens = std::move(tokens);
  });
  return corpus;
}

inline std::pair<std::size_t, std::size_t> class_counts(const Corpus& corpus) {
  std::size_t yes = 0, no = 0;
  for (const auto& doc : corpus.docs) {
    if (!doc.label) continue;
    (*doc.label == Label::Yes ? yes : no) += 1;
  }
  return {yes, no};
}

}  // namespace intentminer
