#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentminer/corpus.hpp"
#include "intentminer/csv.hpp"
#include "intentminer/eval.hpp"
#include "intentminer/featsel.hpp"
#include "intentminer/synth.hpp"
#include "intentminer/version.hpp"

namespace intentminer {

enum class Scheme { all, one, two };  // all = no selection, the benchmark baseline

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::all: return "all";
    case Scheme::one: return "one";
    case Scheme::two: return "two";
  }
  throw std::logic_error("unreachable scheme");
}

inline Scheme scheme_from_string(std::string_view s) {
  if (s == "all") return Scheme::all;
  if (s == "one") return Scheme::one;
  if (s == "two") return Scheme::two;
  throw std::invalid_argument("scheme must be \"all\", \"one\" or \"two\", got \"" +
                              std::string(s) + "\"");
}

struct PipelineConfig {
  std::string corpus_path;
  std::string format = "auto";  // jsonl | csv | auto (by extension)
  bool relabel = false;
  PreprocessConfig preprocess;
  std::size_t min_df = 1;
  MatrixMode mode = MatrixMode::binary;
  double ig_threshold = 0.0;
  Scheme scheme = Scheme::one;
  std::optional<ClassifierSpec> wrapper_spec;  // scheme two only
  ClassifierSpec final_spec = ClassifierSpec::dt();
  std::size_t ffs_budget = 20;
  std::size_t cv_k = 10;
  std::uint64_t seed = 42;
  std::string output_dir;
  bool include_timing = false;  // timing makes eval.json nondeterministic

  void validate() const {
    if (corpus_path.empty()) throw std::invalid_argument("corpus_path must not be empty");
    if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
    if (cv_k < 2) throw std::invalid_argument("cv_k must be >= 2");
    if (scheme == Scheme::two && !wrapper_spec)
      throw std::invalid_argument("scheme two requires a wrapper_spec");
    if (min_df < 1) throw std::invalid_argument("min_df must be >= 1");
  }

  std::string feature_selection_name() const {
    switch (scheme) {
      case Scheme::all: return "all-features";
      case Scheme::one: return "ig";
      case Scheme::two:
        return "ig+" + std::string(to_string(wrapper_spec ? wrapper_spec->kind()
                                                          : ClassifierKind::nb));
    }
    throw std::logic_error("unreachable scheme");
  }
};

inline nlohmann::json preprocess_config_to_json(const PreprocessConfig& p) {
  return {{"strip_urls", p.strip_urls},
          {"lowercase", p.lowercase},
          {"remove_punct", p.remove_punct},
          {"remove_stopwords", p.remove_stopwords},
          {"pos_filter", p.pos_filter},
          {"stopword_list_id", p.stopword_list_id}};
}

inline PreprocessConfig preprocess_config_from_json(const nlohmann::json& j) {
  PreprocessConfig p;
  p.strip_urls = j.value("strip_urls", p.strip_urls);
  p.lowercase = j.value("lowercase", p.lowercase);
  p.remove_punct = j.value("remove_punct", p.remove_punct);
  p.remove_stopwords = j.value("remove_stopwords", p.remove_stopwords);
  p.pos_filter = j.value("pos_filter", p.pos_filter);
  p.stopword_list_id = j.value("stopword_list_id", p.stopword_list_id);
  return p;
}

inline nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["corpus_path"] = c.corpus_path;
  j["format"] = c.format;
  j["relabel"] = c.relabel;
  j["preprocess"] = preprocess_config_to_json(c.preprocess);
  j["min_df"] = c.min_df;
  j["mode"] = std::string(to_string(c.mode));
  j["ig_threshold"] = c.ig_threshold;
  j["scheme"] = std::string(to_string(c.scheme));
  if (c.wrapper_spec) j["wrapper_spec"] = spec_to_json(*c.wrapper_spec);
  j["final_spec"] = spec_to_json(c.final_spec);
  j["ffs_budget"] = c.ffs_budget;
  j["cv_k"] = c.cv_k;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["include_timing"] = c.include_timing;
  return j;
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  c.corpus_path = j.value("corpus_path", std::string());
  c.format = j.value("format", c.format);
  c.relabel = j.value("relabel", c.relabel);
  if (j.contains("preprocess")) c.preprocess = preprocess_config_from_json(j["preprocess"]);
  c.min_df = j.value("min_df", c.min_df);
  if (j.contains("mode")) c.mode = matrix_mode_from_string(j["mode"].get<std::string>());
  c.ig_threshold = j.value("ig_threshold", c.ig_threshold);
  if (j.contains("scheme")) c.scheme = scheme_from_string(j["scheme"].get<std::string>());
  if (j.contains("wrapper_spec")) c.wrapper_spec = spec_from_json(j["wrapper_spec"]);
  if (j.contains("final_spec")) c.final_spec = spec_from_json(j["final_spec"]);
  c.ffs_budget = j.value("ffs_budget", c.ffs_budget);
  c.cv_k = j.value("cv_k", c.cv_k);
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", std::string());
  c.include_timing = j.value("include_timing", c.include_timing);
  return c;
}

// Accepts either a raw pipeline config or a run manifest (replay).
inline PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed config JSON in " + path + ": " + e.what());
  }
  if (j.contains("config") && j.contains("manifest_version"))
    return pipeline_config_from_json(j["config"]);
  return pipeline_config_from_json(j);
}

struct PipelineResult {
  std::size_t n_docs = 0;
  std::size_t n_yes = 0;
  std::size_t n_no = 0;
  std::size_t vocab_size = 0;
  std::size_t ig_positive = 0;
  FeatureSubset selected;
  std::optional<SelectionTrace> trace;
  EvalReport report;
  std::vector<std::string> files_written;
};

namespace pipeline_detail {

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

inline Corpus read_corpus(const PipelineConfig& config) {
  std::string format = config.format;
  if (format == "auto") {
    const auto dot = config.corpus_path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : config.corpus_path.substr(dot + 1);
    format = ext == "csv" ? "csv" : "jsonl";
  }
  if (format == "csv") return ingest_csv(config.corpus_path);
  if (format == "jsonl") return ingest_jsonl(config.corpus_path);
  throw std::invalid_argument("format must be \"jsonl\", \"csv\" or \"auto\"");
}

}  // namespace pipeline_detail

// Runs the configured scheme end to end. Output files are accumulated in
// memory and written only after every stage has succeeded, so a failed run
// never leaves partially overwritten reports behind.
inline PipelineResult run_pipeline(const PipelineConfig& config) {
  namespace pd = pipeline_detail;
  pd::stage("config", [&] { config.validate(); return 0; });

  PipelineResult result;

  Corpus corpus = pd::stage("ingest", [&] { return pd::read_corpus(config); });
  corpus = pd::stage("label", [&] {
    if (config.relabel || !corpus.fully_labeled()) {
      Corpus labeled = label_by_seeds(corpus);
      if (!config.relabel) {
        // Given labels win; seeds only fill the gaps.
        for (std::size_t i = 0; i < corpus.docs.size(); ++i)
          if (corpus.docs[i].label) labeled.docs[i].label = corpus.docs[i].label;
      }
      return labeled;
    }
    return corpus;
  });
  result.n_docs = corpus.size();
  const auto [yes, no] = class_counts(corpus);
  result.n_yes = yes;
  result.n_no = no;

  corpus = pd::stage("preprocess", [&] { return preprocess(corpus, config.preprocess); });
  const Vocabulary vocab =
      pd::stage("vocabulary", [&] { return build_vocabulary(corpus, config.min_df); });
  result.vocab_size = vocab.size();
  const FeatureMatrix matrix =
      pd::stage("vectorize", [&] { return vectorize(corpus, vocab, config.mode); });
  const std::vector<Label> labels = pd::stage("labels", [&] { return require_labels(matrix); });

  std::vector<IgScore> scores;
  if (config.scheme != Scheme::all) {
    scores = pd::stage("ig_scores", [&] { return ig_scores(matrix, labels); });
    result.selected =
        pd::stage("select_by_ig", [&] { return select_by_ig(scores, config.ig_threshold); });
    for (const auto& s : scores) result.ig_positive += (s.gain > 0.0);
  } else {
    result.selected.provenance = Provenance::manual;
    result.selected.indices.resize(vocab.size());
    for (std::uint32_t i = 0; i < vocab.size(); ++i) result.selected.indices[i] = i;
  }

  if (config.scheme == Scheme::two) {
    auto [subset, trace] = pd::stage("forward_select", [&] {
      return forward_select(matrix, labels, *config.wrapper_spec, result.selected,
                            config.ffs_budget);
    });
    result.selected = std::move(subset);
    result.trace = std::move(trace);
  }

  const FeatureMatrix final_matrix =
      pd::stage("project", [&] { return project(matrix, result.selected.indices); });
  const FoldPlan plan = pd::stage("folds", [&] {
    return kfold_split_stratified(labels, config.cv_k, config.seed);
  });
  result.report = pd::stage("cross_validate", [&] {
    auto report = cross_validate(config.final_spec, final_matrix, labels, plan);
    report.features = result.selected;
    return report;
  });

  // --- assemble and write reports ---
  std::map<std::string, std::string> outputs;

  if (config.scheme != Scheme::all) {
    std::ostringstream ig_csv;
    write_ig_report(scores, vocab, ig_csv);
    outputs["ig_report.csv"] = ig_csv.str();
  }
  if (result.trace) {
    std::ostringstream trace_csv;
    write_selection_trace(*result.trace, vocab, trace_csv);
    outputs["selection_trace.csv"] = trace_csv.str();
  }
  {
    std::ostringstream feats;
    feats << "term_index,term\n";
    for (const auto idx : result.selected.indices)
      feats << idx << ',' << csv::quote(vocab.terms.at(idx)) << "\n";
    outputs["features.csv"] = feats.str();
  }
  outputs["eval.json"] = report_to_json(result.report, config.include_timing).dump(2) + "\n";
  {
    std::ostringstream eval_csv;
    write_report_csv(result.report, config.feature_selection_name(), eval_csv);
    outputs["eval.csv"] = eval_csv.str();
  }
  {
    nlohmann::json manifest;
    manifest["manifest_version"] = kManifestFormatVersion;
    manifest["intentminer_version"] = std::string(kVersion);
    manifest["config"] = pipeline_config_to_json(config);
    manifest["corpus"] = {{"path", config.corpus_path},
                          {"n_docs", result.n_docs},
                          {"n_yes", result.n_yes},
                          {"n_no", result.n_no},
                          {"vocab_size", result.vocab_size},
                          {"matrix_nnz", matrix.nnz()}};
    nlohmann::json selection;
    selection["method"] = config.feature_selection_name();
    selection["selected_count"] = result.selected.indices.size();
    if (config.scheme != Scheme::all) selection["ig_positive"] = result.ig_positive;
    nlohmann::json selected = nlohmann::json::array();
    for (const auto idx : result.selected.indices) {
      nlohmann::json entry = {{"index", idx}, {"term", vocab.terms.at(idx)}};
      if (config.scheme != Scheme::all) entry["gain"] = scores.at(idx).gain;
      selected.push_back(std::move(entry));
    }
    selection["selected"] = std::move(selected);
    if (result.trace) {
      selection["ffs"] = {{"budget", config.ffs_budget},
                          {"chosen_size", result.trace->chosen_size},
                          {"steps", result.trace->steps.size()}};
    }
    manifest["selection"] = std::move(selection);
    outputs["manifest.json"] = manifest.dump(2) + "\n";
  }

  pd::stage("write_reports", [&] {
    std::filesystem::create_directories(config.output_dir);
    for (const auto& [name, content] : outputs) {
      const auto path = std::filesystem::path(config.output_dir) / name;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      out << content;
      result.files_written.push_back(path.string());
    }
    return 0;
  });

  return result;
}

// --- the full configuration grid of the experiment tables ---

namespace pipeline_detail {

inline int selection_rank(const std::string& s) {
  static const std::map<std::string, int> ranks = {
      {"all-features", 0}, {"ig", 1}, {"ig+nb", 2}, {"ig+svm", 3}, {"ig+ann", 4}, {"ig+dt", 5}};
  const auto it = ranks.find(s);
  return it == ranks.end() ? 100 : it->second;
}

inline int classifier_rank(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::dt: return 0;
    case ClassifierKind::ann: return 1;
    case ClassifierKind::svm: return 2;
    case ClassifierKind::nb: return 3;
  }
  return 4;
}

}  // namespace pipeline_detail

struct MatrixRow {
  std::string config_file;
  std::string feature_selection;
  std::optional<ClassifierKind> classifier;
  std::optional<Metrics> aggregate;
  std::string error;
};

// Runs every config in the directory and writes one combined CSV in the
// paper's table shape. Individual failures are recorded per row and do not
// stop the sweep.
inline std::vector<MatrixRow> run_matrix(const std::string& config_dir,
                                         const std::string& out_csv) {
  std::vector<std::filesystem::path> configs;
  if (!std::filesystem::is_directory(config_dir))
    throw std::invalid_argument("config directory not found: " + config_dir);
  for (const auto& entry : std::filesystem::directory_iterator(config_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      configs.push_back(entry.path());
  if (configs.empty())
    throw std::runtime_error("no .json configs in directory: " + config_dir);
  std::sort(configs.begin(), configs.end());

  std::vector<MatrixRow> rows;
  for (const auto& path : configs) {
    MatrixRow row;
    row.config_file = path.filename().string();
    try {
      const PipelineConfig config = load_pipeline_config(path.string());
      row.feature_selection = config.feature_selection_name();
      row.classifier = config.final_spec.kind();
      const auto result = run_pipeline(config);
      row.aggregate = result.report.aggregate;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const MatrixRow& a, const MatrixRow& b) {
    const int sa = pipeline_detail::selection_rank(a.feature_selection);
    const int sb = pipeline_detail::selection_rank(b.feature_selection);
    if (sa != sb) return sa < sb;
    const int ca = a.classifier ? pipeline_detail::classifier_rank(*a.classifier) : 100;
    const int cb = b.classifier ? pipeline_detail::classifier_rank(*b.classifier) : 100;
    return ca < cb;
  });

  std::ostringstream csv_text;
  csv_text << "classifier,feature_selection,recall,precision,f_measure,accuracy\n";
  const auto cell = [](const std::optional<double>& v) {
    return v ? csv::fixed(*v) : std::string("NA");
  };
  std::ostringstream errors;
  for (const auto& row : rows) {
    const std::string cls = row.classifier ? std::string(to_string(*row.classifier)) : "NA";
    if (row.aggregate) {
      csv_text << cls << ',' << csv::quote(row.feature_selection) << ','
               << cell(row.aggregate->recall) << ',' << cell(row.aggregate->precision) << ','
               << cell(row.aggregate->f_measure) << ',' << cell(row.aggregate->accuracy) << "\n";
    } else {
      csv_text << cls << ',' << csv::quote(row.feature_selection) << ",NA,NA,NA,NA\n";
      errors << row.config_file << ": " << row.error << "\n";
    }
  }

  const auto out_path = std::filesystem::path(out_csv);
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary: " + out_csv);
  out << csv_text.str();
  const std::string errs = errors.str();
  if (!errs.empty()) {
    std::ofstream err_out(out_path.parent_path() / "matrix_errors.txt", std::ios::binary);
    err_out << errs;
  }
  return rows;
}

// Emits the {all-features, ig, ig+nb, ig+svm, ig+ann, ig+dt} x {dt, ann,
// svm, nb} grid as config files derived from a base config.
inline std::vector<std::string> emit_matrix_grid(const PipelineConfig& base,
                                                 const std::string& config_dir) {
  std::filesystem::create_directories(config_dir);
  struct Sel {
    const char* name;
    Scheme scheme;
    std::optional<ClassifierKind> wrapper;
  };
  const std::vector<Sel> selections = {
      {"all-features", Scheme::all, std::nullopt}, {"ig", Scheme::one, std::nullopt},
      {"ig+nb", Scheme::two, ClassifierKind::nb},  {"ig+svm", Scheme::two, ClassifierKind::svm},
      {"ig+ann", Scheme::two, ClassifierKind::ann}, {"ig+dt", Scheme::two, ClassifierKind::dt}};
  const std::vector<ClassifierKind> finals = {ClassifierKind::dt, ClassifierKind::ann,
                                              ClassifierKind::svm, ClassifierKind::nb};
  const auto default_spec = [&](ClassifierKind kind) {
    switch (kind) {
      case ClassifierKind::dt: return ClassifierSpec::dt({}, base.seed);
      case ClassifierKind::nb: return ClassifierSpec::nb({}, base.seed);
      case ClassifierKind::svm: return ClassifierSpec::svm({}, base.seed);
      case ClassifierKind::ann: return ClassifierSpec::ann({}, base.seed);
    }
    throw std::logic_error("unreachable classifier kind");
  };

  std::vector<std::string> written;
  int index = 0;
  for (const auto& sel : selections) {
    for (const auto fin : finals) {
      PipelineConfig config = base;
      config.scheme = sel.scheme;
      config.wrapper_spec =
          sel.wrapper ? std::optional<ClassifierSpec>(default_spec(*sel.wrapper)) : std::nullopt;
      config.final_spec = default_spec(fin);
      char name[64];
      std::snprintf(name, sizeof(name), "%02d_%s_%s.json", index++, sel.name,
                    std::string(to_string(fin)).c_str());
      std::string file_name = name;
      for (auto& c : file_name)
        if (c == '+') c = '-';
      config.output_dir =
          (std::filesystem::path(config_dir) / "runs" / file_name.substr(0, file_name.size() - 5))
              .string();
      const auto path = std::filesystem::path(config_dir) / file_name;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write config: " + path.string());
      out << pipeline_config_to_json(config).dump(2) << "\n";
      written.push_back(path.string());
    }
  }
  return written;
}

}  // namespace intentminer
