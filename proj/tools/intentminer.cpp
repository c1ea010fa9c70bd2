// Command-line front end: synthetic corpus generation, corpus ingestion and
// preprocessing, feature selection, training, evaluation, and the full
// scheme pipelines.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "intentminer/classifier.hpp"
#include "intentminer/corpus.hpp"
#include "intentminer/eval.hpp"
#include "intentminer/featsel.hpp"
#include "intentminer/pipeline.hpp"
#include "intentminer/synth.hpp"
#include "intentminer/version.hpp"

namespace im = intentminer;
namespace fs = std::filesystem;

namespace {

im::ClassifierSpec parse_spec(const std::string& spec_arg, std::uint64_t seed) {
  im::ClassifierSpec spec;
  if (!spec_arg.empty() && spec_arg.front() == '{') {
    spec = im::spec_from_json(nlohmann::json::parse(spec_arg));
  } else {
    const auto kind = im::classifier_kind_from_string(spec_arg);
    switch (kind) {
      case im::ClassifierKind::dt: spec = im::ClassifierSpec::dt(); break;
      case im::ClassifierKind::nb: spec = im::ClassifierSpec::nb(); break;
      case im::ClassifierKind::svm: spec = im::ClassifierSpec::svm(); break;
      case im::ClassifierKind::ann: spec = im::ClassifierSpec::ann(); break;
    }
  }
  spec.seed = seed;
  return spec;
}

std::vector<std::uint32_t> read_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open features file: " + path);
  std::vector<std::uint32_t> indices;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {  // "term_index,term"
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    indices.push_back(static_cast<std::uint32_t>(std::stoul(line.substr(0, comma))));
  }
  if (indices.empty()) throw std::runtime_error("features file is empty: " + path);
  return indices;
}

im::Corpus read_corpus_arg(const std::string& path, const std::string& format) {
  std::string fmt = format;
  if (fmt == "auto") {
    const auto dot = path.rfind('.');
    fmt = (dot != std::string::npos && path.substr(dot + 1) == "csv") ? "csv" : "jsonl";
  }
  return fmt == "csv" ? im::ingest_csv(path) : im::ingest_jsonl(path);
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intention mining: seed labeling, IG / hybrid feature selection, classification"};
  app.set_version_flag("--version", std::string(im::kVersion));
  app.require_subcommand(1);

  // --- synth ---
  auto* synth = app.add_subcommand("synth", "generate a synthetic seed-phrase corpus");
  im::SynthConfig synth_cfg;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output JSONL path")->required();
  synth->add_option("--docs", synth_cfg.n_docs, "total documents");
  synth->add_option("--yes", synth_cfg.n_yes, "documents labeled Yes");
  synth->add_option("--noise", synth_cfg.noise_rate, "label noise rate");
  synth->add_option("--fillers", synth_cfg.n_fillers, "filler vocabulary size");
  synth->add_option("--url-rate", synth_cfg.url_rate, "fraction of documents with a URL");
  synth->add_option("--seed", synth_cfg.seed, "generator seed");

  // --- ingest ---
  auto* ingest = app.add_subcommand("ingest", "read JSONL/CSV, label via seeds, write JSONL");
  std::string in_path, in_format = "auto", out_path, lang_filter;
  bool relabel = false;
  ingest->add_option("--input", in_path, "corpus file")->required();
  ingest->add_option("--format", in_format, "jsonl|csv|auto");
  ingest->add_option("--out", out_path, "output JSONL path")->required();
  ingest->add_option("--lang", lang_filter, "keep only documents with this ISO-639-1 code");
  ingest->add_flag("--relabel", relabel, "relabel every document from the seed vector");

  // --- preprocess ---
  auto* prep = app.add_subcommand("preprocess", "normalize text into token lists");
  std::string prep_in, prep_out;
  im::PreprocessConfig prep_cfg;
  bool keep_urls = false, no_lowercase = false, keep_punct = false, keep_stopwords = false;
  prep->add_option("--input", prep_in, "corpus JSONL")->required();
  prep->add_option("--out", prep_out, "output JSONL with tokens")->required();
  prep->add_flag("--keep-urls", keep_urls, "do not strip URLs");
  prep->add_flag("--no-lowercase", no_lowercase, "keep original casing");
  prep->add_flag("--keep-punct", keep_punct, "do not split tokens on punctuation");
  prep->add_flag("--keep-stopwords", keep_stopwords, "keep stopwords");
  prep->add_flag("--pos-filter", prep_cfg.pos_filter, "keep noun/verb/adjective/adverb only");

  // --- select ---
  auto* select = app.add_subcommand("select", "score terms by information gain and filter");
  std::string sel_in, sel_out_dir;
  std::size_t sel_min_df = 1;
  std::string sel_mode = "binary";
  double sel_threshold = 0.0;
  select->add_option("--input", sel_in, "preprocessed corpus JSONL")->required();
  select->add_option("--out-dir", sel_out_dir, "output directory")->required();
  select->add_option("--min-df", sel_min_df, "minimum document frequency");
  select->add_option("--mode", sel_mode, "binary|tf");
  select->add_option("--threshold", sel_threshold, "IG threshold (strictly greater)");

  // --- train ---
  auto* train_cmd = app.add_subcommand("train", "train one classifier on the whole corpus");
  std::string train_in, train_out_dir, train_spec = "dt", train_features, train_mode = "binary";
  std::size_t train_min_df = 1;
  std::uint64_t train_seed = 0;
  train_cmd->add_option("--input", train_in, "preprocessed corpus JSONL")->required();
  train_cmd->add_option("--out-dir", train_out_dir, "output directory")->required();
  train_cmd->add_option("--spec", train_spec, "classifier kind (dt|nb|svm|ann) or inline spec JSON");
  train_cmd->add_option("--features", train_features, "features.csv restricting the columns");
  train_cmd->add_option("--min-df", train_min_df, "minimum document frequency");
  train_cmd->add_option("--mode", train_mode, "binary|tf");
  train_cmd->add_option("--seed", train_seed, "classifier seed");

  // --- evaluate ---
  auto* eval_cmd = app.add_subcommand("evaluate", "k-fold cross-validated evaluation");
  std::string eval_in, eval_out_dir, eval_spec = "dt", eval_features, eval_mode = "binary";
  std::size_t eval_min_df = 1, eval_k = 10;
  std::uint64_t eval_seed = 42;
  bool eval_timing = false;
  eval_cmd->add_option("--input", eval_in, "preprocessed corpus JSONL")->required();
  eval_cmd->add_option("--out-dir", eval_out_dir, "output directory")->required();
  eval_cmd->add_option("--spec", eval_spec, "classifier kind (dt|nb|svm|ann) or inline spec JSON");
  eval_cmd->add_option("--features", eval_features, "features.csv restricting the columns");
  eval_cmd->add_option("--min-df", eval_min_df, "minimum document frequency");
  eval_cmd->add_option("--mode", eval_mode, "binary|tf");
  eval_cmd->add_option("--k", eval_k, "fold count");
  eval_cmd->add_option("--seed", eval_seed, "fold shuffle + classifier seed");
  eval_cmd->add_flag("--timing", eval_timing, "include wall_time_s in eval.json");

  // --- pipeline ---
  auto* pipe = app.add_subcommand("pipeline", "run scheme one/two end to end from a config");
  std::string pipe_config, pipe_out_dir;
  std::optional<std::uint64_t> pipe_seed;
  pipe->add_option("--config", pipe_config, "pipeline config JSON (or a run manifest)")->required();
  pipe->add_option("--output-dir", pipe_out_dir, "override the config output_dir");
  pipe->add_option("--seed", pipe_seed, "override the config seed");

  // --- matrix ---
  auto* matrix = app.add_subcommand("matrix", "run a directory of configs, combine the results");
  std::string matrix_dir, matrix_out = "summary.csv", matrix_base;
  matrix->add_option("--config-dir", matrix_dir, "directory of pipeline configs")->required();
  matrix->add_option("--out", matrix_out, "combined summary CSV path");
  matrix->add_option("--emit-grid", matrix_base,
                     "base config; write the full selection x classifier grid first");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const im::Corpus corpus = im::synth_corpus(synth_cfg);
      im::write_jsonl(corpus, synth_out);
      const auto [yes, no] = im::class_counts(corpus);
      std::cout << "wrote " << corpus.size() << " documents (" << yes << " Yes / " << no
                << " No) to " << synth_out << "\n";
    } else if (*ingest) {
      im::Corpus corpus = read_corpus_arg(in_path, in_format);
      if (!lang_filter.empty()) corpus = im::filter_language(corpus, lang_filter);
      if (relabel || !corpus.fully_labeled()) {
        im::Corpus labeled = im::label_by_seeds(corpus);
        if (!relabel)
          for (std::size_t i = 0; i < corpus.docs.size(); ++i)
            if (corpus.docs[i].label) labeled.docs[i].label = corpus.docs[i].label;
        corpus = std::move(labeled);
      }
      im::write_jsonl(corpus, out_path);
      const auto [yes, no] = im::class_counts(corpus);
      std::cout << "wrote " << corpus.size() << " documents (" << yes << " Yes / " << no
                << " No) to " << out_path << "\n";
    } else if (*prep) {
      prep_cfg.strip_urls = !keep_urls;
      prep_cfg.lowercase = !no_lowercase;
      prep_cfg.remove_punct = !keep_punct;
      prep_cfg.remove_stopwords = !keep_stopwords;
      const im::Corpus corpus = im::preprocess(im::ingest_jsonl(prep_in), prep_cfg);
      im::write_jsonl(corpus, prep_out);
      std::cout << "wrote " << corpus.size() << " preprocessed documents to " << prep_out << "\n";
    } else if (*select) {
      im::Corpus corpus = im::ingest_jsonl(sel_in);
      if (corpus.docs.empty() || corpus.docs.front().tokens.empty())
        corpus = im::preprocess(corpus);
      const auto vocab = im::build_vocabulary(corpus, sel_min_df);
      const auto m = im::vectorize(corpus, vocab, im::matrix_mode_from_string(sel_mode));
      const auto labels = im::require_labels(m);
      const auto scores = im::ig_scores(m, labels);
      const auto subset = im::select_by_ig(scores, sel_threshold);

      std::ostringstream vocab_txt, matrix_txt, ig_csv, feats;
      im::write_vocabulary(vocab, vocab_txt);
      im::write_matrix(m, matrix_txt);
      im::write_ig_report(scores, vocab, ig_csv);
      feats << "term_index,term\n";
      for (const auto idx : subset.indices)
        feats << idx << ',' << im::csv::quote(vocab.terms.at(idx)) << "\n";
      write_text(fs::path(sel_out_dir) / "vocabulary.txt", vocab_txt.str());
      write_text(fs::path(sel_out_dir) / "matrix.txt", matrix_txt.str());
      write_text(fs::path(sel_out_dir) / "ig_report.csv", ig_csv.str());
      write_text(fs::path(sel_out_dir) / "features.csv", feats.str());
      std::cout << "selected " << subset.indices.size() << " of " << vocab.size()
                << " terms into " << sel_out_dir << "\n";
    } else if (*train_cmd) {
      im::Corpus corpus = im::ingest_jsonl(train_in);
      if (!corpus.docs.empty() && corpus.docs.front().tokens.empty())
        corpus = im::preprocess(corpus);
      const auto vocab = im::build_vocabulary(corpus, train_min_df);
      im::FeatureMatrix m = im::vectorize(corpus, vocab, im::matrix_mode_from_string(train_mode));
      if (!train_features.empty()) m = im::project(m, read_feature_file(train_features));
      const auto labels = im::require_labels(m);
      const auto model = im::train(parse_spec(train_spec, train_seed), m, labels);
      fs::create_directories(train_out_dir);
      im::save_model(model, (fs::path(train_out_dir) / "model.json").string());
      std::ostringstream vocab_txt;
      im::write_vocabulary(vocab, vocab_txt);
      write_text(fs::path(train_out_dir) / "vocabulary.txt", vocab_txt.str());
      std::cout << "trained " << train_spec << " on " << m.n_rows << " documents, wrote "
                << train_out_dir << "/model.json\n";
    } else if (*eval_cmd) {
      im::Corpus corpus = im::ingest_jsonl(eval_in);
      if (!corpus.docs.empty() && corpus.docs.front().tokens.empty())
        corpus = im::preprocess(corpus);
      const auto vocab = im::build_vocabulary(corpus, eval_min_df);
      im::FeatureMatrix m = im::vectorize(corpus, vocab, im::matrix_mode_from_string(eval_mode));
      std::string selection_name = "all-features";
      if (!eval_features.empty()) {
        m = im::project(m, read_feature_file(eval_features));
        selection_name = "manual";
      }
      const auto labels = im::require_labels(m);
      const auto plan = im::kfold_split_stratified(labels, eval_k, eval_seed);
      auto report = im::cross_validate(parse_spec(eval_spec, eval_seed), m, labels, plan);
      std::ostringstream eval_csv;
      im::write_report_csv(report, selection_name, eval_csv);
      write_text(fs::path(eval_out_dir) / "eval.json",
                 im::report_to_json(report, eval_timing).dump(2) + "\n");
      write_text(fs::path(eval_out_dir) / "eval.csv", eval_csv.str());
      const auto acc = report.aggregate.accuracy;
      std::cout << "aggregate accuracy "
                << (acc ? im::csv::fixed(*acc, 4) : std::string("NA")) << ", reports in "
                << eval_out_dir << "\n";
    } else if (*pipe) {
      im::PipelineConfig config = im::load_pipeline_config(pipe_config);
      if (!pipe_out_dir.empty()) config.output_dir = pipe_out_dir;
      if (pipe_seed) config.seed = *pipe_seed;
      const auto result = im::run_pipeline(config);
      const auto acc = result.report.aggregate.accuracy;
      std::cout << "scheme " << im::to_string(config.scheme) << ": " << result.n_docs
                << " documents, vocabulary " << result.vocab_size << ", selected "
                << result.selected.indices.size() << " features, aggregate accuracy "
                << (acc ? im::csv::fixed(*acc, 4) : std::string("NA")) << "\n";
      for (const auto& f : result.files_written) std::cout << "  " << f << "\n";
    } else if (*matrix) {
      if (!matrix_base.empty())
        im::emit_matrix_grid(im::load_pipeline_config(matrix_base), matrix_dir);
      const auto rows = im::run_matrix(matrix_dir, matrix_out);
      std::size_t failed = 0;
      for (const auto& row : rows) failed += row.error.empty() ? 0 : 1;
      std::cout << "ran " << rows.size() << " configs (" << failed << " failed), summary in "
                << matrix_out << "\n";
      if (failed > 0) return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
