#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "intentminer/classifier.hpp"
#include "intentminer/csv.hpp"
#include "intentminer/featsel.hpp"
#include "intentminer/parallel.hpp"

namespace intentminer {

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::uint32_t> assignments;  // per-row fold id
  std::uint64_t seed = 0;
};

namespace eval_detail {

inline void check_fold_args(std::size_t n, std::size_t k) {
  if (k < 2) throw std::invalid_argument("fold count must be >= 2, got " + std::to_string(k));
  if (k > n)
    throw std::invalid_argument("fold count " + std::to_string(k) + " exceeds row count " +
                                std::to_string(n));
}

}  // namespace eval_detail

// Seeded shuffle, then round-robin assignment; fold sizes differ by at most 1.
inline FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  eval_detail::check_fold_args(n, k);
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    plan.assignments[ids[j]] = static_cast<std::uint32_t>(j % k);
  return plan;
}

// Stratified variant: per-class shuffle, round-robin with a fold counter that
// carries across classes so overall sizes still differ by at most 1.
inline FoldPlan kfold_split_stratified(const std::vector<Label>& labels, std::size_t k,
                                       std::uint64_t seed) {
  const std::size_t n = labels.size();
  eval_detail::check_fold_args(n, k);
  std::mt19937_64 rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(n, 0);
  std::size_t counter = 0;
  for (const Label cls : {Label::Yes, Label::No}) {
    std::vector<std::uint32_t> ids;
    for (std::uint32_t i = 0; i < n; ++i)
      if (labels[i] == cls) ids.push_back(i);
    std::shuffle(ids.begin(), ids.end(), rng);
    for (const auto id : ids) plan.assignments[id] = static_cast<std::uint32_t>(counter++ % k);
  }
  return plan;
}

struct Metrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> recall, precision, f_measure, accuracy;
  std::vector<std::string> notes;  // reasons for absent ratios

  std::size_t total() const { return tp + fp + fn + tn; }
};

inline Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                   std::size_t tn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  if (tp + fn > 0)
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  else
    m.notes.push_back("recall undefined: no positive instances (tp+fn=0)");
  if (tp + fp > 0)
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  else
    m.notes.push_back("precision undefined: no positive predictions (tp+fp=0)");
  if (m.recall && m.precision && (*m.recall + *m.precision) > 0.0)
    m.f_measure = 2.0 * (*m.precision) * (*m.recall) / (*m.precision + *m.recall);
  else
    m.notes.push_back("f_measure undefined: precision and recall do not combine");
  if (m.total() > 0)
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(m.total());
  else
    m.notes.push_back("accuracy undefined: no evaluated rows");
  return m;
}

inline Metrics confusion_and_metrics(std::span<const Label> predicted,
                                     std::span<const Label> truth,
                                     Label positive = Label::Yes) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("confusion_and_metrics: length mismatch (" +
                                std::to_string(predicted.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  if (predicted.empty()) throw std::invalid_argument("confusion_and_metrics: no rows");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool pred_pos = predicted[i] == positive;
    const bool true_pos = truth[i] == positive;
    if (pred_pos && true_pos) ++tp;
    else if (pred_pos) ++fp;
    else if (true_pos) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

struct EvalReport {
  std::vector<Metrics> per_fold;
  Metrics aggregate;  // pooled confusion counts
  ClassifierSpec spec;
  FeatureSubset features;
  double wall_time_s = 0.0;
};

// Train on each fold's complement, predict the fold, pool the confusion
// counts. Folds evaluate independently; the report orders them by fold id.
inline EvalReport cross_validate(const ClassifierSpec& spec, const FeatureMatrix& m,
                                 const std::vector<Label>& labels, const FoldPlan& plan) {
  if (plan.assignments.size() != m.n_rows)
    throw std::invalid_argument("fold plan does not match matrix rows");
  if (labels.size() != m.n_rows)
    throw std::invalid_argument("label count does not match row count");
  std::size_t n_yes = 0;
  for (const auto l : labels) n_yes += (l == Label::Yes);
  if (n_yes == 0 || n_yes == labels.size())
    throw std::runtime_error("cross-validation needs both classes present");

  const auto t0 = std::chrono::steady_clock::now();
  EvalReport report;
  report.spec = spec;
  report.per_fold.resize(plan.k);

  parallel_for(plan.k, [&](std::size_t fold) {
    std::vector<std::uint32_t> train_rows, test_rows;
    for (std::uint32_t i = 0; i < m.n_rows; ++i)
      (plan.assignments[i] == fold ? test_rows : train_rows).push_back(i);
    if (test_rows.empty()) {
      report.per_fold[fold] = metrics_from_counts(0, 0, 0, 0);
      report.per_fold[fold].notes.push_back("fold is empty");
      return;
    }
    std::vector<Label> train_labels, test_labels;
    for (const auto r : train_rows) train_labels.push_back(labels[r]);
    for (const auto r : test_rows) test_labels.push_back(labels[r]);
    const bool has_yes = std::find(train_labels.begin(), train_labels.end(), Label::Yes) != train_labels.end();
    const bool has_no = std::find(train_labels.begin(), train_labels.end(), Label::No) != train_labels.end();
    if (!has_yes || !has_no)
      throw std::runtime_error("fold " + std::to_string(fold) +
                               ": training complement is single-class");
    const auto model = train(spec, submatrix(m, train_rows), train_labels);
    std::vector<Label> predicted;
    predicted.reserve(test_rows.size());
    for (const auto r : test_rows) predicted.push_back(predict_row(model, m.row(r)));
    report.per_fold[fold] = confusion_and_metrics(predicted, test_labels);
  });

  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& f : report.per_fold) {
    tp += f.tp;
    fp += f.fp;
    fn += f.fn;
    tn += f.tn;
  }
  report.aggregate = metrics_from_counts(tp, fp, fn, tn);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// --- report serialization ---

namespace eval_detail {

inline nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["tn"] = m.tn;
  const auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
  };
  put("recall", m.recall);
  put("precision", m.precision);
  put("f_measure", m.f_measure);
  put("accuracy", m.accuracy);
  if (!m.notes.empty()) j["notes"] = m.notes;
  return j;
}

}  // namespace eval_detail

// wall_time_s is the only nondeterministic report field; callers that need
// byte-identical reruns leave include_timing off.
inline nlohmann::json report_to_json(const EvalReport& report, bool include_timing = false) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["spec"] = spec_to_json(report.spec);
  j["features"] = {{"indices", report.features.indices},
                   {"provenance", std::string(to_string(report.features.provenance))}};
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.per_fold) folds.push_back(eval_detail::metrics_to_json(f));
  j["folds"] = std::move(folds);
  j["aggregate"] = eval_detail::metrics_to_json(report.aggregate);
  if (include_timing) j["wall_time_s"] = report.wall_time_s;
  return j;
}

// One aggregate row in the paper's table shape.
inline void write_report_csv(const EvalReport& report, std::string_view feature_selection,
                             std::ostream& out) {
  out << "classifier,feature_selection,recall,precision,f_measure,accuracy\n";
  const auto cell = [](const std::optional<double>& v) {
    return v ? csv::fixed(*v) : std::string("NA");
  };
  const auto& a = report.aggregate;
  out << to_string(report.spec.kind()) << ',' << csv::quote(feature_selection) << ','
      << cell(a.recall) << ',' << cell(a.precision) << ',' << cell(a.f_measure) << ','
      << cell(a.accuracy) << "\n";
}

}  // namespace intentminer
