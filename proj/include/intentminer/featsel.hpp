#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "intentminer/classifier.hpp"
#include "intentminer/csv.hpp"
#include "intentminer/parallel.hpp"
#include "intentminer/vectorize.hpp"

namespace intentminer {

struct IgScore {
  std::uint32_t term_index = 0;
  double gain = 0.0;  // bits; in [0, log2(m)] with m = 2 classes
};

enum class Provenance { ig_filter, forward_wrapper, manual };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ig_filter: return "ig_filter";
    case Provenance::forward_wrapper: return "forward_wrapper";
    case Provenance::manual: return "manual";
  }
  throw std::logic_error("unreachable provenance");
}

struct FeatureSubset {
  std::vector<std::uint32_t> indices;  // unique, within vocabulary bounds
  Provenance provenance = Provenance::manual;
};

struct SelectionStep {
  std::uint32_t added_index = 0;
  std::size_t subset_size = 0;
  double loocv_accuracy = 0.0;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  std::size_t chosen_size = 0;  // shortest prefix attaining the max accuracy
};

namespace ig_detail {

// Binary entropy of an integer count pair, base 2, with 0 log 0 = 0.
inline double entropy(std::size_t a, std::size_t b) {
  const std::size_t total = a + b;
  double h = 0.0;
  for (const std::size_t c : {a, b}) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace ig_detail

// Entropy reduction of the class distribution given term presence/absence,
// estimated from empirical frequencies. TF counts collapse to presence. A
// contingency table that is exactly proportional (term independent of the
// class, including the P(t) = 0 or 1 degenerate sides) scores exactly 0.
inline std::vector<IgScore> ig_scores(const FeatureMatrix& m, const std::vector<Label>& labels) {
  if (labels.size() != m.n_rows)
    throw std::invalid_argument("label count does not match row count");
  if (m.n_rows == 0) throw std::invalid_argument("ig_scores: empty matrix");

  const std::size_t n = m.n_rows;
  std::size_t n_yes = 0;
  for (const auto l : labels) n_yes += (l == Label::Yes);

  std::vector<std::size_t> present(m.n_cols, 0), present_yes(m.n_cols, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = m.row(i);
    for (std::size_t k = 0; k < row.cols.size(); ++k) {
      if (row.vals[k] <= 0.0) continue;
      present[row.cols[k]] += 1;
      if (labels[i] == Label::Yes) present_yes[row.cols[k]] += 1;
    }
  }

  const double prior_h = ig_detail::entropy(n_yes, n - n_yes);
  std::vector<IgScore> scores(m.n_cols);
  parallel_for(m.n_cols, [&](std::size_t j) {
    const std::size_t nt = present[j];
    const std::size_t nty = present_yes[j];
    scores[j].term_index = static_cast<std::uint32_t>(j);
    // Exact independence check in integer arithmetic: P(Yes|t) == P(Yes).
    if (nty * n == nt * n_yes) {
      scores[j].gain = 0.0;
      return;
    }
    const double pt = static_cast<double>(nt) / static_cast<double>(n);
    const double cond = pt * ig_detail::entropy(nty, nt - nty) +
                        (1.0 - pt) * ig_detail::entropy(n_yes - nty, (n - nt) - (n_yes - nty));
    scores[j].gain = std::clamp(prior_h - cond, 0.0, 1.0);
  });
  return scores;
}

// Indices with gain strictly above the threshold, ordered by descending
// gain, ties by ascending term index.
inline FeatureSubset select_by_ig(const std::vector<IgScore>& scores, double threshold = 0.0) {
  if (scores.empty()) throw std::invalid_argument("select_by_ig: no scores");
  std::vector<IgScore> kept;
  for (const auto& s : scores)
    if (s.gain > threshold) kept.push_back(s);
  if (kept.empty()) throw std::runtime_error("no feature exceeds threshold");
  std::sort(kept.begin(), kept.end(), [](const IgScore& a, const IgScore& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.term_index < b.term_index;
  });
  FeatureSubset subset;
  subset.provenance = Provenance::ig_filter;
  subset.indices.reserve(kept.size());
  for (const auto& s : kept) subset.indices.push_back(s.term_index);
  return subset;
}

// Leave-one-out accuracy: train on n-1 rows, predict the held-out row, for
// every row. Naive Bayes refits from subtracted count tables, which is the
// same integer arithmetic as a full retrain; other learners retrain per
// hold-out.
inline double loocv_accuracy(const FeatureMatrix& m, const std::vector<Label>& labels,
                             const ClassifierSpec& spec) {
  if (labels.size() != m.n_rows)
    throw std::invalid_argument("label count does not match row count");
  if (m.n_rows < 2)
    throw std::invalid_argument("loocv needs at least 2 rows, got " + std::to_string(m.n_rows));
  std::size_t n_yes = 0;
  for (const auto l : labels) n_yes += (l == Label::Yes);
  if (n_yes == 0 || n_yes == labels.size())
    throw std::runtime_error("loocv is undefined on single-class data");

  const std::size_t n = m.n_rows;
  std::vector<std::uint8_t> correct(n, 0);

  if (spec.kind() == ClassifierKind::nb) {
    const auto& params = std::get<NbParams>(spec.params);
    if (params.alpha < 0.0) throw std::invalid_argument("smoothing alpha must be >= 0");
    nb_detail::NbCounts totals;
    totals.resize(m.n_cols);
    for (std::size_t i = 0; i < n; ++i) totals.add_row(m.row(i), labels[i], params.event_model);
    parallel_for(n, [&](std::size_t i) {
      nb_detail::NbCounts held = totals;
      held.add_row(m.row(i), labels[i], params.event_model, -1.0);
      const auto model = nb_detail::fit_from_counts(params, held, m.n_cols);
      correct[i] = nb_predict(model, m.row(i)) == labels[i];
    });
  } else {
    parallel_for(n, [&](std::size_t i) {
      std::vector<std::uint32_t> keep;
      keep.reserve(n - 1);
      for (std::uint32_t r = 0; r < n; ++r)
        if (r != i) keep.push_back(r);
      const auto sub = submatrix(m, keep);
      std::vector<Label> sub_labels;
      sub_labels.reserve(n - 1);
      for (const auto r : keep) sub_labels.push_back(labels[r]);
      const auto model = train(spec, sub, sub_labels);
      correct[i] = predict_row(model, m.row(i)) == labels[i];
    });
  }

  std::size_t hits = 0;
  for (const auto c : correct) hits += c;
  return static_cast<double>(hits) / static_cast<double>(n);
}

// Greedy forward wrapper selection over the candidate pool, scored by LOOCV.
// Returns the shortest prefix attaining the maximum recorded accuracy.
inline std::pair<FeatureSubset, SelectionTrace> forward_select(
    const FeatureMatrix& m, const std::vector<Label>& labels, const ClassifierSpec& spec,
    const FeatureSubset& candidate_pool, std::size_t budget) {
  if (candidate_pool.indices.empty())
    throw std::invalid_argument("forward_select: candidate pool is empty");
  if (budget < 1) throw std::invalid_argument("forward_select: budget must be >= 1");

  std::vector<std::uint32_t> chosen;
  std::vector<std::uint32_t> remaining = candidate_pool.indices;
  SelectionTrace trace;

  while (chosen.size() < budget && !remaining.empty()) {
    std::vector<double> acc(remaining.size());
    parallel_for(remaining.size(), [&](std::size_t k) {
      std::vector<std::uint32_t> candidate = chosen;
      candidate.push_back(remaining[k]);
      acc[k] = loocv_accuracy(project(m, candidate), labels, spec);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < remaining.size(); ++k) {
      if (acc[k] > acc[best] ||
          (acc[k] == acc[best] && remaining[k] < remaining[best]))
        best = k;
    }
    chosen.push_back(remaining[best]);
    trace.steps.push_back({remaining[best], chosen.size(), acc[best]});
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }

  double best_acc = -1.0;
  for (const auto& step : trace.steps) best_acc = std::max(best_acc, step.loocv_accuracy);
  trace.chosen_size = 0;
  for (const auto& step : trace.steps) {
    if (step.loocv_accuracy == best_acc) {
      trace.chosen_size = step.subset_size;
      break;
    }
  }

  FeatureSubset subset;
  subset.provenance = Provenance::forward_wrapper;
  subset.indices.assign(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(trace.chosen_size));
  return {std::move(subset), std::move(trace)};
}

// `term,term_index,gain` sorted by descending gain, ties by ascending index.
inline void write_ig_report(const std::vector<IgScore>& scores, const Vocabulary& vocab,
                            std::ostream& out) {
  std::vector<IgScore> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), [](const IgScore& a, const IgScore& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.term_index < b.term_index;
  });
  out << "term,term_index,gain\n";
  for (const auto& s : sorted) {
    out << csv::quote(vocab.terms.at(s.term_index)) << ',' << s.term_index << ','
        << csv::num(s.gain) << "\n";
  }
}

inline void write_selection_trace(const SelectionTrace& trace, const Vocabulary& vocab,
                                  std::ostream& out) {
  out << "step,added_term,subset_size,loocv_accuracy\n";
  std::size_t step_no = 1;
  for (const auto& step : trace.steps) {
    out << step_no++ << ',' << csv::quote(vocab.terms.at(step.added_index)) << ','
        << step.subset_size << ',' << csv::num(step.loocv_accuracy) << "\n";
  }
}

}  // namespace intentminer
