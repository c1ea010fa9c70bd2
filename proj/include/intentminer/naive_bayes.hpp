#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "intentminer/vectorize.hpp"

namespace intentminer {

struct NbParams {
  enum class EventModel { bernoulli, multinomial };
  EventModel event_model = EventModel::multinomial;
  double alpha = 1.0;  // Laplace smoothing; 0 enables the zero-probability path
};

inline std::string_view to_string(NbParams::EventModel m) {
  return m == NbParams::EventModel::multinomial ? "multinomial" : "bernoulli";
}

inline NbParams::EventModel nb_event_model_from_string(std::string_view s) {
  if (s == "multinomial") return NbParams::EventModel::multinomial;
  if (s == "bernoulli") return NbParams::EventModel::bernoulli;
  throw std::invalid_argument("event_model must be \"bernoulli\" or \"multinomial\"");
}

// Class order in all per-class arrays: [No, Yes].
struct NbModel {
  NbParams params;
  std::size_t vocab_size = 0;
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_like;    // multinomial: log P(w|c); bernoulli: log P(t|c)
  std::array<std::vector<double>, 2> log_absent;  // bernoulli only: log P(!t|c)
};

namespace nb_detail {

inline double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

// Raw per-class sufficient statistics; kept separate so leave-one-out can
// subtract a document's contribution exactly (all counts are integers).
struct NbCounts {
  std::size_t n_docs[2] = {0, 0};
  std::vector<double> term[2];   // multinomial: token counts; bernoulli: doc presence
  double total_tokens[2] = {0, 0};

  void resize(std::size_t vocab) {
    term[0].assign(vocab, 0.0);
    term[1].assign(vocab, 0.0);
  }

  void add_row(const SparseRow& row, Label label, NbParams::EventModel model, double sign = 1.0) {
    const auto c = static_cast<std::size_t>(label);
    n_docs[c] = static_cast<std::size_t>(static_cast<double>(n_docs[c]) + sign);
    for (std::size_t k = 0; k < row.cols.size(); ++k) {
      const double v = model == NbParams::EventModel::bernoulli
                           ? (row.vals[k] > 0.0 ? 1.0 : 0.0)
                           : row.vals[k];
      term[c][row.cols[k]] += sign * v;
      total_tokens[c] += sign * v;
    }
  }
};

inline NbModel fit_from_counts(const NbParams& params, const NbCounts& counts,
                               std::size_t vocab_size) {
  const std::size_t n = counts.n_docs[0] + counts.n_docs[1];
  if (counts.n_docs[0] == 0 || counts.n_docs[1] == 0)
    throw std::runtime_error("training data contains a single class");
  NbModel model;
  model.params = params;
  model.vocab_size = vocab_size;
  for (std::size_t c = 0; c < 2; ++c) {
    model.log_prior[c] = safe_log(static_cast<double>(counts.n_docs[c]) / static_cast<double>(n));
    model.log_like[c].resize(vocab_size);
    if (params.event_model == NbParams::EventModel::bernoulli)
      model.log_absent[c].resize(vocab_size);
    for (std::size_t k = 0; k < vocab_size; ++k) {
      if (params.event_model == NbParams::EventModel::multinomial) {
        const double p = (counts.term[c][k] + params.alpha) /
                         (counts.total_tokens[c] + params.alpha * static_cast<double>(vocab_size));
        model.log_like[c][k] = safe_log(p);
      } else {
        const double p = (counts.term[c][k] + params.alpha) /
                         (static_cast<double>(counts.n_docs[c]) + 2.0 * params.alpha);
        model.log_like[c][k] = safe_log(p);
        model.log_absent[c][k] = safe_log(1.0 - p);
      }
    }
  }
  return model;
}

inline std::array<double, 2> log_joint(const NbModel& model, const SparseRow& row) {
  std::array<double, 2> lj{model.log_prior[0], model.log_prior[1]};
  if (model.params.event_model == NbParams::EventModel::multinomial) {
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t k = 0; k < row.cols.size(); ++k)
        lj[c] += row.vals[k] * model.log_like[c][row.cols[k]];
  } else {
    for (std::size_t c = 0; c < 2; ++c) {
      double sum = 0.0;
      std::size_t at = 0;
      for (std::size_t k = 0; k < model.vocab_size; ++k) {
        const bool present = at < row.cols.size() && row.cols[at] == k;
        if (present) {
          sum += model.log_like[c][k];
          ++at;
        } else {
          sum += model.log_absent[c][k];
        }
      }
      lj[c] += sum;
    }
  }
  return lj;
}

}  // namespace nb_detail

inline NbModel nb_train(const NbParams& params, const FeatureMatrix& m,
                        const std::vector<Label>& labels) {
  if (params.alpha < 0.0) throw std::invalid_argument("smoothing alpha must be >= 0");
  nb_detail::NbCounts counts;
  counts.resize(m.n_cols);
  for (std::size_t i = 0; i < m.n_rows; ++i)
    counts.add_row(m.row(i), labels[i], params.event_model);
  return nb_detail::fit_from_counts(params, counts, m.n_cols);
}

// Normalized P(Yes|d), P(No|d); the pair sums to 1.
inline std::array<double, 2> nb_posterior(const NbModel& model, const SparseRow& row) {
  auto lj = nb_detail::log_joint(model, row);
  // Zero-probability path (alpha = 0): fall back to the prior when every
  // class has likelihood zero.
  if (std::isinf(lj[0]) && std::isinf(lj[1])) lj = {model.log_prior[0], model.log_prior[1]};
  const double m0 = std::max(lj[0], lj[1]);
  const double e0 = std::exp(lj[0] - m0);
  const double e1 = std::exp(lj[1] - m0);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

// Highest posterior wins; exact ties go to Yes.
inline Label nb_predict(const NbModel& model, const SparseRow& row) {
  const auto post = nb_posterior(model, row);
  return post[1] >= post[0] ? Label::Yes : Label::No;
}

}  // namespace intentminer
