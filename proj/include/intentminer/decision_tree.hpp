#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "intentminer/vectorize.hpp"

namespace intentminer {

// Gini split criterion, no pruning. A node with fewer than min_node_size
// documents is never split.
struct DtParams {
  std::size_t min_node_size = 2;
};

struct DtNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  Label leaf = Label::No;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t n_docs = 0;
  double impurity = 0.0;
};

struct DtModel {
  DtParams params;
  std::vector<DtNode> nodes;  // nodes[0] is the root
};

inline double gini_impurity(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (const auto c : class_counts) total += c;
  if (total == 0) throw std::invalid_argument("gini_impurity: all class counts are zero");
  double sum_sq = 0.0;
  for (const auto c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

inline double gini_impurity(std::size_t yes, std::size_t no) {
  const std::size_t counts[2] = {no, yes};
  return gini_impurity(std::span<const std::size_t>(counts, 2));
}

namespace dt_detail {

constexpr double kGainEps = 1e-12;

struct SplitChoice {
  bool found = false;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double child_impurity = 0.0;  // weighted
};

// Candidate thresholds are the midpoints of consecutive distinct values.
// Ties in gain resolve to the lowest feature index, then lowest threshold,
// which the ascending scan order gives for free.
inline SplitChoice best_split(const FeatureMatrix& m, const std::vector<Label>& labels,
                              std::span<const std::uint32_t> rows, double parent_gini) {
  SplitChoice best;
  std::vector<std::pair<double, Label>> column(rows.size());
  for (std::uint32_t feature = 0; feature < m.n_cols; ++feature) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto r = rows[k];
      column[k] = {m.row(r).at(feature), labels[r]};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t left_yes = 0, left_no = 0;
    std::size_t total_yes = 0, total_no = 0;
    for (const auto& [v, lab] : column) (lab == Label::Yes ? total_yes : total_no) += 1;
    const double n = static_cast<double>(rows.size());

    for (std::size_t k = 0; k + 1 < column.size(); ++k) {
      (column[k].second == Label::Yes ? left_yes : left_no) += 1;
      if (column[k].first == column[k + 1].first) continue;
      const double threshold = (column[k].first + column[k + 1].first) / 2.0;
      const std::size_t left_n = k + 1;
      const std::size_t right_n = rows.size() - left_n;
      const double wl = static_cast<double>(left_n) / n;
      const double wr = static_cast<double>(right_n) / n;
      const double child = wl * gini_impurity(left_yes, left_no) +
                           wr * gini_impurity(total_yes - left_yes, total_no - left_no);
      const double gain = parent_gini - child;
      if (gain > best.gain + kGainEps && gain > kGainEps) {
        best = {true, feature, threshold, gain, child};
      }
    }
  }
  return best;
}

inline Label majority(std::size_t yes, std::size_t no) {
  return yes >= no ? Label::Yes : Label::No;  // tie goes to the positive class
}

inline std::int32_t grow(DtModel& model, const FeatureMatrix& m,
                         const std::vector<Label>& labels, std::vector<std::uint32_t>& rows) {
  std::size_t yes = 0, no = 0;
  for (const auto r : rows) (labels[r] == Label::Yes ? yes : no) += 1;
  const double impurity = gini_impurity(yes, no);

  const auto make_leaf = [&]() {
    DtNode node;
    node.leaf = majority(yes, no);
    node.n_docs = static_cast<std::uint32_t>(rows.size());
    node.impurity = impurity;
    model.nodes.push_back(node);
    return static_cast<std::int32_t>(model.nodes.size() - 1);
  };

  if (yes == 0 || no == 0 || rows.size() < model.params.min_node_size) return make_leaf();
  const auto split = best_split(m, labels, rows, impurity);
  if (!split.found) return make_leaf();

  std::vector<std::uint32_t> left_rows, right_rows;
  for (const auto r : rows)
    (m.row(r).at(split.feature) < split.threshold ? left_rows : right_rows).push_back(r);
  // A midpoint threshold always separates at least one value to each side.
  rows.clear();
  rows.shrink_to_fit();

  DtNode node;
  node.feature = static_cast<std::int32_t>(split.feature);
  node.threshold = split.threshold;
  node.n_docs = static_cast<std::uint32_t>(yes + no);
  node.impurity = impurity;
  model.nodes.push_back(node);
  const auto index = static_cast<std::int32_t>(model.nodes.size() - 1);
  const auto left = grow(model, m, labels, left_rows);
  const auto right = grow(model, m, labels, right_rows);
  model.nodes[index].left = left;
  model.nodes[index].right = right;
  return index;
}

}  // namespace dt_detail

inline DtModel dt_train(const DtParams& params, const FeatureMatrix& m,
                        const std::vector<Label>& labels) {
  if (params.min_node_size < 1) throw std::invalid_argument("min_node_size must be >= 1");
  DtModel model;
  model.params = params;
  std::vector<std::uint32_t> rows(m.n_rows);
  for (std::uint32_t i = 0; i < m.n_rows; ++i) rows[i] = i;
  dt_detail::grow(model, m, labels, rows);
  return model;
}

inline Label dt_predict(const DtModel& model, const SparseRow& row) {
  std::int32_t at = 0;
  while (model.nodes[at].feature >= 0) {
    const auto& node = model.nodes[at];
    at = row.at(static_cast<std::uint32_t>(node.feature)) < node.threshold ? node.left : node.right;
  }
  return model.nodes[at].leaf;
}

}  // namespace intentminer
