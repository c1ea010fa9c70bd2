#pragma once

#include <string>
#include <vector>

#include "intentminer/vectorize.hpp"

namespace imtest {

using intentminer::FeatureMatrix;
using intentminer::Label;
using intentminer::MatrixMode;

// "YNYY" -> {Yes, No, Yes, Yes}
inline std::vector<Label> yn(const std::string& s) {
  std::vector<Label> out;
  for (const char c : s) out.push_back(c == 'Y' ? Label::Yes : Label::No);
  return out;
}

inline FeatureMatrix dense_matrix(const std::vector<std::vector<double>>& rows,
                                  MatrixMode mode = MatrixMode::binary,
                                  const std::vector<Label>* labels = nullptr) {
  FeatureMatrix m;
  m.n_rows = rows.size();
  m.n_cols = rows.empty() ? 0 : rows[0].size();
  m.mode = mode;
  m.row_start.push_back(0);
  for (const auto& row : rows) {
    for (std::uint32_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) {
        m.cols.push_back(j);
        m.vals.push_back(row[j]);
      }
    }
    m.row_start.push_back(m.cols.size());
  }
  if (labels) {
    for (const auto l : *labels) m.row_labels.emplace_back(l);
  }
  return m;
}

inline std::vector<std::vector<double>> to_dense(const FeatureMatrix& m) {
  std::vector<std::vector<double>> out(m.n_rows, std::vector<double>(m.n_cols, 0.0));
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    const auto row = m.row(i);
    for (std::size_t k = 0; k < row.cols.size(); ++k) out[i][row.cols[k]] = row.vals[k];
  }
  return out;
}

}  // namespace imtest
