#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "intentminer/corpus.hpp"
#include "intentminer/parallel.hpp"

namespace intentminer {

struct Vocabulary {
  std::vector<std::string> terms;  // sorted lexicographically
  std::unordered_map<std::string, std::uint32_t> index;

  std::size_t size() const { return terms.size(); }

  std::int64_t lookup(std::string_view term) const {
    auto it = index.find(std::string(term));
    return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
  }
};

enum class MatrixMode { binary, tf };

inline std::string_view to_string(MatrixMode mode) {
  return mode == MatrixMode::binary ? "binary" : "tf";
}

inline MatrixMode matrix_mode_from_string(std::string_view s) {
  if (s == "binary") return MatrixMode::binary;
  if (s == "tf") return MatrixMode::tf;
  throw std::invalid_argument("matrix mode must be \"binary\" or \"tf\", got \"" + std::string(s) + "\"");
}

struct SparseRow {
  std::span<const std::uint32_t> cols;  // strictly increasing
  std::span<const double> vals;
  std::size_t n_cols = 0;

  double at(std::uint32_t col) const {
    auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col) return 0.0;
    return vals[static_cast<std::size_t>(it - cols.begin())];
  }

  void to_dense(std::vector<double>& out) const {
    out.assign(n_cols, 0.0);
    for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] = vals[k];
  }
};

// Row-major sparse document-term matrix. Binary mode stores 1.0 per present
// term; tf mode stores positive integer counts.
struct FeatureMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  MatrixMode mode = MatrixMode::binary;
  std::vector<std::uint64_t> row_start;  // size n_rows + 1
  std::vector<std::uint32_t> cols;       // sorted within each row
  std::vector<double> vals;
  std::vector<std::optional<Label>> row_labels;  // empty, or one per row

  SparseRow row(std::size_t i) const {
    const std::size_t lo = row_start[i], hi = row_start[i + 1];
    return {std::span(cols).subspan(lo, hi - lo), std::span(vals).subspan(lo, hi - lo), n_cols};
  }

  std::size_t nnz() const { return cols.size(); }
  bool has_labels() const { return !row_labels.empty(); }
};

// Labels are required by the learners; absence of any label is an error that
// names the first offending row.
inline std::vector<Label> require_labels(const FeatureMatrix& m) {
  if (m.row_labels.size() != m.n_rows)
    throw std::runtime_error("matrix has no row labels");
  std::vector<Label> out;
  out.reserve(m.n_rows);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    if (!m.row_labels[i])
      throw std::runtime_error("row " + std::to_string(i) + " is unlabeled");
    out.push_back(*m.row_labels[i]);
  }
  return out;
}

inline Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_df = 1) {
  if (min_df < 1) throw std::invalid_argument("min_df must be >= 1");
  std::map<std::string, std::size_t> df;  // ordered: gives sorted terms for free
  std::vector<std::string_view> seen;
  for (const auto& doc : corpus.docs) {
    seen.clear();
    for (const auto& tok : doc.tokens) seen.push_back(tok);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (const auto tok : seen) df[std::string(tok)] += 1;
  }
  Vocabulary vocab;
  for (auto& [term, count] : df)
    if (count >= min_df) vocab.terms.push_back(term);
  if (vocab.terms.empty())
    throw std::runtime_error("vocabulary empty after min_df filtering");
  vocab.index.reserve(vocab.terms.size());
  for (std::uint32_t i = 0; i < vocab.terms.size(); ++i) vocab.index[vocab.terms[i]] = i;
  return vocab;
}

inline FeatureMatrix vectorize(const Corpus& corpus, const Vocabulary& vocab,
                               MatrixMode mode = MatrixMode::binary) {
  FeatureMatrix m;
  m.n_rows = corpus.size();
  m.n_cols = vocab.size();
  m.mode = mode;

  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(m.n_rows);
  parallel_for(m.n_rows, [&](std::size_t i) {
    std::map<std::uint32_t, double> counts;
    for (const auto& tok : corpus.docs[i].tokens) {
      const auto col = vocab.lookup(tok);
      if (col < 0) continue;  // out-of-vocabulary tokens are ignored
      counts[static_cast<std::uint32_t>(col)] += 1.0;
    }
    auto& row = rows[i];
    row.reserve(counts.size());
    for (const auto& [col, count] : counts)
      row.emplace_back(col, mode == MatrixMode::binary ? 1.0 : count);
  });

  m.row_start.reserve(m.n_rows + 1);
  m.row_start.push_back(0);
  for (const auto& row : rows) m.row_start.push_back(m.row_start.back() + row.size());
  m.cols.reserve(m.row_start.back());
  m.vals.reserve(m.row_start.back());
  for (const auto& row : rows) {
    for (const auto& [col, val] : row) {
      m.cols.push_back(col);
      m.vals.push_back(val);
    }
  }
  m.row_labels.reserve(m.n_rows);
  for (const auto& doc : corpus.docs) m.row_labels.push_back(doc.label);
  return m;
}

// Column slice with columns reordered to subset order; labels preserved.
inline FeatureMatrix project(const FeatureMatrix& m, std::span<const std::uint32_t> subset) {
  constexpr std::uint32_t kAbsent = 0xFFFFFFFFu;
  std::vector<std::uint32_t> remap(m.n_cols, kAbsent);
  for (std::uint32_t k = 0; k < subset.size(); ++k) {
    if (subset[k] >= m.n_cols)
      throw std::out_of_range("feature index " + std::to_string(subset[k]) +
                              " out of range for " + std::to_string(m.n_cols) + " columns");
    remap[subset[k]] = k;
  }
  FeatureMatrix out;
  out.n_rows = m.n_rows;
  out.n_cols = subset.size();
  out.mode = m.mode;
  out.row_labels = m.row_labels;
  out.row_start.reserve(m.n_rows + 1);
  out.row_start.push_back(0);
  std::vector<std::pair<std::uint32_t, double>> buffer;
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    buffer.clear();
    const auto row = m.row(i);
    for (std::size_t k = 0; k < row.cols.size(); ++k) {
      const std::uint32_t nc = remap[row.cols[k]];
      if (nc != kAbsent) buffer.emplace_back(nc, row.vals[k]);
    }
    std::sort(buffer.begin(), buffer.end());
    for (const auto& [c, v] : buffer) {
      out.cols.push_back(c);
      out.vals.push_back(v);
    }
    out.row_start.push_back(out.cols.size());
  }
  return out;
}

// Row slice in the given order; labels follow their rows.
inline FeatureMatrix submatrix(const FeatureMatrix& m, std::span<const std::uint32_t> rows) {
  FeatureMatrix out;
  out.n_rows = rows.size();
  out.n_cols = m.n_cols;
  out.mode = m.mode;
  out.row_start.reserve(rows.size() + 1);
  out.row_start.push_back(0);
  for (const auto r : rows) {
    if (r >= m.n_rows) throw std::out_of_range("submatrix: row index out of range");
    const auto row = m.row(r);
    out.cols.insert(out.cols.end(), row.cols.begin(), row.cols.end());
    out.vals.insert(out.vals.end(), row.vals.begin(), row.vals.end());
    out.row_start.push_back(out.cols.size());
  }
  if (m.has_labels()) {
    out.row_labels.reserve(rows.size());
    for (const auto r : rows) out.row_labels.push_back(m.row_labels[r]);
  }
  return out;
}

// Maps every positive count to 1; identity on binary matrices.
inline FeatureMatrix binarize(FeatureMatrix m) {
  m.mode = MatrixMode::binary;
  for (auto& v : m.vals) v = 1.0;
  return m;
}

// --- text export/import: `n_rows n_cols mode` header, then triples ---

inline void write_matrix(const FeatureMatrix& m, std::ostream& out) {
  out << m.n_rows << ' ' << m.n_cols << ' ' << to_string(m.mode) << "\n";
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    const auto row = m.row(i);
    for (std::size_t k = 0; k < row.cols.size(); ++k)
      out << i << ' ' << row.cols[k] << ' ' << static_cast<std::uint64_t>(row.vals[k]) << "\n";
  }
}

inline FeatureMatrix read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("matrix file is empty");
  std::istringstream hs(header);
  std::size_t n_rows = 0, n_cols = 0;
  std::string mode_str;
  if (!(hs >> n_rows >> n_cols >> mode_str))
    throw std::runtime_error("malformed matrix header: \"" + header + "\"");
  FeatureMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.mode = matrix_mode_from_string(mode_str);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n_rows);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t r = 0;
    std::uint32_t c = 0;
    double v = 0;
    if (!(ls >> r >> c >> v))
      throw std::runtime_error("malformed matrix triple at line " + std::to_string(line_no));
    if (r >= n_rows || c >= n_cols)
      throw std::runtime_error("matrix index out of range at line " + std::to_string(line_no));
    rows[r].emplace_back(c, v);
  }
  m.row_start.push_back(0);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k].first == row[k - 1].first)
        throw std::runtime_error("duplicate (row, col) entry in matrix file");
    for (const auto& [c, v] : row) {
      m.cols.push_back(c);
      m.vals.push_back(v);
    }
    m.row_start.push_back(m.cols.size());
  }
  return m;
}

inline void write_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  for (const auto& term : vocab.terms) out << term << "\n";
}

inline Vocabulary read_vocabulary(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) vocab.terms.push_back(line);
  for (std::uint32_t i = 0; i < vocab.terms.size(); ++i) vocab.index[vocab.terms[i]] = i;
  return vocab;
}

}  // namespace intentminer
