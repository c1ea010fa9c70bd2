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

// Soft-margin C-SVC with an RBF kernel, trained by sequential minimal
// optimization. "Overlapping penalty" maps to the cost C.
struct SvmParams {
  double c_penalty = 1.0;
  double gamma = 1.0;
  double smo_tolerance = 1e-3;
  std::size_t max_passes = 200;  // cap on outer sweeps over the data

  void validate() const {
    if (c_penalty <= 0.0) throw std::invalid_argument("c_penalty must be positive");
    if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  }
};

struct SvmModel {
  SvmParams params;
  std::size_t vocab_size = 0;
  // Support vectors in CSR form, with coef = alpha_i * y_i per vector.
  std::vector<std::uint64_t> sv_start{0};
  std::vector<std::uint32_t> sv_cols;
  std::vector<double> sv_vals;
  std::vector<double> sv_coef;
  std::vector<std::uint32_t> sv_rows;  // training-row provenance
  double bias = 0.0;

  std::size_t n_sv() const { return sv_coef.size(); }
  SparseRow sv(std::size_t k) const {
    const std::size_t lo = sv_start[k], hi = sv_start[k + 1];
    return {std::span(sv_cols).subspan(lo, hi - lo), std::span(sv_vals).subspan(lo, hi - lo),
            vocab_size};
  }
};

inline double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  if (x.size() != z.size())
    throw std::invalid_argument("rbf_kernel: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(z.size()) + ")");
  if (gamma <= 0.0) throw std::invalid_argument("rbf_kernel: gamma must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - z[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

namespace svm_detail {

inline double sparse_dot(const SparseRow& a, const SparseRow& b) {
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.cols.size() && j < b.cols.size()) {
    if (a.cols[i] == b.cols[j]) {
      dot += a.vals[i] * b.vals[j];
      ++i;
      ++j;
    } else if (a.cols[i] < b.cols[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

inline double sq_norm(const SparseRow& r) {
  double s = 0.0;
  for (const double v : r.vals) s += v * v;
  return s;
}

inline double rbf_sparse(const SparseRow& a, double na, const SparseRow& b, double nb,
                         double gamma) {
  const double d2 = std::max(0.0, na + nb - 2.0 * sparse_dot(a, b));
  return std::exp(-gamma * d2);
}

// Platt-style SMO. Iteration order and second-choice fallbacks are fully
// deterministic, so retraining on identical data is bit-identical.
class SmoSolver {
 public:
  SmoSolver(const FeatureMatrix& m, const std::vector<double>& y, const SvmParams& params)
      : m_(m), y_(y), params_(params), n_(m.n_rows) {
    alpha_.assign(n_, 0.0);
    f_.assign(n_, 0.0);  // sum_j alpha_j y_j K(j, i), bias excluded
    norms_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) norms_[i] = sq_norm(m_.row(i));
  }

  void solve() {
    std::size_t sweeps = 0;
    // The pairwise loop drives alpha to the optimum; the threshold is then
    // recomputed from the final multipliers, since the incremental b can end
    // outside the feasible interval when every multiplier sits at a bound.
    for (int round = 0; round < 3; ++round) {
      bool examine_all = true;
      while (sweeps < params_.max_passes) {
        ++sweeps;
        std::size_t changed = 0;
        if (examine_all) {
          for (std::size_t i = 0; i < n_; ++i) changed += examine(i);
        } else {
          for (std::size_t i = 0; i < n_; ++i)
            if (is_free(i)) changed += examine(i);
        }
        if (examine_all) {
          if (changed == 0) break;
          examine_all = false;
        } else if (changed == 0) {
          examine_all = true;
        }
      }
      b_ = recompute_bias();
      if (max_kkt_violation() <= params_.smo_tolerance) break;
    }
  }

  const std::vector<double>& alpha() const { return alpha_; }
  double bias() const { return b_; }

 private:
  double kernel(std::size_t i, std::size_t j) const {
    return rbf_sparse(m_.row(i), norms_[i], m_.row(j), norms_[j], params_.gamma);
  }

  // Bound classification carries a relative slack: pairwise updates leave
  // residues near 0 and C that must not be mistaken for free multipliers.
  bool at_lower(std::size_t i) const { return alpha_[i] <= kBoundTol * params_.c_penalty; }
  bool at_upper(std::size_t i) const {
    return alpha_[i] >= (1.0 - kBoundTol) * params_.c_penalty;
  }
  bool is_free(std::size_t i) const { return !at_lower(i) && !at_upper(i); }

  double error(std::size_t i) const { return f_[i] + b_ - y_[i]; }

  // Threshold from the KKT conditions of the final multipliers: the mean of
  // y_i - F_i over free vectors, otherwise the midpoint of the feasible
  // interval defined by the bound vectors.
  double recompute_bias() const {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t n_free = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double target = y_[i] - f_[i];
      if (is_free(i)) {
        sum += target;
        ++n_free;
      } else if ((at_lower(i) && y_[i] > 0.0) || (at_upper(i) && y_[i] < 0.0)) {
        lo = std::max(lo, target);
      } else {
        hi = std::min(hi, target);
      }
    }
    if (n_free > 0) return sum / static_cast<double>(n_free);
    if (std::isinf(lo) && std::isinf(hi)) return b_;
    if (std::isinf(lo)) return hi;
    if (std::isinf(hi)) return lo;
    return (lo + hi) / 2.0;
  }

  double max_kkt_violation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double margin = y_[i] * (f_[i] + b_);
      if (at_lower(i))
        worst = std::max(worst, 1.0 - margin);
      else if (at_upper(i))
        worst = std::max(worst, margin - 1.0);
      else
        worst = std::max(worst, std::abs(margin - 1.0));
    }
    return worst;
  }

  std::size_t examine(std::size_t i2) {
    const double tol = params_.smo_tolerance;
    const double e2 = error(i2);
    const double r2 = e2 * y_[i2];
    const bool violated = (r2 < -tol && !at_upper(i2)) || (r2 > tol && !at_lower(i2));
    if (!violated) return 0;

    // Heuristic 1: maximize |E1 - E2| over free multipliers.
    std::ptrdiff_t best = -1;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!is_free(i)) continue;
      const double gap = std::abs(error(i) - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (best >= 0 && take_step(static_cast<std::size_t>(best), i2)) return 1;

    // Heuristic 2: all free multipliers, rotating start point.
    const std::size_t start = next_start_++;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start + k) % n_;
      if (is_free(i1) && take_step(i1, i2)) return 1;
    }
    // Heuristic 3: the whole training set.
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = (start + k) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double c = params_.c_penalty;
    const double a1_old = alpha_[i1], a2_old = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = error(i1), e2 = error(i2);
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(c, c + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a1_old + a2_old - c);
      hi = std::min(c, a1_old + a2_old);
    }
    if (lo >= hi) return false;

    const double k11 = kernel(i1, i1);
    const double k12 = kernel(i1, i2);
    const double k22 = kernel(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    const double snap = kBoundTol * c;
    double a2;
    if (eta > 0.0) {
      a2 = a2_old + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, lo, hi);
    } else {
      // Degenerate curvature (duplicate points): compare the objective at
      // both clip ends.
      const double f1 = y1 * (e1 - b_) - a1_old * k11 - s * a2_old * k12;
      const double f2 = y2 * (e2 - b_) - s * a1_old * k12 - a2_old * k22;
      const double l1 = a1_old + s * (a2_old - lo);
      const double h1 = a1_old + s * (a2_old - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
      if (obj_lo < obj_hi - kEps)
        a2 = lo;
      else if (obj_lo > obj_hi + kEps)
        a2 = hi;
      else
        return false;
    }
    if (lo == 0.0 && a2 < snap) a2 = 0.0;
    else if (hi == c && a2 > c - snap) a2 = c;
    if (std::abs(a2 - a2_old) < kEps * (a2 + a2_old + kEps)) return false;

    double a1 = a1_old + s * (a2_old - a2);
    if (a1 < snap) {
      a2 += s * a1;
      a1 = 0.0;
    } else if (a1 > c - snap) {
      a2 += s * (a1 - c);
      a1 = c;
    }

    const double b1 = b_ - e1 - y1 * (a1 - a1_old) * k11 - y2 * (a2 - a2_old) * k12;
    const double b2 = b_ - e2 - y1 * (a1 - a1_old) * k12 - y2 * (a2 - a2_old) * k22;
    if (a1 > 0.0 && a1 < c)
      b_ = b1;
    else if (a2 > 0.0 && a2 < c)
      b_ = b2;
    else
      b_ = (b1 + b2) / 2.0;

    const double d1 = y1 * (a1 - a1_old);
    const double d2 = y2 * (a2 - a2_old);
    for (std::size_t j = 0; j < n_; ++j)
      f_[j] += d1 * kernel(i1, j) + d2 * kernel(i2, j);

    alpha_[i1] = a1;
    alpha_[i2] = a2;
    return true;
  }

  static constexpr double kEps = 1e-12;
  static constexpr double kBoundTol = 1e-8;

  const FeatureMatrix& m_;
  const std::vector<double>& y_;
  SvmParams params_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> f_;
  std::vector<double> norms_;
  double b_ = 0.0;
  std::size_t next_start_ = 0;
};

}  // namespace svm_detail

inline SvmModel svm_train(const SvmParams& params, const FeatureMatrix& m,
                          const std::vector<Label>& labels) {
  params.validate();
  std::vector<double> y(m.n_rows);
  for (std::size_t i = 0; i < m.n_rows; ++i) y[i] = labels[i] == Label::Yes ? 1.0 : -1.0;

  svm_detail::SmoSolver solver(m, y, params);
  solver.solve();

  SvmModel model;
  model.params = params;
  model.vocab_size = m.n_cols;
  model.bias = solver.bias();
  const auto& alpha = solver.alpha();
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    if (alpha[i] <= 0.0) continue;
    const auto row = m.row(i);
    model.sv_cols.insert(model.sv_cols.end(), row.cols.begin(), row.cols.end());
    model.sv_vals.insert(model.sv_vals.end(), row.vals.begin(), row.vals.end());
    model.sv_start.push_back(model.sv_cols.size());
    model.sv_coef.push_back(alpha[i] * y[i]);
    model.sv_rows.push_back(static_cast<std::uint32_t>(i));
  }
  return model;
}

inline double svm_decision(const SvmModel& model, const SparseRow& x) {
  if (x.n_cols != model.vocab_size)
    throw std::invalid_argument("svm_decision: dimension mismatch");
  const double nx = svm_detail::sq_norm(x);
  double f = model.bias;
  for (std::size_t k = 0; k < model.n_sv(); ++k) {
    const auto sv = model.sv(k);
    f += model.sv_coef[k] *
         svm_detail::rbf_sparse(sv, svm_detail::sq_norm(sv), x, nx, model.params.gamma);
  }
  return f;
}

inline Label svm_predict(const SvmModel& model, const SparseRow& x) {
  return svm_decision(model, x) >= 0.0 ? Label::Yes : Label::No;
}

// Dual objective of the stored solution: sum(alpha) - 1/2 sum coef_i coef_j K_ij.
inline double svm_dual_objective(const SvmModel& model) {
  double sum_alpha = 0.0;
  for (const double c : model.sv_coef) sum_alpha += std::abs(c);
  double quad = 0.0;
  std::vector<double> norms(model.n_sv());
  for (std::size_t k = 0; k < model.n_sv(); ++k) norms[k] = svm_detail::sq_norm(model.sv(k));
  for (std::size_t i = 0; i < model.n_sv(); ++i)
    for (std::size_t j = 0; j < model.n_sv(); ++j)
      quad += model.sv_coef[i] * model.sv_coef[j] *
              svm_detail::rbf_sparse(model.sv(i), norms[i], model.sv(j), norms[j],
                                     model.params.gamma);
  return sum_alpha - 0.5 * quad;
}

}  // namespace intentminer
