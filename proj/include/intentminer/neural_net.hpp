#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "intentminer/vectorize.hpp"

namespace intentminer {

// Feed-forward net: ReLU hidden layers, sigmoid output, squared-error loss,
// plain SGD. The classifier topology is fixed at two hidden layers of 100.
struct AnnParams {
  double learning_rate = 0.1;
  std::size_t epochs = 1;

  void validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  }
};

inline constexpr std::size_t kAnnHiddenWidth = 100;

struct AnnGradient {
  std::vector<std::vector<double>> w;  // matches FeedForwardNet layout
  std::vector<std::vector<double>> b;
};

struct FeedForwardNet {
  std::vector<std::size_t> sizes;          // e.g. {d, 100, 100, 1}
  std::vector<std::vector<double>> w;      // per layer, row-major (out x in)
  std::vector<std::vector<double>> b;

  std::size_t n_layers() const { return sizes.size() - 1; }
  std::size_t input_dim() const { return sizes.front(); }

  // Xavier-uniform init: weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static FeedForwardNet xavier(std::vector<std::size_t> layer_sizes, std::mt19937_64& rng) {
    if (layer_sizes.size() < 2 || layer_sizes.back() != 1)
      throw std::invalid_argument("network needs >= 1 layer and a single output unit");
    FeedForwardNet net;
    net.sizes = std::move(layer_sizes);
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
      const std::size_t fan_in = net.sizes[l], fan_out = net.sizes[l + 1];
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-limit, limit);
      std::vector<double> weights(fan_in * fan_out);
      for (auto& x : weights) x = dist(rng);
      net.w.push_back(std::move(weights));
      net.b.push_back(std::vector<double>(fan_out, 0.0));
    }
    return net;
  }

  // Forward pass; fills per-layer activations when a scratch is supplied.
  double forward(std::span<const double> x, std::vector<std::vector<double>>* activations = nullptr) const {
    if (x.size() != input_dim())
      throw std::invalid_argument("ann forward: dimension mismatch (" + std::to_string(x.size()) +
                                  " vs " + std::to_string(input_dim()) + ")");
    std::vector<double> a(x.begin(), x.end());
    if (activations) {
      activations->clear();
      activations->push_back(a);
    }
    for (std::size_t l = 0; l < n_layers(); ++l) {
      const std::size_t in = sizes[l], out = sizes[l + 1];
      std::vector<double> z(out);
      for (std::size_t o = 0; o < out; ++o) {
        double s = b[l][o];
        const double* row = &w[l][o * in];
        for (std::size_t i = 0; i < in; ++i) s += row[i] * a[i];
        z[o] = s;
      }
      const bool last = (l + 1 == n_layers());
      for (auto& v : z) v = last ? 1.0 / (1.0 + std::exp(-v)) : std::max(0.0, v);
      a = std::move(z);
      if (activations) activations->push_back(a);
    }
    return a[0];
  }

  // Exact backprop gradient of (forward(x) - y)^2; ReLU subgradient 0 at 0.
  AnnGradient gradient(std::span<const double> x, double y) const {
    std::vector<std::vector<double>> act;
    const double out = forward(x, &act);

    AnnGradient g;
    g.w.resize(n_layers());
    g.b.resize(n_layers());
    for (std::size_t l = 0; l < n_layers(); ++l) {
      g.w[l].assign(w[l].size(), 0.0);
      g.b[l].assign(b[l].size(), 0.0);
    }

    // Output delta: dL/dz = 2 (out - y) * sigmoid'(z), sigmoid' = out (1 - out).
    std::vector<double> delta{2.0 * (out - y) * out * (1.0 - out)};
    for (std::size_t l = n_layers(); l-- > 0;) {
      const std::size_t in = sizes[l], outn = sizes[l + 1];
      const auto& a_prev = act[l];
      for (std::size_t o = 0; o < outn; ++o) {
        g.b[l][o] = delta[o];
        double* grow = &g.w[l][o * in];
        for (std::size_t i = 0; i < in; ++i) grow[i] = delta[o] * a_prev[i];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        if (act[l][i] <= 0.0) continue;  // ReLU gate (activation 0 => z <= 0)
        double s = 0.0;
        for (std::size_t o = 0; o < outn; ++o) s += w[l][o * in + i] * delta[o];
        prev[i] = s;
      }
      delta = std::move(prev);
    }
    return g;
  }

  void apply(const AnnGradient& g, double lr) {
    for (std::size_t l = 0; l < n_layers(); ++l) {
      for (std::size_t k = 0; k < w[l].size(); ++k) w[l][k] -= lr * g.w[l][k];
      for (std::size_t k = 0; k < b[l].size(); ++k) b[l][k] -= lr * g.b[l][k];
    }
  }
};

struct AnnModel {
  AnnParams params;
  FeedForwardNet net;
};

inline AnnModel ann_train(const AnnParams& params, const FeatureMatrix& m,
                          const std::vector<Label>& labels, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  AnnModel model;
  model.params = params;
  model.net = FeedForwardNet::xavier({m.n_cols, kAnnHiddenWidth, kAnnHiddenWidth, 1}, rng);

  std::vector<std::size_t> order(m.n_rows);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> x;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const std::size_t i : order) {
      m.row(i).to_dense(x);
      const double y = labels[i] == Label::Yes ? 1.0 : 0.0;
      model.net.apply(model.net.gradient(x, y), params.learning_rate);
    }
  }
  return model;
}

inline double ann_forward(const AnnModel& model, std::span<const double> x) {
  return model.net.forward(x);
}

// Sigmoid output thresholded at 0.5; exactly 0.5 maps to Yes.
inline Label ann_predict(const AnnModel& model, const SparseRow& row) {
  std::vector<double> x;
  row.to_dense(x);
  return model.net.forward(x) >= 0.5 ? Label::Yes : Label::No;
}

}  // namespace intentminer
