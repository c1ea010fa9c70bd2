#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "intentminer/classifier.hpp"

using namespace intentminer;
using imtest::dense_matrix;
using imtest::yn;

namespace {

FeedForwardNet zero_net(std::vector<std::size_t> sizes) {
  FeedForwardNet net;
  net.sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    net.w.push_back(std::vector<double>(net.sizes[l] * net.sizes[l + 1], 0.0));
    net.b.push_back(std::vector<double>(net.sizes[l + 1], 0.0));
  }
  return net;
}

double max_relative_error(const AnnGradient& a, const AnnGradient& b) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.w.size(); ++l) {
    for (std::size_t k = 0; k < a.w[l].size(); ++k) {
      const double denom = std::max({std::abs(a.w[l][k]), std::abs(b.w[l][k]), 1e-4});
      worst = std::max(worst, std::abs(a.w[l][k] - b.w[l][k]) / denom);
    }
    for (std::size_t k = 0; k < a.b[l].size(); ++k) {
      const double denom = std::max({std::abs(a.b[l][k]), std::abs(b.b[l][k]), 1e-4});
      worst = std::max(worst, std::abs(a.b[l][k] - b.b[l][k]) / denom);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("all-zero weights output sigmoid(0) = 0.5") {
  const auto net = zero_net({3, 2, 2, 1});
  const std::vector<double> x = {0.7, -1.0, 2.0};
  CHECK(net.forward(x) == 0.5);
}

TEST_CASE("nonnegative weights on nonnegative input push the output above 0.5") {
  auto net = zero_net({2, 2, 2, 1});
  for (auto& layer : net.w)
    for (auto& w : layer) w = 0.5;
  const std::vector<double> x = {1.0, 2.0};
  CHECK(net.forward(x) >= 0.5);
  const std::vector<double> zero = {0.0, 0.0};
  CHECK(net.forward(zero) == 0.5);
}

TEST_CASE("xavier initialization respects the fan bound and is seed-deterministic") {
  std::mt19937_64 rng(9);
  const auto net = FeedForwardNet::xavier({5, 4, 3, 1}, rng);
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(net.sizes[l] + net.sizes[l + 1]));
    for (const double w : net.w[l]) {
      CHECK(std::abs(w) <= limit);
    }
    for (const double b : net.b[l]) CHECK(b == 0.0);
  }
  std::mt19937_64 rng2(9);
  const auto net2 = FeedForwardNet::xavier({5, 4, 3, 1}, rng2);
  CHECK(net.w == net2.w);
}

TEST_CASE("gradient is zero at an exact fit") {
  auto net = zero_net({2, 2, 2, 1});
  const std::vector<double> x = {0.3, 0.4};
  const double y = net.forward(x);  // 0.5 exactly
  const auto g = net.gradient(x, y);
  for (const auto& layer : g.w)
    for (const double v : layer) CHECK(v == 0.0);
}

TEST_CASE("backprop matches central finite differences on seeded 4-3-3-1 nets") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto net = FeedForwardNet::xavier({4, 3, 3, 1}, rng);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(4);
    // FD is invalid across ReLU kinks: redraw probes that graze one.
    do {
      for (auto& v : x) v = dist(rng);
    } while (imtest::min_hidden_preactivation(net, x) < 1e-3);
    const double y = (seed % 2) ? 1.0 : 0.0;

    const auto analytic = net.gradient(x, y);
    const auto numeric = imtest::fd_gradient(net, x, y, 1e-5);
    CHECK(max_relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("two SGD steps on one sample strictly decrease its loss") {
  std::mt19937_64 rng(33);
  auto net = FeedForwardNet::xavier({3, 4, 4, 1}, rng);
  const std::vector<double> x = {0.5, -0.25, 1.0};
  const double y = 1.0;
  const auto loss = [&] {
    const double out = net.forward(x);
    return (out - y) * (out - y);
  };
  const double l0 = loss();
  net.apply(net.gradient(x, y), 1e-3);
  const double l1 = loss();
  net.apply(net.gradient(x, y), 1e-3);
  const double l2 = loss();
  CHECK(l1 < l0);
  CHECK(l2 < l1);
}

TEST_CASE("ann_train is seed-deterministic and learns a separable rule") {
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 40; ++i) {
    const bool yes = i % 2;
    rows.push_back({yes ? 1.0 : 0.0, (i % 3) ? 1.0 : 0.0});
    labels.push_back(yes ? Label::Yes : Label::No);
  }
  const auto m = dense_matrix(rows, MatrixMode::binary, &labels);
  AnnParams params;
  params.epochs = 20;
  const auto a = ann_train(params, m, labels, 7);
  const auto b = ann_train(params, m, labels, 7);
  CHECK(a.net.w == b.net.w);
  CHECK(a.net.b == b.net.b);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < m.n_rows; ++i)
    correct += ann_predict(a, m.row(i)) == labels[i];
  CHECK(correct == m.n_rows);
}

TEST_CASE("forward validates dimensions") {
  const auto net = zero_net({3, 2, 2, 1});
  const std::vector<double> wrong = {1.0, 2.0};
  CHECK_THROWS_AS(net.forward(wrong), std::invalid_argument);
}

TEST_CASE("ann params validate") {
  const AnnParams zero_lr{0.0, 1};
  const AnnParams zero_epochs{0.1, 0};
  CHECK_THROWS_AS(zero_lr.validate(), std::invalid_argument);
  CHECK_THROWS_AS(zero_epochs.validate(), std::invalid_argument);
}
