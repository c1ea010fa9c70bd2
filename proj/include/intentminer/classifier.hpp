#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "intentminer/decision_tree.hpp"
#include "intentminer/naive_bayes.hpp"
#include "intentminer/neural_net.hpp"
#include "intentminer/parallel.hpp"
#include "intentminer/svm.hpp"
#include "intentminer/vectorize.hpp"

namespace intentminer {

enum class ClassifierKind { dt = 0, nb = 1, svm = 2, ann = 3 };

inline std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::dt: return "dt";
    case ClassifierKind::nb: return "nb";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::ann: return "ann";
  }
  throw std::logic_error("unreachable classifier kind");
}

inline ClassifierKind classifier_kind_from_string(std::string_view s) {
  if (s == "dt") return ClassifierKind::dt;
  if (s == "nb") return ClassifierKind::nb;
  if (s == "svm") return ClassifierKind::svm;
  if (s == "ann") return ClassifierKind::ann;
  throw std::invalid_argument("classifier kind must be one of dt/nb/svm/ann, got \"" +
                              std::string(s) + "\"");
}

// Variant order matches ClassifierKind.
using ClassifierParams = std::variant<DtParams, NbParams, SvmParams, AnnParams>;

struct ClassifierSpec {
  ClassifierParams params = DtParams{};
  std::uint64_t seed = 0;

  ClassifierKind kind() const { return static_cast<ClassifierKind>(params.index()); }

  static ClassifierSpec dt(DtParams p = {}, std::uint64_t seed = 0) { return {p, seed}; }
  static ClassifierSpec nb(NbParams p = {}, std::uint64_t seed = 0) { return {p, seed}; }
  static ClassifierSpec svm(SvmParams p = {}, std::uint64_t seed = 0) { return {p, seed}; }
  static ClassifierSpec ann(AnnParams p = {}, std::uint64_t seed = 0) { return {p, seed}; }
};

struct TrainedModel {
  std::size_t vocab_size = 0;
  std::variant<DtModel, NbModel, SvmModel, AnnModel> impl;

  ClassifierKind kind() const { return static_cast<ClassifierKind>(impl.index()); }
};

namespace detail {

inline void validate_training_data(const FeatureMatrix& m, const std::vector<Label>& labels) {
  if (labels.size() != m.n_rows)
    throw std::invalid_argument("label count (" + std::to_string(labels.size()) +
                                ") does not match row count (" + std::to_string(m.n_rows) + ")");
  if (m.n_rows == 0) throw std::invalid_argument("training data is empty");
  std::size_t yes = 0;
  for (const auto l : labels) yes += (l == Label::Yes);
  if (yes == 0 || yes == labels.size())
    throw std::runtime_error("training data contains a single class");
  for (const double v : m.vals)
    if (std::isnan(v) || v < 0.0)
      throw std::invalid_argument("matrix values must be nonnegative and finite");
}

}  // namespace detail

inline TrainedModel train(const ClassifierSpec& spec, const FeatureMatrix& m,
                          const std::vector<Label>& labels) {
  detail::validate_training_data(m, labels);
  TrainedModel model;
  model.vocab_size = m.n_cols;
  switch (spec.kind()) {
    case ClassifierKind::dt:
      model.impl = dt_train(std::get<DtParams>(spec.params), m, labels);
      break;
    case ClassifierKind::nb:
      model.impl = nb_train(std::get<NbParams>(spec.params), m, labels);
      break;
    case ClassifierKind::svm:
      model.impl = svm_train(std::get<SvmParams>(spec.params), m, labels);
      break;
    case ClassifierKind::ann:
      model.impl = ann_train(std::get<AnnParams>(spec.params), m, labels, spec.seed);
      break;
  }
  return model;
}

inline Label predict_row(const TrainedModel& model, const SparseRow& row) {
  if (row.n_cols != model.vocab_size)
    throw std::invalid_argument("predict: dimension mismatch (" + std::to_string(row.n_cols) +
                                " vs model " + std::to_string(model.vocab_size) + ")");
  return std::visit(
      [&](const auto& impl) -> Label {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, DtModel>) return dt_predict(impl, row);
        else if constexpr (std::is_same_v<T, NbModel>) return nb_predict(impl, row);
        else if constexpr (std::is_same_v<T, SvmModel>) return svm_predict(impl, row);
        else return ann_predict(impl, row);
      },
      model.impl);
}

inline std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& m) {
  if (m.n_cols != model.vocab_size)
    throw std::invalid_argument("predict: dimension mismatch (" + std::to_string(m.n_cols) +
                                " vs model " + std::to_string(model.vocab_size) + ")");
  std::vector<Label> out(m.n_rows, Label::No);
  parallel_for(m.n_rows, [&](std::size_t i) { out[i] = predict_row(model, m.row(i)); });
  return out;
}

// --- spec <-> JSON ---

inline nlohmann::json spec_to_json(const ClassifierSpec& spec) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(spec.kind()));
  j["seed"] = spec.seed;
  nlohmann::json p;
  switch (spec.kind()) {
    case ClassifierKind::dt: {
      const auto& d = std::get<DtParams>(spec.params);
      p["criterion"] = "gini";
      p["pruning"] = "none";
      p["min_node_size"] = d.min_node_size;
      break;
    }
    case ClassifierKind::nb: {
      const auto& d = std::get<NbParams>(spec.params);
      p["event_model"] = std::string(to_string(d.event_model));
      p["smoothing_alpha"] = d.alpha;
      break;
    }
    case ClassifierKind::svm: {
      const auto& d = std::get<SvmParams>(spec.params);
      p["kernel"] = "rbf";
      p["c_penalty"] = d.c_penalty;
      p["gamma"] = d.gamma;
      p["smo_tolerance"] = d.smo_tolerance;
      p["max_passes"] = d.max_passes;
      break;
    }
    case ClassifierKind::ann: {
      const auto& d = std::get<AnnParams>(spec.params);
      p["hidden_layers"] = std::vector<std::size_t>{kAnnHiddenWidth, kAnnHiddenWidth};
      p["activation"] = "relu";
      p["output_activation"] = "sigmoid";
      p["init"] = "xavier";
      p["learning_rate"] = d.learning_rate;
      p["epochs"] = d.epochs;
      p["loss"] = "mse";
      p["optimizer"] = "sgd";
      break;
    }
  }
  j["params"] = p;
  return j;
}

inline ClassifierSpec spec_from_json(const nlohmann::json& j) {
  if (!j.contains("kind")) throw std::invalid_argument("classifier spec needs a `kind` field");
  const auto kind = classifier_kind_from_string(j["kind"].get<std::string>());
  ClassifierSpec spec;
  spec.seed = j.value("seed", 0ULL);
  const nlohmann::json p = j.value("params", nlohmann::json::object());
  switch (kind) {
    case ClassifierKind::dt: {
      DtParams d;
      d.min_node_size = p.value("min_node_size", d.min_node_size);
      spec.params = d;
      break;
    }
    case ClassifierKind::nb: {
      NbParams d;
      if (p.contains("event_model"))
        d.event_model = nb_event_model_from_string(p["event_model"].get<std::string>());
      d.alpha = p.value("smoothing_alpha", d.alpha);
      spec.params = d;
      break;
    }
    case ClassifierKind::svm: {
      SvmParams d;
      d.c_penalty = p.value("c_penalty", d.c_penalty);
      d.gamma = p.value("gamma", d.gamma);
      d.smo_tolerance = p.value("smo_tolerance", d.smo_tolerance);
      d.max_passes = p.value("max_passes", d.max_passes);
      spec.params = d;
      break;
    }
    case ClassifierKind::ann: {
      AnnParams d;
      d.learning_rate = p.value("learning_rate", d.learning_rate);
      d.epochs = p.value("epochs", d.epochs);
      spec.params = d;
      break;
    }
  }
  return spec;
}

// --- model <-> JSON (versioned; prediction round-trips bit-exact) ---

inline nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = std::string(to_string(model.kind()));
  j["vocab_size"] = model.vocab_size;
  nlohmann::json body;
  std::visit(
      [&](const auto& impl) {
        using T = std::decay_t<decltype(impl)>;
        if constexpr (std::is_same_v<T, DtModel>) {
          body["min_node_size"] = impl.params.min_node_size;
          nlohmann::json nodes = nlohmann::json::array();
          for (const auto& n : impl.nodes) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"leaf", std::string(to_string(n.leaf))},
                             {"left", n.left},
                             {"right", n.right},
                             {"n_docs", n.n_docs},
                             {"impurity", n.impurity}});
          }
          body["nodes"] = std::move(nodes);
        } else if constexpr (std::is_same_v<T, NbModel>) {
          body["event_model"] = std::string(to_string(impl.params.event_model));
          body["smoothing_alpha"] = impl.params.alpha;
          body["log_prior"] = impl.log_prior;
          body["log_like_no"] = impl.log_like[0];
          body["log_like_yes"] = impl.log_like[1];
          if (impl.params.event_model == NbParams::EventModel::bernoulli) {
            body["log_absent_no"] = impl.log_absent[0];
            body["log_absent_yes"] = impl.log_absent[1];
          }
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          body["c_penalty"] = impl.params.c_penalty;
          body["gamma"] = impl.params.gamma;
          body["smo_tolerance"] = impl.params.smo_tolerance;
          body["max_passes"] = impl.params.max_passes;
          body["bias"] = impl.bias;
          body["sv_start"] = impl.sv_start;
          body["sv_cols"] = impl.sv_cols;
          body["sv_vals"] = impl.sv_vals;
          body["sv_coef"] = impl.sv_coef;
          body["sv_rows"] = impl.sv_rows;
        } else {
          body["learning_rate"] = impl.params.learning_rate;
          body["epochs"] = impl.params.epochs;
          body["layer_sizes"] = impl.net.sizes;
          body["weights"] = impl.net.w;
          body["biases"] = impl.net.b;
        }
      },
      model.impl);
  j["model"] = std::move(body);
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != 1)
    throw std::runtime_error("unsupported model format version");
  TrainedModel model;
  model.vocab_size = j.at("vocab_size").get<std::size_t>();
  const auto kind = classifier_kind_from_string(j.at("kind").get<std::string>());
  const auto& body = j.at("model");
  switch (kind) {
    case ClassifierKind::dt: {
      DtModel impl;
      impl.params.min_node_size = body.at("min_node_size").get<std::size_t>();
      for (const auto& nj : body.at("nodes")) {
        DtNode n;
        n.feature = nj.at("feature").get<std::int32_t>();
        n.threshold = nj.at("threshold").get<double>();
        n.leaf = label_from_string(nj.at("leaf").get<std::string>());
        n.left = nj.at("left").get<std::int32_t>();
        n.right = nj.at("right").get<std::int32_t>();
        n.n_docs = nj.at("n_docs").get<std::uint32_t>();
        n.impurity = nj.at("impurity").get<double>();
        impl.nodes.push_back(n);
      }
      model.impl = std::move(impl);
      break;
    }
    case ClassifierKind::nb: {
      NbModel impl;
      impl.params.event_model = nb_event_model_from_string(body.at("event_model").get<std::string>());
      impl.params.alpha = body.at("smoothing_alpha").get<double>();
      impl.vocab_size = model.vocab_size;
      impl.log_prior = body.at("log_prior").get<std::array<double, 2>>();
      impl.log_like[0] = body.at("log_like_no").get<std::vector<double>>();
      impl.log_like[1] = body.at("log_like_yes").get<std::vector<double>>();
      if (impl.params.event_model == NbParams::EventModel::bernoulli) {
        impl.log_absent[0] = body.at("log_absent_no").get<std::vector<double>>();
        impl.log_absent[1] = body.at("log_absent_yes").get<std::vector<double>>();
      }
      model.impl = std::move(impl);
      break;
    }
    case ClassifierKind::svm: {
      SvmModel impl;
      impl.params.c_penalty = body.at("c_penalty").get<double>();
      impl.params.gamma = body.at("gamma").get<double>();
      impl.params.smo_tolerance = body.at("smo_tolerance").get<double>();
      impl.params.max_passes = body.at("max_passes").get<std::size_t>();
      impl.vocab_size = model.vocab_size;
      impl.bias = body.at("bias").get<double>();
      impl.sv_start = body.at("sv_start").get<std::vector<std::uint64_t>>();
      impl.sv_cols = body.at("sv_cols").get<std::vector<std::uint32_t>>();
      impl.sv_vals = body.at("sv_vals").get<std::vector<double>>();
      impl.sv_coef = body.at("sv_coef").get<std::vector<double>>();
      impl.sv_rows = body.at("sv_rows").get<std::vector<std::uint32_t>>();
      model.impl = std::move(impl);
      break;
    }
    case ClassifierKind::ann: {
      AnnModel impl;
      impl.params.learning_rate = body.at("learning_rate").get<double>();
      impl.params.epochs = body.at("epochs").get<std::size_t>();
      impl.net.sizes = body.at("layer_sizes").get<std::vector<std::size_t>>();
      impl.net.w = body.at("weights").get<std::vector<std::vector<double>>>();
      impl.net.b = body.at("biases").get<std::vector<std::vector<double>>>();
      model.impl = std::move(impl);
      break;
    }
  }
  return model;
}

inline void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(model).dump(2) << "\n";
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

}  // namespace intentminer
