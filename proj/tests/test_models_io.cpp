#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "intentminer/classifier.hpp"

using namespace intentminer;
using imtest::dense_matrix;

namespace {

// Round-trip through JSON text and require bit-identical predictions on a
// probe set, per model kind.
void check_roundtrip(const ClassifierSpec& spec) {
  std::mt19937 rng(2718);
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 24; ++i) {
    rows.push_back({static_cast<double>(rng() % 3), static_cast<double>(rng() % 3),
                    static_cast<double>(rng() % 2)});
    labels.push_back(i % 2 ? Label::Yes : Label::No);
  }
  const auto m = dense_matrix(rows, MatrixMode::tf, &labels);
  const auto model = train(spec, m, labels);

  const std::string text = model_to_json(model).dump();
  const auto restored = model_from_json(nlohmann::json::parse(text));
  CHECK(restored.kind() == model.kind());
  CHECK(restored.vocab_size == model.vocab_size);

  std::vector<std::vector<double>> probes;
  for (int i = 0; i < 40; ++i)
    probes.push_back({static_cast<double>(rng() % 4), static_cast<double>(rng() % 4),
                      static_cast<double>(rng() % 2)});
  const auto pm = dense_matrix(probes, MatrixMode::tf);
  for (std::size_t i = 0; i < pm.n_rows; ++i)
    CHECK(predict_row(restored, pm.row(i)) == predict_row(model, pm.row(i)));
}

}  // namespace

TEST_CASE("model JSON round-trip preserves predictions bit-exactly") {
  check_roundtrip(ClassifierSpec::dt());
  check_roundtrip(ClassifierSpec::nb());
  NbParams bern;
  bern.event_model = NbParams::EventModel::bernoulli;
  check_roundtrip(ClassifierSpec::nb(bern));
  check_roundtrip(ClassifierSpec::svm());
  check_roundtrip(ClassifierSpec::ann({0.1, 3}, 11));
}

TEST_CASE("svm decision values survive the round-trip bit-exactly") {
  std::mt19937 rng(5);
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({static_cast<double>(rng() % 5) / 2.0, static_cast<double>(rng() % 5) / 2.0});
    labels.push_back(i % 2 ? Label::Yes : Label::No);
  }
  const auto m = dense_matrix(rows, MatrixMode::tf, &labels);
  const auto model = train(ClassifierSpec::svm(), m, labels);
  const auto restored =
      model_from_json(nlohmann::json::parse(model_to_json(model).dump()));
  const auto& a = std::get<SvmModel>(model.impl);
  const auto& b = std::get<SvmModel>(restored.impl);
  for (std::size_t i = 0; i < m.n_rows; ++i)
    CHECK(svm_decision(a, m.row(i)) == svm_decision(b, m.row(i)));
}

TEST_CASE("spec JSON round-trip") {
  SvmParams sp;
  sp.c_penalty = 2.5;
  sp.gamma = 0.7;
  const auto spec = ClassifierSpec::svm(sp, 99);
  const auto restored = spec_from_json(spec_to_json(spec));
  CHECK(restored.kind() == ClassifierKind::svm);
  CHECK(restored.seed == 99);
  CHECK(std::get<SvmParams>(restored.params).c_penalty == 2.5);
  CHECK(std::get<SvmParams>(restored.params).gamma == 0.7);

  CHECK_THROWS(spec_from_json(nlohmann::json{{"kind", "forest"}}));
  CHECK_THROWS(spec_from_json(nlohmann::json::object()));
}

TEST_CASE("unsupported model format version is rejected") {
  nlohmann::json j;
  j["format_version"] = 99;
  CHECK_THROWS_WITH(model_from_json(j), Catch::Matchers::ContainsSubstring("format version"));
}
