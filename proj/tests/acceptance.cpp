// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "intentminer/pipeline.hpp"

using namespace intentminer;
using imtest::dense_matrix;
namespace fs = std::filesystem;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

int g_failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<void(Checker&)>& body) {
  Checker check;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check.require(elapsed < budget_s, "runtime " + std::to_string(elapsed) + "s exceeds budget " +
                                          std::to_string(budget_s) + "s");
  if (check.ok) {
    std::printf("[PASS] criterion %2d: %s (%.2fs)\n", id, name.c_str(), elapsed);
  } else {
    std::printf("[FAIL] criterion %2d: %s (%.2fs) -- %s\n", id, name.c_str(), elapsed,
                check.detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      out[entry.path().lexically_relative(dir).string()] = slurp(entry.path());
  return out;
}

void check_pooled_counts(Checker& check, const EvalReport& report) {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& f : report.per_fold) {
    tp += f.tp;
    fp += f.fp;
    fn += f.fn;
    tn += f.tn;
  }
  check.require(report.aggregate.tp == tp && report.aggregate.fp == fp &&
                    report.aggregate.fn == fn && report.aggregate.tn == tn,
                "aggregate confusion counts are not the per-fold sums");
}

}  // namespace

int main() {
  const fs::path work =
      fs::temp_directory_path() / ("im_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);

  // Shared paper-shape artifacts (criteria 8-10).
  const fs::path corpus_path = work / "synth.jsonl";
  std::map<ClassifierKind, double> scheme1_accuracy;

  // 1. IG oracle equivalence -------------------------------------------------
  criterion(1, "information gain matches the entropy oracle (200 random corpora)", 10.0,
            [](Checker& check) {
              std::mt19937 rng(1234);
              for (int iter = 0; iter < 200; ++iter) {
                const std::size_t n = 2 + rng() % 49;
                const std::size_t d = 1 + rng() % 20;
                std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
                std::vector<Label> labels;
                for (std::size_t i = 0; i < n; ++i) {
                  labels.push_back(rng() % 2 ? Label::Yes : Label::No);
                  for (auto& v : rows[i]) v = rng() % 2;
                }
                const auto m = dense_matrix(rows, MatrixMode::binary, &labels);
                const auto scores = ig_scores(m, labels);
                const auto oracle = imtest::ig_oracle(m, labels);
                for (std::size_t j = 0; j < d; ++j)
                  check.require(std::abs(scores[j].gain - oracle[j]) <= 1e-12,
                                "IG mismatch beyond 1e-12 at column " + std::to_string(j));
              }
            });

  // 2. NB oracle equivalence -------------------------------------------------
  criterion(2, "naive Bayes posteriors match the hand formula (exhaustive small corpora)", 5.0,
            [](Checker& check) {
              std::size_t cases = 0;
              for (std::size_t d = 1; d <= 3; ++d) {
                std::size_t combos = 1;
                for (std::size_t k = 0; k < d; ++k) combos *= 3;
                for (std::size_t n = 2; n <= 3; ++n) {
                  std::size_t total = 1;
                  for (std::size_t k = 0; k < n; ++k) total *= combos;
                  const std::size_t cap = (n == 3 && d == 3) ? 2000 : total;
                  for (std::size_t code = 0; code < std::min(total, cap); ++code) {
                    std::size_t x = code;
                    std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
                    for (std::size_t i = 0; i < n; ++i) {
                      std::size_t dc = x % combos;
                      x /= combos;
                      for (std::size_t k = 0; k < d; ++k) {
                        rows[i][k] = static_cast<double>(dc % 3);
                        dc /= 3;
                      }
                    }
                    for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
                      std::vector<Label> labels;
                      for (std::size_t i = 0; i < n; ++i)
                        labels.push_back((mask >> i) & 1 ? Label::Yes : Label::No);
                      const auto m = dense_matrix(rows, MatrixMode::tf, &labels);
                      const auto model = nb_train({}, m, labels);
                      for (std::size_t i = 0; i < n; ++i) {
                        const auto post = nb_posterior(model, m.row(i));
                        const auto want =
                            imtest::nb_multinomial_posterior_oracle(rows, labels, 1.0, rows[i]);
                        check.require(std::abs(post[0] - want[0]) <= 1e-12 &&
                                          std::abs(post[1] - want[1]) <= 1e-12,
                                      "posterior mismatch beyond 1e-12");
                        check.require(std::abs(post[0] + post[1] - 1.0) <= 1e-12,
                                      "posteriors do not sum to 1");
                        ++cases;
                      }
                    }
                  }
                }
              }
              check.require(cases > 10000, "exhaustive sweep too small");
            });

  // 3. DT split oracle ---------------------------------------------------------
  criterion(3, "decision-tree splits match exhaustive midpoint enumeration (100 datasets)", 10.0,
            [](Checker& check) {
              std::mt19937 rng(77);
              int checked = 0;
              while (checked < 100) {
                const std::size_t n = 2 + rng() % 29;
                std::vector<double> values(n);
                std::vector<std::vector<double>> rows(n, std::vector<double>(1, 0.0));
                std::vector<Label> labels;
                bool has_yes = false, has_no = false;
                for (std::size_t i = 0; i < n; ++i) {
                  values[i] = static_cast<double>(rng() % 12) / 2.0;
                  rows[i][0] = values[i];
                  const bool y = rng() % 2;
                  labels.push_back(y ? Label::Yes : Label::No);
                  (y ? has_yes : has_no) = true;
                }
                if (!has_yes || !has_no) continue;
                ++checked;

                const auto m = dense_matrix(rows, MatrixMode::tf, &labels);
                const auto model = dt_train({}, m, labels);
                const auto oracle = imtest::dt_split_oracle(values, labels);
                if (!oracle.found) {
                  check.require(model.nodes[0].feature == -1, "split found where oracle found none");
                } else {
                  check.require(model.nodes[0].feature == 0 &&
                                    model.nodes[0].threshold == oracle.threshold,
                                "chosen threshold differs from exhaustive enumeration");
                  const auto& left = model.nodes[static_cast<std::size_t>(model.nodes[0].left)];
                  const auto& right = model.nodes[static_cast<std::size_t>(model.nodes[0].right)];
                  const double gain =
                      model.nodes[0].impurity - (left.n_docs * left.impurity +
                                                 right.n_docs * right.impurity) /
                                                    model.nodes[0].n_docs;
                  check.require(std::abs(gain - oracle.gain) <= 1e-12,
                                "gain differs from exhaustive enumeration");
                }

                // structural invariants on the whole tree
                std::function<void(std::int32_t)> walk = [&](std::int32_t at) {
                  const auto& node = model.nodes[static_cast<std::size_t>(at)];
                  if (node.feature < 0) return;
                  check.require(node.n_docs >= model.params.min_node_size,
                                "internal node below min_node_size");
                  const auto& l = model.nodes[static_cast<std::size_t>(node.left)];
                  const auto& r = model.nodes[static_cast<std::size_t>(node.right)];
                  const double weighted =
                      (l.n_docs * l.impurity + r.n_docs * r.impurity) / node.n_docs;
                  check.require(weighted < node.impurity, "split does not reduce impurity");
                  walk(node.left);
                  walk(node.right);
                };
                walk(0);
              }
            });

  // 4. SVM dual check ----------------------------------------------------------
  criterion(4, "SMO reaches the dense reference dual optimum; XOR separates", 30.0,
            [](Checker& check) {
              std::mt19937 rng(4242);
              std::uniform_real_distribution<double> coord(-1.5, 1.5);
              SvmParams params;
              params.smo_tolerance = 1e-8;
              for (int iter = 0; iter < 50; ++iter) {
                const std::size_t n = 4 + rng() % 7;
                std::vector<std::vector<double>> rows(n, std::vector<double>(2, 0.0));
                std::vector<Label> labels;
                std::vector<double> y;
                for (std::size_t i = 0; i < n; ++i) {
                  rows[i][0] = coord(rng);
                  rows[i][1] = coord(rng);
                  labels.push_back(i % 2 ? Label::Yes : Label::No);
                  y.push_back(i % 2 ? 1.0 : -1.0);
                }
                const auto m = dense_matrix(rows, MatrixMode::tf, &labels);
                const auto model = svm_train(params, m, labels);

                std::vector<std::vector<double>> k(n, std::vector<double>(n, 0.0));
                for (std::size_t i = 0; i < n; ++i)
                  for (std::size_t j = 0; j < n; ++j)
                    k[i][j] = rbf_kernel(rows[i], rows[j], params.gamma);
                const auto reference = imtest::svm_reference_dual(k, y, params.c_penalty);
                check.require(reference.found, "reference solver found no KKT point");
                check.require(
                    std::abs(svm_dual_objective(model) - reference.objective) <= 1e-6,
                    "dual objective differs from the reference by more than 1e-6");

                std::vector<double> alpha(n, 0.0);
                for (std::size_t s = 0; s < model.n_sv(); ++s)
                  alpha[model.sv_rows[s]] = std::abs(model.sv_coef[s]);
                for (std::size_t i = 0; i < n; ++i) {
                  const double margin = y[i] * svm_decision(model, m.row(i));
                  double violation = 0.0;
                  if (alpha[i] <= 1e-8 * params.c_penalty) violation = 1.0 - margin;
                  else if (alpha[i] >= (1.0 - 1e-8) * params.c_penalty) violation = margin - 1.0;
                  else violation = std::abs(margin - 1.0);
                  check.require(violation <= params.smo_tolerance,
                                "KKT violation exceeds smo_tolerance");
                }
              }

              const auto xor_labels = imtest::yn("NYYN");
              const auto xm = dense_matrix({{0, 0}, {1, 0}, {0, 1}, {1, 1}},
                                           MatrixMode::binary, &xor_labels);
              const auto xor_model = svm_train({}, xm, xor_labels);
              for (std::size_t i = 0; i < 4; ++i)
                check.require(svm_predict(xor_model, xm.row(i)) == xor_labels[i],
                              "XOR training point misclassified");
            });

  // 5. ANN gradient check --------------------------------------------------------
  criterion(5, "backprop matches central finite differences (20 seeded 4-3-3-1 nets)", 5.0,
            [](Checker& check) {
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
                double worst = 0.0;
                for (std::size_t l = 0; l < analytic.w.size(); ++l) {
                  for (std::size_t kk = 0; kk < analytic.w[l].size(); ++kk) {
                    const double denom = std::max(
                        {std::abs(analytic.w[l][kk]), std::abs(numeric.w[l][kk]), 1e-4});
                    worst = std::max(worst,
                                     std::abs(analytic.w[l][kk] - numeric.w[l][kk]) / denom);
                  }
                  for (std::size_t kk = 0; kk < analytic.b[l].size(); ++kk) {
                    const double denom = std::max(
                        {std::abs(analytic.b[l][kk]), std::abs(numeric.b[l][kk]), 1e-4});
                    worst = std::max(worst,
                                     std::abs(analytic.b[l][kk] - numeric.b[l][kk]) / denom);
                  }
                }
                check.require(worst < 1e-4, "max relative gradient error " + std::to_string(worst));
              }
            });

  // 6. FFS exhaustive equivalence ---------------------------------------------
  criterion(6, "forward selection first pick equals the exhaustive singleton argmax", 60.0,
            [](Checker& check) {
              std::mt19937 rng(606);
              for (int iter = 0; iter < 20; ++iter) {
                const std::size_t n = 8 + 2 * (rng() % 5);
                const std::size_t d = 2 + rng() % 3;  // up to 4 candidates
                std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
                std::vector<Label> labels;
                for (std::size_t i = 0; i < n; ++i) {
                  labels.push_back(i % 2 ? Label::Yes : Label::No);
                  for (auto& v : rows[i]) v = rng() % 2;
                }
                const auto m = dense_matrix(rows, MatrixMode::binary, &labels);
                FeatureSubset pool;
                for (std::uint32_t j = 0; j < d; ++j) pool.indices.push_back(j);
                const ClassifierSpec spec = ClassifierSpec::dt();
                const auto [subset, trace] = forward_select(m, labels, spec, pool, d);

                double best_acc = -1.0;
                std::uint32_t best_f = 0;
                for (std::uint32_t f = 0; f < d; ++f) {
                  const std::vector<std::uint32_t> one = {f};
                  const double acc = loocv_accuracy(project(m, one), labels, spec);
                  if (acc > best_acc) {
                    best_acc = acc;
                    best_f = f;
                  }
                }
                check.require(!trace.steps.empty() && trace.steps[0].added_index == best_f,
                              "first greedy pick differs from exhaustive singleton argmax");
                check.require(trace.steps[0].loocv_accuracy == best_acc,
                              "first step accuracy differs from exhaustive recomputation");

                std::vector<std::uint32_t> prefix;
                for (const auto& step : trace.steps) {
                  prefix.push_back(step.added_index);
                  const double again = loocv_accuracy(project(m, prefix), labels, spec);
                  check.require(step.loocv_accuracy == again,
                                "trace accuracy differs from independent recomputation");
                }
              }
            });

  // 7. Metrics arithmetic ---------------------------------------------------------
  criterion(7, "confusion metrics arithmetic and pooled aggregation", 10.0, [](Checker& check) {
    const auto m = metrics_from_counts(8, 2, 1, 9);
    check.require(m.precision && *m.precision == 0.8, "precision != 0.8");
    check.require(m.recall && std::abs(*m.recall - 0.8889) <= 1e-4, "recall != 0.8889");
    check.require(m.f_measure && std::abs(*m.f_measure - 0.8421) <= 1e-4, "f != 0.8421");
    check.require(m.accuracy && *m.accuracy == 0.85, "accuracy != 0.85 exactly");

    SynthConfig cfg;
    cfg.n_docs = 200;
    cfg.n_yes = 120;
    cfg.n_fillers = 20;
    cfg.seed = 12;
    const auto corpus = preprocess(synth_corpus(cfg));
    const auto vocab = build_vocabulary(corpus, 1);
    const auto mm = vectorize(corpus, vocab, MatrixMode::binary);
    const auto labels = require_labels(mm);
    const auto plan = kfold_split_stratified(labels, 10, 3);
    const auto report = cross_validate(ClassifierSpec::dt(), mm, labels, plan);
    check_pooled_counts(check, report);
    const double agg = static_cast<double>(report.aggregate.tp + report.aggregate.tn) /
                       static_cast<double>(labels.size());
    check.require(report.aggregate.accuracy && *report.aggregate.accuracy == agg,
                  "aggregate accuracy is not (sum tp + sum tn) / n");
  });

  // 8. Paper-shape end-to-end -----------------------------------------------------
  criterion(
      8, "scheme 1 on the 5896-doc synthetic corpus: >=90% cut, signals kept, acc >= 0.80",
      600.0, [&](Checker& check) {
        SynthConfig cfg;  // 5896 docs, 3452/2444, 10% label noise
        write_jsonl(synth_corpus(cfg), corpus_path.string());

        const std::vector<std::pair<ClassifierKind, ClassifierSpec>> specs = {
            {ClassifierKind::dt, ClassifierSpec::dt()},
            {ClassifierKind::nb, ClassifierSpec::nb()},
            {ClassifierKind::svm, ClassifierSpec::svm()},
            {ClassifierKind::ann, ClassifierSpec::ann({0.1, 5}, 1)}};

        bool shape_checked = false;
        for (const auto& [kind, spec] : specs) {
          PipelineConfig config;
          config.corpus_path = corpus_path.string();
          config.output_dir = (work / ("s1_" + std::string(to_string(kind)))).string();
          config.scheme = Scheme::one;
          config.final_spec = spec;
          config.cv_k = 10;
          config.seed = 42;
          const auto result = run_pipeline(config);

          if (!shape_checked) {
            shape_checked = true;
            check.require(result.n_yes == 3452 && result.n_no == 2444,
                          "class split is not 3452/2444");
            const double cut = 1.0 - static_cast<double>(result.selected.indices.size()) /
                                         static_cast<double>(result.vocab_size);
            check.require(cut >= 0.90, "IG>0 cut below 90%: " + std::to_string(cut));

            // every planted signal term that reached the vocabulary survives
            const auto corpus = preprocess(ingest_jsonl(corpus_path.string()));
            const auto vocab = build_vocabulary(corpus, 1);
            std::size_t signal_in_vocab = 0, signal_selected = 0;
            for (const char* term :
                 {"wish", "want", "need", "look", "request", "like", "desire"}) {
              const auto idx = vocab.lookup(term);
              if (idx < 0) continue;
              ++signal_in_vocab;
              for (const auto sel : result.selected.indices)
                if (sel == static_cast<std::uint32_t>(idx)) {
                  ++signal_selected;
                  break;
                }
            }
            check.require(signal_in_vocab == 7, "planted signal terms missing from vocabulary");
            check.require(signal_selected == signal_in_vocab,
                          "a planted signal term did not survive the IG cut");
          }

          check_pooled_counts(check, result.report);
          const double acc = result.report.aggregate.accuracy.value_or(0.0);
          scheme1_accuracy[kind] = acc;
          check.require(acc >= 0.80, std::string(to_string(kind)) + " accuracy " +
                                         std::to_string(acc) + " below 0.80");
        }
      });

  // 9. Paper-shape hybrid ----------------------------------------------------------
  criterion(9, "scheme 2 returns <= 15 features with accuracy within 3 points of scheme 1",
            1800.0, [&](Checker& check) {
              PipelineConfig config;
              config.corpus_path = corpus_path.string();
              config.output_dir = (work / "s2_nb_dt").string();
              config.scheme = Scheme::two;
              config.wrapper_spec = ClassifierSpec::nb();
              config.final_spec = ClassifierSpec::dt();
              config.ffs_budget = 20;
              config.cv_k = 10;
              config.seed = 42;
              const auto result = run_pipeline(config);

              check.require(result.trace.has_value(), "no selection trace recorded");
              check.require(result.selected.indices.size() <= 15,
                            "hybrid selection kept more than 15 features");
              const double acc = result.report.aggregate.accuracy.value_or(0.0);
              const double s1 = scheme1_accuracy[ClassifierKind::dt];
              check.require(std::abs(acc - s1) <= 0.03,
                            "hybrid accuracy " + std::to_string(acc) +
                                " differs from scheme 1 (" + std::to_string(s1) +
                                ") by more than 3 points");
            });

  // 10. Determinism ---------------------------------------------------------------
  criterion(10, "identical config and seed reproduce byte-identical reports", 600.0,
            [&](Checker& check) {
              PipelineConfig config;
              config.corpus_path = corpus_path.string();
              config.output_dir = (work / "det").string();
              config.scheme = Scheme::two;
              config.wrapper_spec = ClassifierSpec::nb();
              config.final_spec = ClassifierSpec::dt();
              config.cv_k = 10;
              config.seed = 42;
              run_pipeline(config);
              const auto first = snapshot(work / "det");
              check.require(!first.empty(), "no reports written");
              run_pipeline(config);
              const auto second = snapshot(work / "det");
              check.require(first == second, "reports differ between identical reruns");
            });

  fs::remove_all(work);
  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  }
  return g_failures;
}
