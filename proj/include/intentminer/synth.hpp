#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "intentminer/corpus.hpp"

namespace intentminer {

// Synthetic seed-phrase-planted corpus. Noise rate is the fraction of
// documents per class whose label contradicts the seed-presence rule.
// Filler words are placed in document counts exactly proportional to the
// class split, so their empirical information gain is exactly zero and the
// IG>0 filter keeps only the planted signal terms.
struct SynthConfig {
  std::size_t n_docs = 5896;
  std::size_t n_yes = 3452;
  double noise_rate = 0.10;
  std::size_t n_fillers = 200;
  double url_rate = 0.15;
  double hashtag_rate = 0.05;
  std::uint64_t seed = 42;

  void validate() const {
    if (n_docs < 2) throw std::invalid_argument("synth needs at least 2 documents");
    if (n_yes < 1 || n_yes >= n_docs)
      throw std::invalid_argument("synth needs both classes: 1 <= n_yes < n_docs");
    if (noise_rate < 0.0 || noise_rate > 0.5)
      throw std::invalid_argument("noise_rate must be in [0, 0.5]");
  }
};

namespace synth_detail {

inline std::string filler_word(std::size_t i) {
  static const char* onsets[] = {"br", "cl", "dr", "fl", "gr", "pl", "sk", "tr"};
  static const char* vowels[] = {"a", "e", "i", "o", "u", "ar", "ol", "un"};
  static const char* codas[] = {"b", "ck", "ld", "mp", "nd", "rt", "sk", "v"};
  std::string w = onsets[i % 8];
  i /= 8;
  w += vowels[i % 8];
  i /= 8;
  w += codas[i % 8];
  i /= 8;
  while (i > 0) {
    w += vowels[i % 8];
    i /= 8;
    w += codas[i % 8];
    i /= 8;
  }
  return w;
}

}  // namespace synth_detail

inline Corpus synth_corpus(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const std::size_t n = config.n_docs;
  const std::size_t n_no = n - config.n_yes;

  std::vector<Label> labels(n, Label::No);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(config.n_yes),
            Label::Yes);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<std::uint32_t> yes_ids, no_ids;
  for (std::uint32_t i = 0; i < n; ++i)
    (labels[i] == Label::Yes ? yes_ids : no_ids).push_back(i);

  // Noise: seedless Yes documents and seed-bearing No documents.
  const auto pick_noise = [&](std::vector<std::uint32_t> ids, std::size_t count) {
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(count);
    return ids;
  };
  const auto n_noise_yes =
      static_cast<std::size_t>(std::llround(config.noise_rate * static_cast<double>(config.n_yes)));
  const auto n_noise_no =
      static_cast<std::size_t>(std::llround(config.noise_rate * static_cast<double>(n_no)));
  std::vector<bool> bears_seed(n, false);
  for (const auto i : yes_ids) bears_seed[i] = true;
  for (const auto i : pick_noise(yes_ids, n_noise_yes)) bears_seed[i] = false;
  for (const auto i : pick_noise(no_ids, n_noise_no)) bears_seed[i] = true;

  // Fillers: exact class-proportional placement needs n | df * n_yes, so the
  // minimal document frequency is n / gcd(n_yes, n).
  const std::size_t unit = n / std::gcd(config.n_yes, n);
  const std::size_t df_yes = unit * config.n_yes / n;
  const std::size_t df_no = unit - df_yes;
  std::vector<std::vector<std::uint32_t>> doc_fillers(n);
  for (std::size_t f = 0; f < config.n_fillers; ++f) {
    auto ys = yes_ids;
    std::shuffle(ys.begin(), ys.end(), rng);
    for (std::size_t k = 0; k < df_yes; ++k) doc_fillers[ys[k]].push_back(static_cast<std::uint32_t>(f));
    auto ns = no_ids;
    std::shuffle(ns.begin(), ns.end(), rng);
    for (std::size_t k = 0; k < df_no; ++k) doc_fillers[ns[k]].push_back(static_cast<std::uint32_t>(f));
  }

  const auto seeds = SeedVector::defaults();
  static const char* openers[] = {"i", "we", "they", "you"};
  static const char* connectors[] = {"and", "so", "but", "now"};
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  Corpus corpus;
  corpus.docs.resize(n);
  char id_buf[16];
  for (std::size_t i = 0; i < n; ++i) {
    auto& doc = corpus.docs[i];
    std::snprintf(id_buf, sizeof(id_buf), "t%06zu", i + 1);
    doc.id = id_buf;
    doc.lang = "en";
    doc.label = labels[i];

    std::string body;
    const bool cap = coin(rng) < 0.5;
    const char* opener = openers[rng() % 4];
    body += cap && opener[0] == 'i' ? "I" : opener;
    if (bears_seed[i]) {
      body += ' ';
      body += seeds.phrases[rng() % seeds.phrases.size()];
    }
    auto& fills = doc_fillers[i];
    std::shuffle(fills.begin(), fills.end(), rng);
    for (std::size_t k = 0; k < fills.size(); ++k) {
      body += ' ';
      if (k == fills.size() / 2 && fills.size() > 3) {
        body += connectors[rng() % 4];
        body += ' ';
      }
      if (coin(rng) < config.hashtag_rate) body += '#';
      body += synth_detail::filler_word(fills[k]);
    }
    if (coin(rng) < 0.2) body += "!!";
    if (coin(rng) < config.url_rate) {
      body += " http://t.co/";
      for (int k = 0; k < 6; ++k) body += static_cast<char>('a' + rng() % 26);
    }
    doc.raw_text = std::move(body);
  }
  return corpus;
}

}  // namespace intentminer
