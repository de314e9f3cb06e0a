#include "vocnmt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace vocnmt {

namespace {

SentenceVocab first_n_vocab(int n) {
  SentenceVocab vocab;
  vocab.global_ids.reserve(n);
  for (WordId id = 0; id < n; ++id) {
    vocab.local_of_global.emplace(id, id);
    vocab.global_ids.push_back(id);
  }
  vocab.provenance.assign(n, 0);
  return vocab;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::vector<OutputLayerTiming> bench_output_layer(
    const Model& model, const std::vector<std::size_t>& restricted_sizes,
    int steps_per_run, int runs) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist(0.0, 1.0);
  VectorXd s(model.cfg.d_s), c(2 * model.cfg.d_h);
  for (auto& v : s) v = dist(rng);
  for (auto& v : c) v = dist(rng);

  std::vector<OutputLayerTiming> timings;
  for (std::size_t size : restricted_sizes) {
    SentenceVocab vocab;
    const SentenceVocab* restricted = nullptr;
    if (size > 0) {
      vocab = first_n_vocab(static_cast<int>(
          std::min<std::size_t>(size, model.cfg.tgt_vocab_size)));
      restricted = &vocab;
    }
    static volatile double sink = 0.0;  // keep the computation alive
    std::vector<double> samples;
    for (int run = 0; run <= runs; ++run) {  // run 0 is warmup
      double start = now_seconds();
      for (int step = 0; step < steps_per_run; ++step) {
        VectorXd p = output_distribution(model, s, kBosId, c, restricted);
        sink = sink + p[0];
      }
      if (run > 0)
        samples.push_back((now_seconds() - start) / steps_per_run);
    }
    std::sort(samples.begin(), samples.end());
    OutputLayerTiming t;
    t.restricted_size = size;
    t.seconds_per_step = samples[samples.size() / 2];
    timings.push_back(t);
  }
  return timings;
}

double bench_training_epoch(const Model& model,
                            const std::vector<SentencePair>& pairs,
                            const VocabBuilderConfig& vocab_config,
                            const TrainConfig& config,
                            std::size_t force_vocab_size) {
  Model copy = model;
  TrainConfig cfg = config;
  cfg.epochs = 1;
  cfg.force_batch_vocab_size = force_vocab_size;
  double start = now_seconds();
  train(copy, pairs, vocab_config, cfg);
  return now_seconds() - start;
}

}  // namespace vocnmt
