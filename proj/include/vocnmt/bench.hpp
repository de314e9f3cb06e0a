#ifndef VOCNMT_BENCH_HPP
#define VOCNMT_BENCH_HPP

#include <cstddef>
#include <vector>

#include "vocnmt/nmt.hpp"

namespace vocnmt {

struct OutputLayerTiming {
  std::size_t restricted_size = 0;  // 0 means the full vocabulary
  double seconds_per_step = 0.0;    // median over runs, after one warmup
};

// Times output_distribution alone for each restriction size (ids 0..n-1)
// and for the full vocabulary (size 0 in the input sweep).
std::vector<OutputLayerTiming> bench_output_layer(
    const Model& model, const std::vector<std::size_t>& restricted_sizes,
    int steps_per_run = 200, int runs = 5);

// Wall time of one training epoch with the batch vocabulary padded to
// force_vocab_size (0 leaves it as built). The model is copied, so repeated
// calls time the same starting point.
double bench_training_epoch(const Model& model,
                            const std::vector<SentencePair>& pairs,
                            const VocabBuilderConfig& vocab_config,
                            const TrainConfig& config,
                            std::size_t force_vocab_size);

}  // namespace vocnmt

#endif
