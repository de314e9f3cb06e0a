#include "vocnmt/synthetic.hpp"

#include <random>

#include "vocnmt/util.hpp"

namespace vocnmt {

std::vector<RawPair> make_ambiguous_corpus(const SyntheticConfig& config) {
  if (config.num_symbols < 2 || config.min_len < 1 ||
      config.max_len < config.min_len)
    fail("invalid synthetic corpus configuration");
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> len_dist(config.min_len, config.max_len);
  std::uniform_int_distribution<int> sym_dist(0, config.num_symbols - 1);

  std::vector<RawPair> pairs;
  pairs.reserve(config.sentences);
  for (std::size_t n = 0; n < config.sentences; ++n) {
    int len = len_dist(rng);
    RawPair pair;
    int prev = -1;
    for (int i = 0; i < len; ++i) {
      int sym = sym_dist(rng);
      bool variant_b = prev >= 0 && prev % 2 == 1;
      pair.source.push_back(strcat("s", sym));
      pair.target.push_back(strcat("t", sym, variant_b ? "b" : "a"));
      prev = sym;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

double token_accuracy(const std::vector<Tokens>& candidates,
                      const std::vector<Tokens>& references) {
  if (candidates.size() != references.size())
    fail("candidate count ", candidates.size(), " != reference count ",
         references.size());
  std::int64_t correct = 0, total = 0;
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    total += static_cast<std::int64_t>(references[s].size());
    std::size_t overlap =
        std::min(candidates[s].size(), references[s].size());
    for (std::size_t t = 0; t < overlap; ++t)
      if (candidates[s][t] == references[s][t]) ++correct;
  }
  return total == 0 ? 0.0
                    : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace vocnmt
