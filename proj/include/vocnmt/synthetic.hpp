#ifndef VOCNMT_SYNTHETIC_HPP
#define VOCNMT_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "vocnmt/corpus.hpp"

namespace vocnmt {

struct SyntheticConfig {
  int num_symbols = 20;     // source alphabet size
  int min_len = 3;
  int max_len = 8;
  std::size_t sentences = 500;
  std::uint64_t seed = 42;
};

// Ambiguous-translation corpus: every source symbol s<k> has two target
// translations t<k>a and t<k>b; the one used at position i depends on the
// parity of the preceding source symbol (t<k>a at sentence start or after an
// even symbol). The mapping is deterministic, so token accuracy of a decode
// against the rule is well defined.
std::vector<RawPair> make_ambiguous_corpus(const SyntheticConfig& config);

// Fraction of reference positions where the candidate token matches.
double token_accuracy(const std::vector<Tokens>& candidates,
                      const std::vector<Tokens>& references);

}  // namespace vocnmt

#endif
