#ifndef VOCNMT_ALIGN_HPP
#define VOCNMT_ALIGN_HPP

#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vocnmt/corpus.hpp"

namespace vocnmt {

// Conditioning-side NULL token for unexplained target words.
constexpr WordId kNullSourceId = -1;

enum class AlignDirection { kSrcToTgt, kTgtToSrc };

// Probability floor used for pairs never seen in training.
constexpr double kTTableFloor = 1e-12;

// t(target | source) from Model-1 EM. Rows are normalized distributions.
struct TTable {
  std::unordered_map<WordId, std::unordered_map<WordId, double>> probs;
  AlignDirection direction = AlignDirection::kSrcToTgt;

  double prob(WordId source, WordId target) const {
    auto row = probs.find(source);
    if (row == probs.end()) return kTTableFloor;
    auto it = row->second.find(target);
    return it == row->second.end() ? kTTableFloor : it->second;
  }
};

// (source position, target position), 0-based, set semantics.
using AlignmentLinks = std::set<std::pair<int, int>>;

struct Model1Result {
  TTable ttable;
  std::vector<double> log_likelihood;  // one entry per EM iteration
};

// IBM Model 1 EM with uniform initialization over co-occurring pairs and a
// NULL token on the conditioning side. direction kTgtToSrc swaps the roles of
// the pair's sides before training.
Model1Result train_model1(const std::vector<SentencePair>& pairs,
                          int iterations, AlignDirection direction);

// Each target position links to the argmax source position (or NULL, which is
// omitted); ties go to the smallest source position.
AlignmentLinks viterbi_align(const TTable& ttable, const SentencePair& pair);

// Standard symmetrization: intersection, 8-neighborhood grow to fixpoint,
// then final-and. rev must already be in (source, target) coordinates.
AlignmentLinks grow_diag_final_and(const AlignmentLinks& fwd,
                                   const AlignmentLinks& rev, int src_len,
                                   int tgt_len);

// Pharaoh format: one line per sentence, links as "i-j" separated by spaces.
std::string to_pharaoh(const AlignmentLinks& links);
AlignmentLinks from_pharaoh(const std::string& line);

}  // namespace vocnmt

#endif
