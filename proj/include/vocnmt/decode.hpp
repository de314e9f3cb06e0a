#ifndef VOCNMT_DECODE_HPP
#define VOCNMT_DECODE_HPP

#include <string>
#include <vector>

#include "vocnmt/lexicon.hpp"
#include "vocnmt/nmt.hpp"
#include "vocnmt/vocab.hpp"

namespace vocnmt {

struct Hypothesis {
  IdSequence tokens;  // emitted ids, EOS excluded
  double score = 0.0; // accumulated log-probability
  VectorXd state;
  std::vector<VectorXd> attn_trace;  // one alpha per emitted token
  bool completed = false;  // false only for best-partial fallbacks
};

struct DecodeSearchConfig {
  int beam = 12;
  int max_len = 100;
  bool length_norm = false;
};

// Standard beam search over the restricted distribution. Hypotheses ending
// in EOS move to the completed pool; search stops once the pool holds `beam`
// entries or max_len is reached. If nothing completed, the best partial is
// returned flagged.
std::vector<Hypothesis> beam_search(const Model& model, const IdSequence& x,
                                    const SentenceVocab& vocab,
                                    const DecodeSearchConfig& config);

// For each emitted UNK, take the attention argmax source position; emit the
// dictionary's top candidate for that word, or copy the source surface form.
Tokens unk_replace(const Hypothesis& hyp, const IdSequence& x,
                   const WordDictionary& dict, const Vocabulary& src_vocab,
                   const Vocabulary& tgt_vocab);

// Corpus-level case-sensitive BLEU-4 with brevity penalty, multi-bleu
// conventions: clipped counts aggregated over the corpus, score in [0,100],
// zero if any n-gram precision is zero (unless plus_one smoothing is on,
// which adds one to numerator and denominator for n >= 2).
double bleu4(const std::vector<Tokens>& candidates,
             const std::vector<Tokens>& references, bool plus_one = false);

}  // namespace vocnmt

#endif
