#ifndef VOCNMT_VOCAB_HPP
#define VOCNMT_VOCAB_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "vocnmt/corpus.hpp"
#include "vocnmt/lexicon.hpp"
#include "vocnmt/phrase.hpp"

namespace vocnmt {

// Which candidate sets contributed an id.
enum ProvenanceTag : std::uint8_t {
  kFromDict = 1,      // V_x^D
  kFromPhrase = 2,    // V_x^P
  kFromCommon = 4,    // V_x^T
  kFromReference = 8  // V_x^R
};

// Restricted output vocabulary: sorted global target ids plus the inverse
// global -> local index map. Reserved ids are always members.
struct SentenceVocab {
  std::vector<WordId> global_ids;  // strictly increasing
  std::unordered_map<WordId, int> local_of_global;
  std::vector<std::uint8_t> provenance;  // parallel to global_ids

  int local(WordId global_id) const {
    auto it = local_of_global.find(global_id);
    return it == local_of_global.end() ? -1 : it->second;
  }
  bool contains(WordId global_id) const {
    return local_of_global.count(global_id) > 0;
  }
  std::size_t size() const { return global_ids.size(); }
};

struct BatchVocab : SentenceVocab {
  std::vector<std::int64_t> member_sentence_ids;
};

// Ingredient selection for vocabulary assembly; defaults follow the main run
// settings (dictionary/phrase top 10, common-word sets supplied by caller).
struct VocabBuilderConfig {
  const WordDictionary* dict = nullptr;
  const PhraseSetTable* phrases = nullptr;
  const IdSet* common = nullptr;  // T(n), already including reserved ids
  std::size_t top_n_dict = 10;
  std::size_t top_k_phrase = 10;
  bool use_dict = true;
  bool use_phrases = true;
};

// Training: V_x = V_x^D u V_x^P u V_x^T u V_x^R plus reserved ids.
SentenceVocab build_train_vocab(const IdSequence& x, const IdSequence& y,
                                const VocabBuilderConfig& config);

// Decoding: same union without the reference term.
SentenceVocab build_decode_vocab(const IdSequence& x,
                                 const VocabBuilderConfig& config);

BatchVocab build_batch_vocab(const std::vector<const SentenceVocab*>& vocabs);

struct CoverageReport {
  double word_level_ratio = 0.0;
  double full_sentence_ratio = 0.0;
  double avg_sentence_vocab = 0.0;
  double avg_batch_vocab = 0.0;
  double avg_reference_vocab = 0.0;
};

enum class CoverageMode { kTrain, kDecode };

// Word-level ratio = covered reference tokens / total reference tokens;
// batches for avg_batch_vocab are consecutive chunks of batch_size pairs.
CoverageReport coverage_stats(const std::vector<SentencePair>& pairs,
                              const VocabBuilderConfig& config,
                              CoverageMode mode, std::size_t batch_size = 80);

std::string format_coverage_report(const CoverageReport& report);

}  // namespace vocnmt

#endif
