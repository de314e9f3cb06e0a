#ifndef VOCNMT_PHRASE_HPP
#define VOCNMT_PHRASE_HPP

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vocnmt/align.hpp"
#include "vocnmt/corpus.hpp"

namespace vocnmt {

// Target word-id set of an extracted phrase pair, kept sorted.
using TargetSet = std::vector<WordId>;

struct PhraseCandidate {
  TargetSet words;
  std::int64_t count = 0;
};

struct IdSeqHash {
  std::size_t operator()(const IdSequence& seq) const {
    std::size_t h = 14695981039346656037ull;
    for (WordId id : seq) {
      h ^= static_cast<std::size_t>(id) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Source phrase -> ranked target word sets, by descending extraction count.
// Prefixes of stored phrases are indexed so sentence matching can stop
// extending a span as soon as no stored phrase continues it.
class PhraseSetTable {
 public:
  PhraseSetTable(int max_src_len = 4, int max_tgt_len = 4)
      : max_src_len_(max_src_len), max_tgt_len_(max_tgt_len) {}

  int max_src_len() const { return max_src_len_; }
  int max_tgt_len() const { return max_tgt_len_; }
  std::size_t size() const { return entries_.size(); }

  const std::vector<PhraseCandidate>* lookup(const IdSequence& phrase) const {
    auto it = entries_.find(phrase);
    return it == entries_.end() ? nullptr : &it->second;
  }
  bool has_prefix(const IdSequence& prefix) const {
    return prefixes_.count(prefix) > 0;
  }

  void add(const IdSequence& phrase, const TargetSet& words,
           std::int64_t count);
  // Sorts candidate lists: count desc, then lexicographically smallest set.
  void finalize();

  const std::unordered_map<IdSequence, std::vector<PhraseCandidate>, IdSeqHash>&
  entries() const {
    return entries_;
  }

 private:
  int max_src_len_;
  int max_tgt_len_;
  std::unordered_map<IdSequence, std::vector<PhraseCandidate>, IdSeqHash>
      entries_;
  std::unordered_set<IdSequence, IdSeqHash> prefixes_;
};

// All phrase pairs consistent with the alignments (>= one link inside, none
// crossing), with unaligned target boundary expansion, spans bounded by
// max_src_len/max_tgt_len. Target spans collapse to word-id sets.
PhraseSetTable extract_phrases(const std::vector<SentencePair>& pairs,
                               const std::vector<AlignmentLinks>& alignments,
                               int max_src_len, int max_tgt_len);

struct SpanMatch {
  std::size_t begin = 0;  // [begin, end) in the source sentence
  std::size_t end = 0;
  const std::vector<PhraseCandidate>* candidates = nullptr;
};

// Every consecutive span of x (length <= max_src_len) found in the table.
std::vector<SpanMatch> match_subsequences(const IdSequence& x,
                                          const PhraseSetTable& table);

// V_x^P: union of each matched span's top_k candidate word sets.
IdSet sentence_phrase_vocab(const PhraseSetTable& table, const IdSequence& x,
                            std::size_t top_k);

}  // namespace vocnmt

#endif
