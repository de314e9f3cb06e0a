#ifndef VOCNMT_CORPUS_HPP
#define VOCNMT_CORPUS_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace vocnmt {

using WordId = std::int32_t;
using Tokens = std::vector<std::string>;
using IdSequence = std::vector<WordId>;
using IdSet = std::unordered_set<WordId>;

// Reserved ids, never taken from the corpus.
constexpr WordId kUnkId = 0;
constexpr WordId kBosId = 1;
constexpr WordId kEosId = 2;
constexpr WordId kPadId = 3;
constexpr WordId kNumReserved = 4;

extern const char* const kReservedSurface[kNumReserved];  // <unk> <s> </s> <pad>

// Token <-> id map. Ids 0..3 are reserved; 4..N sorted by descending corpus
// frequency, ties broken by first occurrence.
class Vocabulary {
 public:
  Vocabulary();

  WordId id_of(const std::string& token) const;  // unknown -> kUnkId
  const std::string& token_of(WordId id) const;
  std::int64_t frequency(WordId id) const;
  std::size_t size() const { return tokens_.size(); }

  IdSequence encode(const Tokens& sentence) const;
  Tokens decode(const IdSequence& ids) const;

  // Appends a non-reserved token with the given corpus count. Tokens must be
  // added in final id order.
  void push_token(const std::string& token, std::int64_t count);

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);
  std::uint64_t content_hash() const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> frequency_;
  std::unordered_map<std::string, WordId> index_;
};

struct SentencePair {
  IdSequence source;
  IdSequence target;
  std::int64_t pair_id = 0;
};

struct RawPair {
  Tokens source;
  Tokens target;
};

struct RawParallel {
  std::vector<RawPair> pairs;
  std::size_t dropped = 0;  // empty-side or over-length pairs removed
};

// One whitespace-tokenized sentence per line; both files must have the same
// line count. Pairs with an empty side or a side longer than max_len are
// dropped and counted.
RawParallel load_parallel(const std::string& src_path,
                          const std::string& tgt_path, std::size_t max_len);

std::vector<SentencePair> encode_pairs(const std::vector<RawPair>& raw,
                                       const Vocabulary& src_vocab,
                                       const Vocabulary& tgt_vocab);

// max_size caps the total vocabulary including the four reserved entries.
Vocabulary build_vocabulary(const std::vector<Tokens>& sentences,
                            std::size_t max_size);

// T(n): ids of the n most frequent words plus the reserved ids.
IdSet top_common_words(const Vocabulary& vocab, std::size_t n);

// Shuffled mini-batches of pair indexes; same seed gives the same order.
std::vector<std::vector<std::size_t>> make_batches(std::size_t num_pairs,
                                                   std::size_t batch_size,
                                                   std::uint64_t epoch_seed);

}  // namespace vocnmt

#endif
