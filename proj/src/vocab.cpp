#include "vocnmt/vocab.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "vocnmt/util.hpp"

namespace vocnmt {

namespace {

SentenceVocab from_tagged(const std::map<WordId, std::uint8_t>& tagged) {
  SentenceVocab vocab;
  vocab.global_ids.reserve(tagged.size());
  vocab.provenance.reserve(tagged.size());
  for (const auto& [id, tag] : tagged) {
    vocab.local_of_global.emplace(
        id, static_cast<int>(vocab.global_ids.size()));
    vocab.global_ids.push_back(id);
    vocab.provenance.push_back(tag);
  }
  return vocab;
}

void collect_parts(const IdSequence& x, const VocabBuilderConfig& config,
                   std::map<WordId, std::uint8_t>& tagged) {
  for (WordId id = 0; id < kNumReserved; ++id) tagged[id];  // always present
  if (config.use_dict && config.dict) {
    for (WordId id : sentence_dict_vocab(*config.dict, x, config.top_n_dict))
      tagged[id] |= kFromDict;
  }
  if (config.use_phrases && config.phrases) {
    for (WordId id :
         sentence_phrase_vocab(*config.phrases, x, config.top_k_phrase))
      tagged[id] |= kFromPhrase;
  }
  if (config.common) {
    for (WordId id : *config.common) tagged[id] |= kFromCommon;
  }
}

}  // namespace

SentenceVocab build_train_vocab(const IdSequence& x, const IdSequence& y,
                                const VocabBuilderConfig& config) {
  if (y.empty()) fail("training vocabulary requires a non-empty reference");
  std::map<WordId, std::uint8_t> tagged;
  collect_parts(x, config, tagged);
  for (WordId id : y) tagged[id] |= kFromReference;
  return from_tagged(tagged);
}

SentenceVocab build_decode_vocab(const IdSequence& x,
                                 const VocabBuilderConfig& config) {
  std::map<WordId, std::uint8_t> tagged;
  collect_parts(x, config, tagged);
  return from_tagged(tagged);
}

BatchVocab build_batch_vocab(const std::vector<const SentenceVocab*>& vocabs) {
  if (vocabs.empty()) fail("batch vocabulary requires at least one sentence");
  std::map<WordId, std::uint8_t> tagged;
  for (const auto* vocab : vocabs) {
    for (std::size_t k = 0; k < vocab->global_ids.size(); ++k)
      tagged[vocab->global_ids[k]] |= vocab->provenance[k];
  }
  BatchVocab batch;
  static_cast<SentenceVocab&>(batch) = from_tagged(tagged);
  return batch;
}

CoverageReport coverage_stats(const std::vector<SentencePair>& pairs,
                              const VocabBuilderConfig& config,
                              CoverageMode mode, std::size_t batch_size) {
  CoverageReport report;
  if (pairs.empty()) return report;

  std::int64_t covered_tokens = 0, total_tokens = 0, full_sentences = 0;
  double sum_sentence_vocab = 0.0, sum_reference_vocab = 0.0;
  double sum_batch_vocab = 0.0;
  std::size_t num_batches = 0;
  std::vector<SentenceVocab> batch_members;

  for (std::size_t n = 0; n < pairs.size(); ++n) {
    const auto& pair = pairs[n];
    SentenceVocab vocab =
        mode == CoverageMode::kTrain
            ? build_train_vocab(pair.source, pair.target, config)
            : build_decode_vocab(pair.source, config);
    std::int64_t covered = 0;
    for (WordId y : pair.target)
      if (vocab.contains(y)) ++covered;
    covered_tokens += covered;
    total_tokens += static_cast<std::int64_t>(pair.target.size());
    if (covered == static_cast<std::int64_t>(pair.target.size()))
      ++full_sentences;
    sum_sentence_vocab += static_cast<double>(vocab.size());
    sum_reference_vocab += static_cast<double>(
        IdSet(pair.target.begin(), pair.target.end()).size());

    batch_members.push_back(std::move(vocab));
    if (batch_members.size() == batch_size || n + 1 == pairs.size()) {
      std::vector<const SentenceVocab*> ptrs;
      for (const auto& v : batch_members) ptrs.push_back(&v);
      sum_batch_vocab += static_cast<double>(build_batch_vocab(ptrs).size());
      ++num_batches;
      batch_members.clear();
    }
  }

  double n_pairs = static_cast<double>(pairs.size());
  report.word_level_ratio =
      total_tokens == 0 ? 0.0
                        : static_cast<double>(covered_tokens) /
                              static_cast<double>(total_tokens);
  report.full_sentence_ratio = static_cast<double>(full_sentences) / n_pairs;
  report.avg_sentence_vocab = sum_sentence_vocab / n_pairs;
  report.avg_batch_vocab =
      sum_batch_vocab / static_cast<double>(num_batches);
  report.avg_reference_vocab = sum_reference_vocab / n_pairs;
  return report;
}

std::string format_coverage_report(const CoverageReport& report) {
  std::ostringstream os;
  os << "word_level_ratio=" << report.word_level_ratio << '\n'
     << "full_sentence_ratio=" << report.full_sentence_ratio << '\n'
     << "avg_sentence_vocab=" << report.avg_sentence_vocab << '\n'
     << "avg_batch_vocab=" << report.avg_batch_vocab << '\n'
     << "avg_reference_vocab=" << report.avg_reference_vocab << '\n';
  return os.str();
}

}  // namespace vocnmt
