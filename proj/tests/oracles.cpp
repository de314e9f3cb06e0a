#include "oracles.hpp"

#include <algorithm>

namespace vocnmt::testing {

std::map<IdSequence, std::map<TargetSet, std::int64_t>> brute_force_phrases(
    const SentencePair& pair, const AlignmentLinks& links, int max_src_len,
    int max_tgt_len) {
  std::map<IdSequence, std::map<TargetSet, std::int64_t>> out;
  int l = static_cast<int>(pair.source.size());
  int m = static_cast<int>(pair.target.size());
  for (int i1 = 0; i1 < l; ++i1) {
    for (int i2 = i1; i2 < l && i2 - i1 < max_src_len; ++i2) {
      for (int j1 = 0; j1 < m; ++j1) {
        for (int j2 = j1; j2 < m && j2 - j1 < max_tgt_len; ++j2) {
          bool has_inside = false;
          bool crossing = false;
          for (const auto& [i, j] : links) {
            bool in_src = i >= i1 && i <= i2;
            bool in_tgt = j >= j1 && j <= j2;
            if (in_src && in_tgt) has_inside = true;
            if (in_src != in_tgt) crossing = true;
          }
          if (!has_inside || crossing) continue;
          IdSequence phrase(pair.source.begin() + i1,
                            pair.source.begin() + i2 + 1);
          TargetSet words(pair.target.begin() + j1,
                          pair.target.begin() + j2 + 1);
          std::sort(words.begin(), words.end());
          words.erase(std::unique(words.begin(), words.end()), words.end());
          ++out[phrase][words];
        }
      }
    }
  }
  return out;
}

std::map<IdSequence, std::map<TargetSet, std::int64_t>>
brute_force_phrase_corpus(const std::vector<SentencePair>& pairs,
                          const std::vector<AlignmentLinks>& alignments,
                          int max_src_len, int max_tgt_len) {
  std::map<IdSequence, std::map<TargetSet, std::int64_t>> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto one = brute_force_phrases(pairs[p], alignments[p], max_src_len,
                                   max_tgt_len);
    for (const auto& [phrase, sets] : one)
      for (const auto& [words, count] : sets) out[phrase][words] += count;
  }
  return out;
}

CoverageReport brute_force_coverage(const std::vector<SentencePair>& pairs,
                                    const VocabBuilderConfig& config,
                                    CoverageMode mode,
                                    std::size_t batch_size) {
  CoverageReport report;
  if (pairs.empty()) return report;
  long covered = 0, total = 0, full = 0;
  double vx_sum = 0, vr_sum = 0, vb_sum = 0;
  std::size_t num_batches = 0;
  std::set<WordId> batch_union;
  std::size_t in_batch = 0;
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    const auto& pair = pairs[n];
    std::set<WordId> vx;
    for (WordId id = 0; id < kNumReserved; ++id) vx.insert(id);
    if (config.use_dict && config.dict)
      for (WordId id :
           sentence_dict_vocab(*config.dict, pair.source, config.top_n_dict))
        vx.insert(id);
    if (config.use_phrases && config.phrases)
      for (WordId id : sentence_phrase_vocab(*config.phrases, pair.source,
                                             config.top_k_phrase))
        vx.insert(id);
    if (config.common)
      for (WordId id : *config.common) vx.insert(id);
    if (mode == CoverageMode::kTrain)
      for (WordId id : pair.target) vx.insert(id);

    long sent_covered = 0;
    for (WordId y : pair.target)
      if (vx.count(y)) ++sent_covered;
    covered += sent_covered;
    total += static_cast<long>(pair.target.size());
    if (sent_covered == static_cast<long>(pair.target.size())) ++full;
    vx_sum += static_cast<double>(vx.size());
    vr_sum += static_cast<double>(
        std::set<WordId>(pair.target.begin(), pair.target.end()).size());
    for (WordId id : vx) batch_union.insert(id);
    ++in_batch;
    if (in_batch == batch_size || n + 1 == pairs.size()) {
      vb_sum += static_cast<double>(batch_union.size());
      ++num_batches;
      batch_union.clear();
      in_batch = 0;
    }
  }
  double np = static_cast<double>(pairs.size());
  report.word_level_ratio =
      total == 0 ? 0.0 : static_cast<double>(covered) / total;
  report.full_sentence_ratio = static_cast<double>(full) / np;
  report.avg_sentence_vocab = vx_sum / np;
  report.avg_batch_vocab = vb_sum / static_cast<double>(num_batches);
  report.avg_reference_vocab = vr_sum / np;
  return report;
}

AlignmentLinks random_links(std::mt19937_64& rng, int l, int m,
                            double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  AlignmentLinks links;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < m; ++j)
      if (coin(rng) < density) links.emplace(i, j);
  return links;
}

SentenceVocab vocab_of_ids(const std::vector<WordId>& ids) {
  std::set<WordId> all(ids.begin(), ids.end());
  for (WordId id = 0; id < kNumReserved; ++id) all.insert(id);
  SentenceVocab vocab;
  for (WordId id : all) {
    vocab.local_of_global.emplace(id,
                                  static_cast<int>(vocab.global_ids.size()));
    vocab.global_ids.push_back(id);
    vocab.provenance.push_back(0);
  }
  return vocab;
}

}  // namespace vocnmt::testing
