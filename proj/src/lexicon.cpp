#include "vocnmt/lexicon.hpp"

#include <algorithm>

namespace vocnmt {

WordDictionary extract_dictionary(const TTable& ttable,
                                  std::size_t max_candidates, double min_prob) {
  WordDictionary dict;
  dict.max_candidates = max_candidates;
  for (const auto& [src, row] : ttable.probs) {
    if (src == kNullSourceId || src < kNumReserved) continue;
    std::vector<std::pair<WordId, double>> list;
    for (const auto& [tgt, p] : row) {
      if (tgt < kNumReserved || p < min_prob) continue;
      list.emplace_back(tgt, p);
    }
    if (list.empty()) continue;
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (list.size() > max_candidates) list.resize(max_candidates);
    dict.entries.emplace(src, std::move(list));
  }
  return dict;
}

IdSet sentence_dict_vocab(const WordDictionary& dict, const IdSequence& x,
                          std::size_t top_n) {
  IdSet vocab;
  for (WordId src : x) {
    const auto* list = dict.candidates(src);
    if (!list) continue;
    std::size_t limit = std::min(top_n, list->size());
    for (std::size_t k = 0; k < limit; ++k) vocab.insert((*list)[k].first);
  }
  return vocab;
}

}  // namespace vocnmt
