#ifndef VOCNMT_LEXICON_HPP
#define VOCNMT_LEXICON_HPP

#include <unordered_map>
#include <utility>
#include <vector>

#include "vocnmt/align.hpp"
#include "vocnmt/corpus.hpp"

namespace vocnmt {

// Word-to-word dictionary D(x): per source word, candidate target words
// sorted by descending probability, ties by ascending target id.
struct WordDictionary {
  std::unordered_map<WordId, std::vector<std::pair<WordId, double>>> entries;
  std::size_t max_candidates = 50;

  const std::vector<std::pair<WordId, double>>* candidates(WordId source) const {
    auto it = entries.find(source);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// Reserved ids are excluded on both sides; NULL-conditioned entries dropped.
WordDictionary extract_dictionary(const TTable& ttable,
                                  std::size_t max_candidates, double min_prob);

// V_x^D: union over source positions of each word's top_n candidates.
IdSet sentence_dict_vocab(const WordDictionary& dict, const IdSequence& x,
                          std::size_t top_n);

}  // namespace vocnmt

#endif
