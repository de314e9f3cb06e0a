#include "vocnmt/phrase.hpp"

#include <algorithm>

#include "vocnmt/util.hpp"

namespace vocnmt {

void PhraseSetTable::add(const IdSequence& phrase, const TargetSet& words,
                         std::int64_t count) {
  auto& list = entries_[phrase];
  TargetSet sorted = words;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto it = std::find_if(list.begin(), list.end(), [&](const auto& cand) {
    return cand.words == sorted;
  });
  if (it != list.end())
    it->count += count;
  else
    list.push_back({std::move(sorted), count});
  for (std::size_t len = 1; len <= phrase.size(); ++len)
    prefixes_.insert(IdSequence(phrase.begin(), phrase.begin() + len));
}

void PhraseSetTable::finalize() {
  for (auto& [phrase, list] : entries_) {
    std::sort(list.begin(), list.end(),
              [](const PhraseCandidate& a, const PhraseCandidate& b) {
                if (a.count != b.count) return a.count > b.count;
                return a.words < b.words;
              });
  }
}

PhraseSetTable extract_phrases(const std::vector<SentencePair>& pairs,
                               const std::vector<AlignmentLinks>& alignments,
                               int max_src_len, int max_tgt_len) {
  if (pairs.size() != alignments.size())
    fail("pair count ", pairs.size(), " != alignment count ",
         alignments.size());
  PhraseSetTable table(max_src_len, max_tgt_len);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& pair = pairs[p];
    const auto& links = alignments[p];
    int l = static_cast<int>(pair.source.size());
    int m = static_cast<int>(pair.target.size());
    for (const auto& [i, j] : links) {
      if (i < 0 || i >= l || j < 0 || j >= m)
        fail("alignment link (", i, ",", j, ") out of range for pair ",
             pair.pair_id, " (", l, "x", m, ")");
    }
    std::vector<bool> tgt_aligned(m, false);
    for (const auto& [i, j] : links) tgt_aligned[j] = true;

    for (int i1 = 0; i1 < l; ++i1) {
      for (int i2 = i1; i2 < std::min(l, i1 + max_src_len); ++i2) {
        int j1 = m, j2 = -1;
        for (const auto& [i, j] : links) {
          if (i >= i1 && i <= i2) {
            j1 = std::min(j1, j);
            j2 = std::max(j2, j);
          }
        }
        if (j2 < 0) continue;  // at least one link required
        bool consistent = true;
        for (const auto& [i, j] : links) {
          if (j >= j1 && j <= j2 && (i < i1 || i > i2)) {
            consistent = false;
            break;
          }
        }
        if (!consistent) continue;
        IdSequence phrase(pair.source.begin() + i1,
                          pair.source.begin() + i2 + 1);
        // expand over unaligned boundary target words
        for (int js = j1; js >= 0 && (js == j1 || !tgt_aligned[js]); --js) {
          for (int je = j2; je < m && (je == j2 || !tgt_aligned[je]); ++je) {
            if (je - js + 1 > max_tgt_len) break;
            TargetSet words(pair.target.begin() + js,
                            pair.target.begin() + je + 1);
            table.add(phrase, words, 1);
          }
        }
      }
    }
  }
  table.finalize();
  return table;
}

std::vector<SpanMatch> match_subsequences(const IdSequence& x,
                                          const PhraseSetTable& table) {
  std::vector<SpanMatch> matches;
  std::size_t max_len = static_cast<std::size_t>(table.max_src_len());
  IdSequence span;
  for (std::size_t begin = 0; begin < x.size(); ++begin) {
    span.clear();
    for (std::size_t end = begin + 1;
         end <= x.size() && end - begin <= max_len; ++end) {
      span.push_back(x[end - 1]);
      if (!table.has_prefix(span)) break;  // no stored phrase continues here
      if (const auto* cands = table.lookup(span))
        matches.push_back({begin, end, cands});
    }
  }
  return matches;
}

IdSet sentence_phrase_vocab(const PhraseSetTable& table, const IdSequence& x,
                            std::size_t top_k) {
  IdSet vocab;
  for (const auto& match : match_subsequences(x, table)) {
    std::size_t limit = std::min(top_k, match.candidates->size());
    for (std::size_t k = 0; k < limit; ++k)
      for (WordId id : (*match.candidates)[k].words) vocab.insert(id);
  }
  return vocab;
}

}  // namespace vocnmt
