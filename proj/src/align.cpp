#include "vocnmt/align.hpp"

#include <cmath>
#include <sstream>

#include "vocnmt/util.hpp"

namespace vocnmt {

namespace {

// Training views a pair as (conditioning side, predicted side).
struct DirectedPair {
  const IdSequence* cond;
  const IdSequence* pred;
};

std::vector<DirectedPair> orient(const std::vector<SentencePair>& pairs,
                                 AlignDirection direction) {
  std::vector<DirectedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (direction == AlignDirection::kSrcToTgt)
      out.push_back({&p.source, &p.target});
    else
      out.push_back({&p.target, &p.source});
  }
  return out;
}

}  // namespace

Model1Result train_model1(const std::vector<SentencePair>& pairs,
                          int iterations, AlignDirection direction) {
  if (pairs.empty()) fail("Model 1 training requires a non-empty corpus");
  if (iterations < 1) fail("Model 1 requires at least one EM iteration");
  auto directed = orient(pairs, direction);

  // Uniform initialization over co-occurring pairs, per conditioning word.
  TTable table;
  table.direction = direction;
  for (const auto& dp : directed) {
    for (WordId y : *dp.pred) {
      table.probs[kNullSourceId][y] = 0.0;
      for (WordId x : *dp.cond) table.probs[x][y] = 0.0;
    }
  }
  for (auto& [x, row] : table.probs) {
    double uniform = 1.0 / static_cast<double>(row.size());
    for (auto& [y, p] : row) p = uniform;
  }

  Model1Result result;
  result.ttable = std::move(table);
  for (int iter = 0; iter < iterations; ++iter) {
    std::unordered_map<WordId, std::unordered_map<WordId, double>> counts;
    std::unordered_map<WordId, double> totals;
    double log_likelihood = 0.0;
    for (const auto& dp : directed) {
      double len_norm = 1.0 / static_cast<double>(dp.cond->size() + 1);
      for (WordId y : *dp.pred) {
        double denom = result.ttable.prob(kNullSourceId, y);
        for (WordId x : *dp.cond) denom += result.ttable.prob(x, y);
        log_likelihood += std::log(denom * len_norm);
        double inv = 1.0 / denom;
        double c_null = result.ttable.prob(kNullSourceId, y) * inv;
        counts[kNullSourceId][y] += c_null;
        totals[kNullSourceId] += c_null;
        for (WordId x : *dp.cond) {
          double c = result.ttable.prob(x, y) * inv;
          counts[x][y] += c;
          totals[x] += c;
        }
      }
    }
    result.log_likelihood.push_back(log_likelihood);
    for (auto& [x, row] : result.ttable.probs) {
      double total = totals[x];
      if (total <= 0.0) continue;
      for (auto& [y, p] : row) p = counts[x][y] / total;
    }
  }
  return result;
}

AlignmentLinks viterbi_align(const TTable& ttable, const SentencePair& pair) {
  const IdSequence* cond = &pair.source;
  const IdSequence* pred = &pair.target;
  bool transposed = ttable.direction == AlignDirection::kTgtToSrc;
  if (transposed) std::swap(cond, pred);

  AlignmentLinks links;
  for (int j = 0; j < static_cast<int>(pred->size()); ++j) {
    WordId y = (*pred)[j];
    double best = ttable.prob(kNullSourceId, y);
    int best_i = -1;
    for (int i = 0; i < static_cast<int>(cond->size()); ++i) {
      double p = ttable.prob((*cond)[i], y);
      if (p > best) {
        best = p;
        best_i = i;
      }
    }
    if (best_i < 0) continue;  // NULL link, omitted
    if (transposed)
      links.emplace(j, best_i);
    else
      links.emplace(best_i, j);
  }
  return links;
}

AlignmentLinks grow_diag_final_and(const AlignmentLinks& fwd,
                                   const AlignmentLinks& rev, int src_len,
                                   int tgt_len) {
  AlignmentLinks uni;
  AlignmentLinks result;
  for (const auto& link : fwd) uni.insert(link);
  for (const auto& link : rev) uni.insert(link);
  for (const auto& link : fwd)
    if (rev.count(link)) result.insert(link);

  std::vector<bool> src_aligned(src_len, false), tgt_aligned(tgt_len, false);
  auto mark = [&](const std::pair<int, int>& link) {
    src_aligned[link.first] = true;
    tgt_aligned[link.second] = true;
  };
  for (const auto& link : result) mark(link);

  // grow-diag: admit union links in the 8-neighborhood of the current set
  // while one endpoint is still unaligned; iterate to fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [i, j] : result) {
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          int ni = i + di, nj = j + dj;
          if (ni < 0 || ni >= src_len || nj < 0 || nj >= tgt_len) continue;
          std::pair<int, int> cand{ni, nj};
          if (!uni.count(cand) || result.count(cand)) continue;
          if (src_aligned[ni] && tgt_aligned[nj]) continue;
          result.insert(cand);
          mark(cand);
          changed = true;
        }
      }
      if (changed) break;  // iterator invalidated by insert
    }
  }

  // final-and: both endpoints must be unaligned.
  for (const auto& [i, j] : uni) {
    if (!src_aligned[i] && !tgt_aligned[j]) {
      result.emplace(i, j);
      src_aligned[i] = true;
      tgt_aligned[j] = true;
    }
  }
  return result;
}

std::string to_pharaoh(const AlignmentLinks& links) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, j] : links) {
    if (!first) os << ' ';
    os << i << '-' << j;
    first = false;
  }
  return os.str();
}

AlignmentLinks from_pharaoh(const std::string& line) {
  AlignmentLinks links;
  std::istringstream is(line);
  std::string item;
  while (is >> item) {
    auto dash = item.find('-');
    if (dash == std::string::npos)
      fail("malformed alignment link '", item, "'");
    links.emplace(std::stoi(item.substr(0, dash)),
                  std::stoi(item.substr(dash + 1)));
  }
  return links;
}

}  // namespace vocnmt
