#include "vocnmt/decode.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vocnmt/util.hpp"

namespace vocnmt {

std::vector<Hypothesis> beam_search(const Model& model, const IdSequence& x,
                                    const SentenceVocab& vocab,
                                    const DecodeSearchConfig& config) {
  if (config.beam < 1) fail("beam width must be >= 1");
  Decoder decoder(model, x);

  struct Live {
    IdSequence tokens;
    double score = 0.0;
    VectorXd state;
    std::vector<VectorXd> attn_trace;
  };
  std::vector<Live> live(1);
  live[0].state = decoder.init_state();
  std::vector<Hypothesis> completed;

  for (int step = 0; step < config.max_len && !live.empty(); ++step) {
    struct Expansion {
      std::size_t parent;
      int local;
      double score;
    };
    std::vector<Expansion> expansions;
    std::vector<Decoder::Step> steps(live.size());
    for (std::size_t p = 0; p < live.size(); ++p) {
      WordId y_prev = live[p].tokens.empty() ? kBosId : live[p].tokens.back();
      steps[p] = decoder.step(live[p].state, y_prev, &vocab);
      for (int k = 0; k < steps[p].log_probs.size(); ++k)
        expansions.push_back({p, k, live[p].score + steps[p].log_probs[k]});
    }
    std::size_t keep = std::min(expansions.size(),
                                static_cast<std::size_t>(config.beam));
    std::partial_sort(expansions.begin(), expansions.begin() + keep,
                      expansions.end(),
                      [](const Expansion& a, const Expansion& b) {
                        return a.score > b.score;
                      });
    expansions.resize(keep);

    std::vector<Live> next;
    for (const auto& exp : expansions) {
      WordId id = vocab.global_ids[exp.local];
      const Live& parent = live[exp.parent];
      const Decoder::Step& st = steps[exp.parent];
      if (id == kEosId) {
        Hypothesis hyp;
        hyp.tokens = parent.tokens;
        hyp.score = exp.score;
        hyp.state = st.s;
        hyp.attn_trace = parent.attn_trace;
        hyp.completed = true;
        completed.push_back(std::move(hyp));
        continue;
      }
      Live child;
      child.tokens = parent.tokens;
      child.tokens.push_back(id);
      child.score = exp.score;
      child.state = st.s;
      child.attn_trace = parent.attn_trace;
      child.attn_trace.push_back(st.alpha);
      next.push_back(std::move(child));
    }
    live = std::move(next);
    if (completed.size() >= static_cast<std::size_t>(config.beam)) break;
  }

  if (completed.empty()) {
    // nothing reached EOS within max_len; return the best partial, flagged
    auto best = std::max_element(live.begin(), live.end(),
                                 [](const Live& a, const Live& b) {
                                   return a.score < b.score;
                                 });
    Hypothesis hyp;
    if (best != live.end()) {
      hyp.tokens = best->tokens;
      hyp.score = best->score;
      hyp.state = best->state;
      hyp.attn_trace = best->attn_trace;
    }
    hyp.completed = false;
    return {hyp};
  }

  auto rank = [&](const Hypothesis& h) {
    if (!config.length_norm) return h.score;
    return h.score / static_cast<double>(h.tokens.size() + 1);
  };
  std::sort(completed.begin(), completed.end(),
            [&](const Hypothesis& a, const Hypothesis& b) {
              return rank(a) > rank(b);
            });
  return completed;
}

Tokens unk_replace(const Hypothesis& hyp, const IdSequence& x,
                   const WordDictionary& dict, const Vocabulary& src_vocab,
                   const Vocabulary& tgt_vocab) {
  if (hyp.attn_trace.size() != hyp.tokens.size())
    fail("attention trace length ", hyp.attn_trace.size(),
         " != hypothesis length ", hyp.tokens.size());
  Tokens out;
  out.reserve(hyp.tokens.size());
  for (std::size_t t = 0; t < hyp.tokens.size(); ++t) {
    WordId id = hyp.tokens[t];
    if (id != kUnkId) {
      out.push_back(tgt_vocab.token_of(id));
      continue;
    }
    Eigen::Index i_star = 0;
    hyp.attn_trace[t].maxCoeff(&i_star);
    WordId src_id = x[static_cast<std::size_t>(i_star)];
    const auto* cands = dict.candidates(src_id);
    if (cands && !cands->empty())
      out.push_back(tgt_vocab.token_of((*cands)[0].first));
    else
      out.push_back(src_vocab.token_of(src_id));
  }
  return out;
}

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, int> ngram_counts(const Tokens& tokens, int n) {
  std::map<Ngram, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

}  // namespace

double bleu4(const std::vector<Tokens>& candidates,
             const std::vector<Tokens>& references, bool plus_one) {
  if (candidates.empty()) fail("BLEU requires at least one candidate");
  if (candidates.size() != references.size())
    fail("candidate count ", candidates.size(), " != reference count ",
         references.size());

  constexpr int kMaxOrder = 4;
  std::int64_t matched[kMaxOrder] = {0, 0, 0, 0};
  std::int64_t total[kMaxOrder] = {0, 0, 0, 0};
  std::int64_t cand_len = 0, ref_len = 0;
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    cand_len += static_cast<std::int64_t>(candidates[s].size());
    ref_len += static_cast<std::int64_t>(references[s].size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      auto cand = ngram_counts(candidates[s], n);
      auto ref = ngram_counts(references[s], n);
      for (const auto& [gram, count] : cand) {
        total[n - 1] += count;
        auto it = ref.find(gram);
        if (it != ref.end()) matched[n - 1] += std::min(count, it->second);
      }
    }
  }

  double log_precision = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    double num = static_cast<double>(matched[n]);
    double den = static_cast<double>(total[n]);
    if (plus_one && n >= 1) {
      num += 1.0;
      den += 1.0;
    }
    if (num <= 0.0 || den <= 0.0) return 0.0;
    log_precision += std::log(num / den);
  }
  double brevity =
      cand_len < ref_len
          ? std::exp(1.0 - static_cast<double>(ref_len) /
                               static_cast<double>(cand_len))
          : 1.0;
  return 100.0 * brevity * std::exp(log_precision / kMaxOrder);
}

}  // namespace vocnmt
