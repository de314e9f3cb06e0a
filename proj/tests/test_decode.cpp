#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vocnmt/decode.hpp"
#include "vocnmt/util.hpp"

using namespace vocnmt;

namespace {

ModelConfig small_config(int src_vocab = 12, int tgt_vocab = 14) {
  ModelConfig cfg;
  cfg.d_emb = 6;
  cfg.d_h = 6;
  cfg.d_s = 6;
  cfg.d_o = 6;
  cfg.src_vocab_size = src_vocab;
  cfg.tgt_vocab_size = tgt_vocab;
  return cfg;
}

SentenceVocab full_vocab(int tgt_vocab) {
  std::vector<WordId> ids;
  for (WordId id = 0; id < tgt_vocab; ++id) ids.push_back(id);
  return testing::vocab_of_ids(ids);
}

// exact greedy decoding straight off the Decoder primitive
IdSequence greedy_reference(const Model& model, const IdSequence& x,
                            const SentenceVocab& vocab, int max_len) {
  Decoder decoder(model, x);
  VectorXd s = decoder.init_state();
  WordId prev = kBosId;
  IdSequence out;
  for (int t = 0; t < max_len; ++t) {
    auto step = decoder.step(s, prev, &vocab);
    int best = 0;
    for (int k = 1; k < step.log_probs.size(); ++k)
      if (step.log_probs[k] > step.log_probs[best]) best = k;
    WordId id = vocab.global_ids[best];
    if (id == kEosId) break;
    out.push_back(id);
    s = step.s;
    prev = id;
  }
  return out;
}

Tokens words(std::initializer_list<const char*> ws) {
  Tokens out;
  for (const char* w : ws) out.emplace_back(w);
  return out;
}

}  // namespace

TEST_CASE("beam width 1 reproduces greedy decoding") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<WordId> src(4, 11);
  std::uniform_int_distribution<int> len(1, 5);
  DecodeSearchConfig config;
  config.beam = 1;
  config.max_len = 12;
  for (int trial = 0; trial < 20; ++trial) {
    Model model = Model::random(small_config(), 500 + trial);
    IdSequence x;
    for (int i = len(rng); i > 0; --i) x.push_back(src(rng));
    auto vocab = full_vocab(14);
    auto hyps = beam_search(model, x, vocab, config);
    REQUIRE(!hyps.empty());
    CHECK(hyps[0].tokens == greedy_reference(model, x, vocab, 12));
  }
}

TEST_CASE("a wider beam never scores worse") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<WordId> src(4, 11);
  for (int trial = 0; trial < 10; ++trial) {
    Model model = Model::random(small_config(), 600 + trial);
    IdSequence x = {src(rng), src(rng), src(rng)};
    auto vocab = full_vocab(14);
    double prev_best = -1e18;
    for (int beam : {1, 2, 4, 8}) {
      DecodeSearchConfig config;
      config.beam = beam;
      config.max_len = 8;
      auto hyps = beam_search(model, x, vocab, config);
      REQUIRE(!hyps.empty());
      if (hyps[0].completed) {
        CHECK(hyps[0].score >= prev_best - 1e-9);
        prev_best = std::max(prev_best, hyps[0].score);
      }
    }
  }
}

TEST_CASE("emitted tokens always come from the restriction") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<WordId> tgt(4, 13);
  for (int trial = 0; trial < 15; ++trial) {
    Model model = Model::random(small_config(), 700 + trial);
    std::vector<WordId> subset = {kEosId, tgt(rng), tgt(rng), tgt(rng)};
    auto vocab = testing::vocab_of_ids(subset);
    DecodeSearchConfig config;
    config.beam = 4;
    config.max_len = 6;
    auto hyps = beam_search(model, {4, 5}, vocab, config);
    for (const auto& hyp : hyps) {
      CHECK(hyp.attn_trace.size() == hyp.tokens.size());
      for (WordId id : hyp.tokens) CHECK(vocab.contains(id));
    }
  }
}

TEST_CASE("hypotheses are sorted best-first and scores are log-probs") {
  Model model = Model::random(small_config(), 42);
  DecodeSearchConfig config;
  config.beam = 6;
  config.max_len = 6;
  auto hyps = beam_search(model, {4, 5, 6}, config.length_norm
                                                ? full_vocab(14)
                                                : full_vocab(14),
                          config);
  for (std::size_t k = 1; k < hyps.size(); ++k)
    CHECK(hyps[k - 1].score >= hyps[k].score);
  for (const auto& hyp : hyps) CHECK(hyp.score <= 0.0);
}

TEST_CASE("max_len without any EOS returns a flagged partial") {
  Model model = Model::random(small_config(), 50);
  // EOS must be present in the vocabulary, but make it unreachable
  model.b_proj[kEosId] = -1e4;
  DecodeSearchConfig config;
  config.beam = 2;
  config.max_len = 4;
  auto hyps = beam_search(model, {4}, full_vocab(14), config);
  REQUIRE(!hyps.empty());
  CHECK(!hyps[0].completed);
  CHECK(hyps[0].tokens.size() == 4);
}

TEST_CASE("length normalization can change the ranking rule only") {
  Model model = Model::random(small_config(), 51);
  DecodeSearchConfig plain, norm;
  plain.beam = norm.beam = 4;
  plain.max_len = norm.max_len = 8;
  norm.length_norm = true;
  auto a = beam_search(model, {4, 5}, full_vocab(14), plain);
  auto b = beam_search(model, {4, 5}, full_vocab(14), norm);
  // the candidate pool is the same; only ordering may differ
  REQUIRE(!a.empty());
  REQUIRE(!b.empty());
  std::set<IdSequence> pool_a, pool_b;
  for (const auto& h : a) pool_a.insert(h.tokens);
  for (const auto& h : b) pool_b.insert(h.tokens);
  CHECK(pool_a == pool_b);
}

TEST_CASE("unk_replace substitutes via the dictionary then the source") {
  Vocabulary src_vocab, tgt_vocab;
  src_vocab.push_token("casa", 2);
  src_vocab.push_token("zorro", 1);
  tgt_vocab.push_token("house", 2);
  tgt_vocab.push_token("the", 1);
  WordId casa = src_vocab.id_of("casa");
  WordId zorro = src_vocab.id_of("zorro");
  WordId house = tgt_vocab.id_of("house");
  WordId the = tgt_vocab.id_of("the");

  WordDictionary dict;
  dict.max_candidates = 10;
  dict.entries[casa] = {{house, 0.9}, {the, 0.1}};
  // zorro has no dictionary entry: fall back to copying the source form

  Hypothesis hyp;
  hyp.tokens = {kUnkId, the, kUnkId};
  VectorXd a0(2), a1(2), a2(2);
  a0 << 0.9, 0.1;  // first UNK attends to casa
  a1 << 0.5, 0.5;
  a2 << 0.1, 0.9;  // second UNK attends to zorro
  hyp.attn_trace = {a0, a1, a2};

  Tokens out = unk_replace(hyp, {casa, zorro}, dict, src_vocab, tgt_vocab);
  CHECK(out == words({"house", "the", "zorro"}));
}

TEST_CASE("unk_replace leaves UNK-free output untouched") {
  Vocabulary src_vocab, tgt_vocab;
  src_vocab.push_token("a", 1);
  tgt_vocab.push_token("word", 1);
  WordId w = tgt_vocab.id_of("word");
  WordDictionary dict;
  Hypothesis hyp;
  hyp.tokens = {w, w};
  VectorXd a(1);
  a << 1.0;
  hyp.attn_trace = {a, a};
  CHECK(unk_replace(hyp, {4}, dict, src_vocab, tgt_vocab) ==
        words({"word", "word"}));
}

TEST_CASE("bleu micro cases") {
  auto the3 = words({"the", "the", "the"});
  auto the_cat = words({"the", "cat"});
  // no bigram match -> zero precision -> 0.0 without smoothing
  CHECK(bleu4({the3}, {the_cat}) == 0.0);
  CHECK(bleu4({the3}, {the_cat}, true) > 0.0);

  auto ref = words({"the", "cat", "sat", "on", "the", "mat"});
  CHECK(bleu4({ref}, {ref}) == doctest::Approx(100.0));

  // candidate shorter than the reference: brevity penalty applies
  auto cand = words({"the", "cat", "sat", "on", "the"});
  double clipped = bleu4({cand}, {ref});
  CHECK(clipped > 0.0);
  CHECK(clipped < 100.0);
  // exact value: precisions 5/5, 4/4, 3/3, 2/2, BP = exp(1 - 6/5)
  CHECK(clipped == doctest::Approx(100.0 * std::exp(1.0 - 6.0 / 5.0))
                       .epsilon(1e-9));
}

TEST_CASE("bleu clips repeated n-grams") {
  auto cand = words({"the", "the", "the", "the"});
  auto ref = words({"the", "cat", "the", "dog"});
  // unigram precision clips at 2/4; higher orders are zero
  CHECK(bleu4({cand}, {ref}) == 0.0);
  double smoothed = bleu4({cand}, {ref}, true);
  CHECK(smoothed > 0.0);
  double unclipped_would_be = 100.0;  // all four unigrams appear in ref
  CHECK(smoothed < unclipped_would_be);
}

TEST_CASE("bleu is corpus-level, not an average of sentence scores") {
  auto r1 = words({"a", "b", "c", "d"});
  auto r2 = words({"e", "f", "g", "h"});
  auto c1 = words({"a", "b", "c", "d"});
  auto c2 = words({"x", "y", "z", "w"});
  double corpus = bleu4({c1, c2}, {r1, r2}, true);
  double s1 = bleu4({c1}, {r1}, true);
  double s2 = bleu4({c2}, {r2}, true);
  CHECK(corpus != doctest::Approx((s1 + s2) / 2.0).epsilon(1e-6));
}

TEST_CASE("mismatched corpus sizes are an error") {
  CHECK_THROWS_AS(bleu4({words({"a"})}, {}), DataError);
}
