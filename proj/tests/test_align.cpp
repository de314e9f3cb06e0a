#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vocnmt/align.hpp"
#include "vocnmt/util.hpp"

using namespace vocnmt;

namespace {

// das Haus / the house ; das Buch / the book, with ids
// das=4 Haus=5 Buch=6 (src), the=4 house=5 book=6 (tgt)
std::vector<SentencePair> das_haus_corpus() {
  return {{{4, 5}, {4, 5}, 0}, {{4, 6}, {4, 6}, 1}};
}

}  // namespace

TEST_CASE("Model 1 EM converges on the das-Haus corpus") {
  auto result =
      train_model1(das_haus_corpus(), 20, AlignDirection::kSrcToTgt);
  CHECK(result.ttable.prob(4, 4) > 0.9);  // t(the|das)
  CHECK(result.log_likelihood.size() == 20);
}

TEST_CASE("EM log-likelihood is non-decreasing") {
  auto result =
      train_model1(das_haus_corpus(), 15, AlignDirection::kSrcToTgt);
  for (std::size_t i = 1; i < result.log_likelihood.size(); ++i)
    CHECK(result.log_likelihood[i] >= result.log_likelihood[i - 1] - 1e-9);
}

TEST_CASE("t-table rows stay normalized after every iteration") {
  for (int iters : {1, 3, 10}) {
    auto result =
        train_model1(das_haus_corpus(), iters, AlignDirection::kSrcToTgt);
    for (const auto& [src, row] : result.ttable.probs) {
      double sum = 0.0;
      for (const auto& [tgt, p] : row) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("single pair, one iteration") {
  std::vector<SentencePair> corpus = {{{4}, {5}, 0}};
  auto result = train_model1(corpus, 1, AlignDirection::kSrcToTgt);
  CHECK(result.ttable.prob(4, 5) == doctest::Approx(1.0));
  CHECK(result.ttable.prob(kNullSourceId, 5) == doctest::Approx(1.0));
}

TEST_CASE("empty corpus is an error") {
  CHECK_THROWS_AS(train_model1({}, 5, AlignDirection::kSrcToTgt), DataError);
}

TEST_CASE("Viterbi alignment of the converged table") {
  auto result =
      train_model1(das_haus_corpus(), 20, AlignDirection::kSrcToTgt);
  // "the" ties between "das" and NULL (both co-occur with every target
  // word), and ties go to NULL, so only the content word links up.
  auto links = viterbi_align(result.ttable, das_haus_corpus()[0]);
  CHECK(links == AlignmentLinks{{1, 1}});

  // with the NULL row biased away, "the" aligns to "das"
  auto table = result.ttable;
  table.probs[kNullSourceId][4] = 0.01;
  CHECK(viterbi_align(table, das_haus_corpus()[0]) ==
        AlignmentLinks{{0, 0}, {1, 1}});
}

TEST_CASE("Viterbi ties go to the smallest source position") {
  TTable table;
  table.probs[4][7] = 0.5;
  table.probs[5][7] = 0.5;
  SentencePair pair{{4, 5}, {7}, 0};
  CHECK(viterbi_align(table, pair) == AlignmentLinks{{0, 0}});
}

TEST_CASE("words explainable only by NULL yield no links") {
  TTable table;
  table.probs[kNullSourceId][7] = 0.9;
  table.probs[4][7] = 0.1;
  SentencePair pair{{4}, {7}, 0};
  CHECK(viterbi_align(table, pair).empty());
}

TEST_CASE("reverse-direction table emits transposed links") {
  TTable table;
  table.direction = AlignDirection::kTgtToSrc;
  table.probs[9][4] = 1.0;  // t(src word 4 | tgt word 9)
  SentencePair pair{{4}, {9}, 0};
  CHECK(viterbi_align(table, pair) == AlignmentLinks{{0, 0}});
}

TEST_CASE("gdfa of identical alignments is the identity") {
  AlignmentLinks s{{0, 0}, {1, 2}, {2, 1}};
  CHECK(grow_diag_final_and(s, s, 3, 3) == s);
}

TEST_CASE("gdfa grows a diagonal neighbor with unaligned endpoints") {
  AlignmentLinks fwd{{0, 0}, {1, 1}};
  AlignmentLinks rev{{0, 0}};
  CHECK(grow_diag_final_and(fwd, rev, 2, 2) ==
        AlignmentLinks{{0, 0}, {1, 1}});
}

TEST_CASE("gdfa sandwich holds on random instances") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    int l = len(rng), m = len(rng);
    auto fwd = testing::random_links(rng, l, m);
    auto rev = testing::random_links(rng, l, m);
    auto out = grow_diag_final_and(fwd, rev, l, m);
    for (const auto& link : out)
      CHECK((fwd.count(link) || rev.count(link)));
    for (const auto& link : fwd)
      if (rev.count(link)) CHECK(out.count(link));
  }
}

TEST_CASE("pharaoh round trip") {
  AlignmentLinks links{{0, 0}, {1, 2}, {2, 1}};
  CHECK(to_pharaoh(links) == "0-0 1-2 2-1");
  CHECK(from_pharaoh("0-0 1-2 2-1") == links);
  CHECK(from_pharaoh("").empty());
}
