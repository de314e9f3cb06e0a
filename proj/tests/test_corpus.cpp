#include <doctest.h>

#include <set>
#include <cstdio>
#include <fstream>

#include "vocnmt/corpus.hpp"
#include "vocnmt/util.hpp"

using namespace vocnmt;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = strcat(std::tmpnam(nullptr), "_", name);
  std::ofstream out(path);
  out << content;
  return path;
}

std::vector<Tokens> sentences(std::initializer_list<const char*> lines) {
  std::vector<Tokens> out;
  for (const char* line : lines) {
    Tokens toks;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) toks.push_back(tok);
    out.push_back(toks);
  }
  return out;
}

}  // namespace

TEST_CASE("load_parallel tokenizes and filters") {
  auto src = write_temp("src", "a b c\n\nd e\n");
  auto tgt = write_temp("tgt", "x y\nx\nx y z\n");
  auto loaded = load_parallel(src, tgt, 50);
  CHECK(loaded.pairs.size() == 2);
  CHECK(loaded.dropped == 1);
  CHECK(loaded.pairs[0].source.size() == 3);
  CHECK(loaded.pairs[0].target.size() == 2);
}

TEST_CASE("load_parallel drops over-length pairs") {
  auto src = write_temp("src", "a b c\n");
  auto tgt = write_temp("tgt", "x\n");
  auto loaded = load_parallel(src, tgt, 2);
  CHECK(loaded.pairs.empty());
  CHECK(loaded.dropped == 1);
}

TEST_CASE("load_parallel reports line-count mismatch") {
  auto src = write_temp("src", "a\nb\nc\n");
  auto tgt = write_temp("tgt", "x\ny\n");
  CHECK_THROWS_WITH_AS(load_parallel(src, tgt, 50),
                       doctest::Contains("line count 3 != 2"), DataError);
}

TEST_CASE("build_vocabulary orders by frequency then first occurrence") {
  auto vocab = build_vocabulary(sentences({"b b a"}), 10);
  CHECK(vocab.id_of("b") == 4);
  CHECK(vocab.id_of("a") == 5);
  CHECK(vocab.frequency(4) == 2);
}

TEST_CASE("build_vocabulary caps total size with first-occurrence ties") {
  auto vocab = build_vocabulary(sentences({"a b c"}), 5);
  CHECK(vocab.size() == 5);
  CHECK(vocab.id_of("a") == 4);
  CHECK(vocab.id_of("b") == kUnkId);
  CHECK(vocab.id_of("c") == kUnkId);
}

TEST_CASE("unknown tokens encode to UNK") {
  auto vocab = build_vocabulary(sentences({"a"}), 10);
  CHECK(vocab.encode({"zzz"}) == IdSequence{kUnkId});
}

TEST_CASE("encode/decode round trip replaces OOV with the UNK surface") {
  auto vocab = build_vocabulary(sentences({"a b"}), 10);
  Tokens original = {"a", "zzz", "b"};
  Tokens round = vocab.decode(vocab.encode(original));
  CHECK(round == Tokens{"a", "<unk>", "b"});
}

TEST_CASE("frequency is non-increasing over real ids") {
  auto vocab =
      build_vocabulary(sentences({"a a a b b c", "d d d d"}), 100);
  for (std::size_t id = kNumReserved + 1; id < vocab.size(); ++id)
    CHECK(vocab.frequency(static_cast<WordId>(id - 1)) >=
          vocab.frequency(static_cast<WordId>(id)));
}

TEST_CASE("empty corpus gives reserved-only vocabulary") {
  auto vocab = build_vocabulary({}, 10);
  CHECK(vocab.size() == 4);
}

TEST_CASE("top_common_words") {
  auto vocab = build_vocabulary(sentences({"a a b b c"}), 100);
  CHECK(top_common_words(vocab, 0) == IdSet{0, 1, 2, 3});
  CHECK(top_common_words(vocab, 2) == IdSet{0, 1, 2, 3, 4, 5});
  CHECK(top_common_words(vocab, 2000).size() == std::min<std::size_t>(
            2000, vocab.size() - 4) + 4);
}

TEST_CASE("make_batches covers every pair exactly once") {
  auto batches = make_batches(5, 2, 99);
  CHECK(batches.size() == 3);
  CHECK(batches[0].size() == 2);
  CHECK(batches[2].size() == 1);
  std::set<std::size_t> seen;
  for (const auto& batch : batches)
    for (std::size_t idx : batch) CHECK(seen.insert(idx).second);
  CHECK(seen.size() == 5);
}

TEST_CASE("make_batches is deterministic per seed") {
  CHECK(make_batches(100, 7, 5) == make_batches(100, 7, 5));
  CHECK(make_batches(100, 7, 5) != make_batches(100, 7, 6));
  CHECK(make_batches(160, 80, 1).size() == 2);
}

TEST_CASE("vocabulary file round trip") {
  auto vocab = build_vocabulary(sentences({"a b b"}), 10);
  std::string path = strcat(std::tmpnam(nullptr), "_vocab");
  vocab.save(path);
  auto loaded = Vocabulary::load(path);
  CHECK(loaded.size() == vocab.size());
  CHECK(loaded.id_of("b") == vocab.id_of("b"));
  CHECK(loaded.content_hash() == vocab.content_hash());
}
