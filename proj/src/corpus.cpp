#include "vocnmt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "vocnmt/util.hpp"

namespace vocnmt {

const char* const kReservedSurface[kNumReserved] = {"<unk>", "<s>", "</s>",
                                                    "<pad>"};

Vocabulary::Vocabulary() {
  for (WordId id = 0; id < kNumReserved; ++id) {
    tokens_.emplace_back(kReservedSurface[id]);
    frequency_.push_back(0);
    index_.emplace(tokens_.back(), id);
  }
}

WordId Vocabulary::id_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token_of(WordId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    fail("token id ", id, " out of range (vocabulary size ", tokens_.size(),
         ")");
  return tokens_[id];
}

std::int64_t Vocabulary::frequency(WordId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= frequency_.size()) return 0;
  return frequency_[id];
}

IdSequence Vocabulary::encode(const Tokens& sentence) const {
  IdSequence ids;
  ids.reserve(sentence.size());
  for (const auto& tok : sentence) ids.push_back(id_of(tok));
  return ids;
}

Tokens Vocabulary::decode(const IdSequence& ids) const {
  Tokens out;
  out.reserve(ids.size());
  for (WordId id : ids) out.push_back(token_of(id));
  return out;
}

void Vocabulary::push_token(const std::string& token, std::int64_t count) {
  if (index_.count(token)) fail("duplicate vocabulary token '", token, "'");
  index_.emplace(token, static_cast<WordId>(tokens_.size()));
  tokens_.push_back(token);
  frequency_.push_back(count);
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("cannot write vocabulary file ", path);
  for (const auto& tok : tokens_) out << tok << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read vocabulary file ", path);
  Vocabulary vocab;
  std::string line;
  WordId id = 0;
  while (std::getline(in, line)) {
    if (id < kNumReserved) {
      if (line != kReservedSurface[id])
        fail("vocabulary file ", path, " line ", id, ": expected reserved '",
             kReservedSurface[id], "', got '", line, "'");
    } else {
      vocab.push_token(line, 0);
    }
    ++id;
  }
  return vocab;
}

std::uint64_t Vocabulary::content_hash() const {
  std::string blob;
  for (const auto& tok : tokens_) {
    blob += tok;
    blob += '\n';
  }
  return fnv1a(blob);
}

namespace {

Tokens split_ws(const std::string& line) {
  Tokens out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(std::move(tok));
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read corpus file ", path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return lines;
}

}  // namespace

RawParallel load_parallel(const std::string& src_path,
                          const std::string& tgt_path, std::size_t max_len) {
  auto src_lines = read_lines(src_path);
  auto tgt_lines = read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size())
    fail("line count ", src_lines.size(), " != ", tgt_lines.size(), " (",
         src_path, " vs ", tgt_path, ")");
  RawParallel result;
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    RawPair pair{split_ws(src_lines[i]), split_ws(tgt_lines[i])};
    if (pair.source.empty() || pair.target.empty() ||
        pair.source.size() > max_len || pair.target.size() > max_len) {
      ++result.dropped;
      continue;
    }
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

std::vector<SentencePair> encode_pairs(const std::vector<RawPair>& raw,
                                       const Vocabulary& src_vocab,
                                       const Vocabulary& tgt_vocab) {
  std::vector<SentencePair> pairs;
  pairs.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    pairs.push_back({src_vocab.encode(raw[i].source),
                     tgt_vocab.encode(raw[i].target),
                     static_cast<std::int64_t>(i)});
  }
  return pairs;
}

Vocabulary build_vocabulary(const std::vector<Tokens>& sentences,
                            std::size_t max_size) {
  if (max_size < static_cast<std::size_t>(kNumReserved) + 1)
    fail("vocabulary max_size must be at least ", kNumReserved + 1);
  std::unordered_map<std::string, std::int64_t> counts;
  std::unordered_map<std::string, std::size_t> first_seen;
  std::size_t pos = 0;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      auto [it, inserted] = counts.emplace(tok, 0);
      ++it->second;
      if (inserted) first_seen.emplace(tok, pos);
      ++pos;
    }
  }
  std::vector<std::string> words;
  words.reserve(counts.size());
  for (const auto& [tok, cnt] : counts) words.push_back(tok);
  std::sort(words.begin(), words.end(),
            [&](const std::string& a, const std::string& b) {
              auto ca = counts[a], cb = counts[b];
              if (ca != cb) return ca > cb;
              return first_seen[a] < first_seen[b];
            });
  Vocabulary vocab;
  for (const auto& tok : words) {
    if (vocab.size() >= max_size) break;
    vocab.push_token(tok, counts[tok]);
  }
  return vocab;
}

IdSet top_common_words(const Vocabulary& vocab, std::size_t n) {
  IdSet ids{kUnkId, kBosId, kEosId, kPadId};
  std::size_t limit =
      std::min(vocab.size(), static_cast<std::size_t>(kNumReserved) + n);
  for (std::size_t id = kNumReserved; id < limit; ++id)
    ids.insert(static_cast<WordId>(id));
  return ids;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t num_pairs,
                                                   std::size_t batch_size,
                                                   std::uint64_t epoch_seed) {
  if (batch_size < 1) fail("batch size must be >= 1");
  std::vector<std::size_t> order(num_pairs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(epoch_seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < num_pairs; start += batch_size) {
    std::size_t end = std::min(num_pairs, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

}  // namespace vocnmt
