#include "vocnmt/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "vocnmt/bench.hpp"
#include "vocnmt/util.hpp"

namespace vocnmt {

std::uint64_t PipelineConfig::data_hash() const {
  return fnv1a(strcat(src_corpus, '|', tgt_corpus, '|', max_len, '|',
                      src_vocab_size, '|', tgt_vocab_size, '|', seed));
}

std::string artifact_header(const PipelineConfig& config,
                            const std::string& stage) {
  return strcat("# vocnmt ", stage, " config ", hex64(config.data_hash()));
}

void check_artifact_header(const PipelineConfig& config,
                           const std::string& header_line,
                           const std::string& path) {
  std::istringstream is(header_line);
  std::string hash_mark, magic, stage, key, hex;
  is >> hash_mark >> magic >> stage >> key >> hex;
  if (hash_mark != "#" || magic != "vocnmt" || key != "config")
    fail("file ", path, " has no vocnmt artifact header; run the producing ",
         "stage first");
  if (config.force) return;
  if (hex != hex64(config.data_hash()))
    fail("artifact ", path, " was produced under a different configuration (",
         hex, " vs ", hex64(config.data_hash()),
         "); regenerate it or pass --force");
}

namespace {

std::ifstream open_artifact(const std::string& path,
                            const PipelineConfig& config,
                            const std::string& needed_by) {
  std::ifstream in(path);
  if (!in)
    fail("missing artifact ", path, "; run the ", needed_by, " stage first");
  std::string header;
  std::getline(in, header);
  check_artifact_header(config, header, path);
  return in;
}

VocabBuilderConfig builder_config(const PipelineConfig& config,
                                  const WordDictionary* dict,
                                  const PhraseSetTable* phrases,
                                  const IdSet* common) {
  VocabBuilderConfig builder;
  builder.dict = dict;
  builder.phrases = phrases;
  builder.common = common;
  builder.top_n_dict = config.top_n_dict;
  builder.top_k_phrase = config.top_k_phrase;
  builder.use_dict = config.use_dict;
  builder.use_phrases = config.use_phrases;
  return builder;
}

}  // namespace

LoadedCorpus load_corpus(const PipelineConfig& config) {
  if (config.src_corpus.empty() || config.tgt_corpus.empty())
    fail("src_corpus and tgt_corpus must be set");
  RawParallel raw =
      load_parallel(config.src_corpus, config.tgt_corpus, config.max_len);
  LoadedCorpus corpus;
  corpus.dropped = raw.dropped;
  std::vector<Tokens> src_side, tgt_side;
  for (const auto& pair : raw.pairs) {
    src_side.push_back(pair.source);
    tgt_side.push_back(pair.target);
  }
  corpus.src_vocab = build_vocabulary(src_side, config.src_vocab_size);
  corpus.tgt_vocab = build_vocabulary(tgt_side, config.tgt_vocab_size);
  corpus.pairs = encode_pairs(raw.pairs, corpus.src_vocab, corpus.tgt_vocab);
  return corpus;
}

void save_ttable(const TTable& table, const Vocabulary& src_vocab,
                 const Vocabulary& tgt_vocab, const std::string& path,
                 const PipelineConfig& config, const std::string& stage) {
  std::ofstream out(path);
  if (!out) fail("cannot write ", path);
  out << artifact_header(config, stage) << '\n';
  std::vector<WordId> sources;
  for (const auto& [src, row] : table.probs)
    if (src != kNullSourceId) sources.push_back(src);
  std::sort(sources.begin(), sources.end(),
            [&](WordId a, WordId b) {
              return src_vocab.token_of(a) < src_vocab.token_of(b);
            });
  char buf[64];
  for (WordId src : sources) {
    std::vector<std::pair<WordId, double>> row(
        table.probs.at(src).begin(), table.probs.at(src).end());
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (const auto& [tgt, p] : row) {
      std::snprintf(buf, sizeof(buf), "%.12g", p);
      out << src_vocab.token_of(src) << '\t' << tgt_vocab.token_of(tgt)
          << '\t' << buf << '\n';
    }
  }
}

TTable load_ttable(const std::string& path, const Vocabulary& src_vocab,
                   const Vocabulary& tgt_vocab,
                   const PipelineConfig& config) {
  auto in = open_artifact(path, config, "align or lexicon");
  TTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string src, tgt;
    double p = 0.0;
    if (!std::getline(is, src, '\t') || !std::getline(is, tgt, '\t') ||
        !(is >> p))
      fail("malformed t-table line in ", path, ": ", line);
    table.probs[src_vocab.id_of(src)][tgt_vocab.id_of(tgt)] = p;
  }
  return table;
}

void save_alignments(const std::vector<AlignmentLinks>& alignments,
                     const std::string& path, const PipelineConfig& config) {
  std::ofstream out(path);
  if (!out) fail("cannot write ", path);
  out << artifact_header(config, "align") << '\n';
  for (const auto& links : alignments) out << to_pharaoh(links) << '\n';
}

std::vector<AlignmentLinks> load_alignments(const std::string& path,
                                            const PipelineConfig& config) {
  auto in = open_artifact(path, config, "align");
  std::vector<AlignmentLinks> alignments;
  std::string line;
  while (std::getline(in, line)) alignments.push_back(from_pharaoh(line));
  return alignments;
}

void save_phrase_table(const PhraseSetTable& table,
                       const Vocabulary& src_vocab,
                       const Vocabulary& tgt_vocab, const std::string& path,
                       const PipelineConfig& config) {
  std::ofstream out(path);
  if (!out) fail("cannot write ", path);
  out << artifact_header(config, "phrases") << '\n';
  out << "# limits " << table.max_src_len() << ' ' << table.max_tgt_len()
      << '\n';
  std::vector<const IdSequence*> keys;
  for (const auto& [phrase, list] : table.entries()) keys.push_back(&phrase);
  std::sort(keys.begin(), keys.end(),
            [](const IdSequence* a, const IdSequence* b) { return *a < *b; });
  for (const auto* phrase : keys) {
    for (const auto& cand : *table.lookup(*phrase)) {
      for (std::size_t i = 0; i < phrase->size(); ++i)
        out << (i ? " " : "") << src_vocab.token_of((*phrase)[i]);
      out << " ||| ";
      for (std::size_t i = 0; i < cand.words.size(); ++i)
        out << (i ? " " : "") << tgt_vocab.token_of(cand.words[i]);
      out << " ||| " << cand.count << '\n';
    }
  }
}

PhraseSetTable load_phrase_table(const std::string& path,
                                 const Vocabulary& src_vocab,
                                 const Vocabulary& tgt_vocab,
                                 const PipelineConfig& config) {
  auto in = open_artifact(path, config, "phrases");
  std::string line;
  std::getline(in, line);
  std::istringstream limits(line);
  std::string hash_mark, tag;
  int max_src = 4, max_tgt = 4;
  limits >> hash_mark >> tag >> max_src >> max_tgt;
  if (hash_mark != "#" || tag != "limits")
    fail("phrase file ", path, " lacks its limits line");
  PhraseSetTable table(max_src, max_tgt);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto sep1 = line.find(" ||| ");
    auto sep2 = line.find(" ||| ", sep1 + 5);
    if (sep1 == std::string::npos || sep2 == std::string::npos)
      fail("malformed phrase line in ", path, ": ", line);
    std::istringstream src_is(line.substr(0, sep1));
    std::istringstream tgt_is(line.substr(sep1 + 5, sep2 - sep1 - 5));
    std::int64_t count = std::stoll(line.substr(sep2 + 5));
    IdSequence phrase;
    TargetSet words;
    std::string tok;
    while (src_is >> tok) phrase.push_back(src_vocab.id_of(tok));
    while (tgt_is >> tok) words.push_back(tgt_vocab.id_of(tok));
    table.add(phrase, words, count);  // re-sorts the target set on load
  }
  table.finalize();
  return table;
}

void run_align(const PipelineConfig& config) {
  LoadedCorpus corpus = load_corpus(config);
  std::cerr << "loaded " << corpus.pairs.size() << " pairs ("
            << corpus.dropped << " dropped), |V_src|="
            << corpus.src_vocab.size() << " |V_tgt|="
            << corpus.tgt_vocab.size() << '\n';
  corpus.src_vocab.save(config.src_vocab_file);
  corpus.tgt_vocab.save(config.tgt_vocab_file);

  Model1Result fwd =
      train_model1(corpus.pairs, config.em_iters, AlignDirection::kSrcToTgt);
  Model1Result rev =
      train_model1(corpus.pairs, config.em_iters, AlignDirection::kTgtToSrc);
  for (std::size_t i = 0; i < fwd.log_likelihood.size(); ++i)
    std::cerr << "em iter " << i + 1 << " loglik fwd "
              << fwd.log_likelihood[i] << " rev " << rev.log_likelihood[i]
              << '\n';

  std::vector<AlignmentLinks> alignments;
  alignments.reserve(corpus.pairs.size());
  for (const auto& pair : corpus.pairs) {
    AlignmentLinks f = viterbi_align(fwd.ttable, pair);
    AlignmentLinks r = viterbi_align(rev.ttable, pair);
    alignments.push_back(grow_diag_final_and(
        f, r, static_cast<int>(pair.source.size()),
        static_cast<int>(pair.target.size())));
  }
  save_alignments(alignments, config.align_file, config);
  // the source-to-target table seeds the word dictionary
  save_ttable(fwd.ttable, corpus.src_vocab, corpus.tgt_vocab,
              config.ttable_file, config, "align");
  std::cerr << "wrote " << config.align_file << " and " << config.ttable_file
            << '\n';
}

void run_lexicon(const PipelineConfig& config) {
  Vocabulary src_vocab = Vocabulary::load(config.src_vocab_file);
  Vocabulary tgt_vocab = Vocabulary::load(config.tgt_vocab_file);
  TTable table =
      load_ttable(config.ttable_file, src_vocab, tgt_vocab, config);
  WordDictionary dict = extract_dictionary(
      table, config.dict_max_candidates, config.dict_min_prob);
  std::ofstream out(config.dict_file);
  if (!out) fail("cannot write ", config.dict_file);
  out << artifact_header(config, "lexicon") << '\n';
  std::vector<WordId> sources;
  for (const auto& [src, list] : dict.entries) sources.push_back(src);
  std::sort(sources.begin(), sources.end(), [&](WordId a, WordId b) {
    return src_vocab.token_of(a) < src_vocab.token_of(b);
  });
  char buf[64];
  for (WordId src : sources) {
    for (const auto& [tgt, p] : dict.entries.at(src)) {
      std::snprintf(buf, sizeof(buf), "%.12g", p);
      out << src_vocab.token_of(src) << '\t' << tgt_vocab.token_of(tgt)
          << '\t' << buf << '\n';
    }
  }
  std::cerr << "wrote " << config.dict_file << " (" << dict.entries.size()
            << " source words)\n";
}

void run_phrases(const PipelineConfig& config) {
  LoadedCorpus corpus = load_corpus(config);
  auto alignments = load_alignments(config.align_file, config);
  PhraseSetTable table =
      extract_phrases(corpus.pairs, alignments, config.phrase_max_src_len,
                      config.phrase_max_tgt_len);
  save_phrase_table(table, corpus.src_vocab, corpus.tgt_vocab,
                    config.phrase_file, config);
  std::cerr << "wrote " << config.phrase_file << " (" << table.size()
            << " source phrases)\n";
}

namespace {

WordDictionary load_dictionary(const PipelineConfig& config,
                               const Vocabulary& src_vocab,
                               const Vocabulary& tgt_vocab) {
  TTable as_table =
      load_ttable(config.dict_file, src_vocab, tgt_vocab, config);
  return extract_dictionary(as_table, config.dict_max_candidates,
                            config.dict_min_prob);
}

}  // namespace

void run_stats(const PipelineConfig& config, const std::string& mode,
               const std::vector<std::size_t>& sweep) {
  LoadedCorpus corpus = load_corpus(config);
  WordDictionary dict =
      load_dictionary(config, corpus.src_vocab, corpus.tgt_vocab);
  PhraseSetTable phrases = load_phrase_table(
      config.phrase_file, corpus.src_vocab, corpus.tgt_vocab, config);
  IdSet common = top_common_words(corpus.tgt_vocab, config.common_top_n);
  CoverageMode coverage_mode =
      mode == "train" ? CoverageMode::kTrain : CoverageMode::kDecode;

  auto row = [&](const std::string& label, bool use_dict, bool use_phrases,
                 const IdSet* common_set, std::size_t top_n) {
    VocabBuilderConfig builder =
        builder_config(config, &dict, &phrases, common_set);
    builder.use_dict = use_dict;
    builder.use_phrases = use_phrases;
    builder.top_n_dict = top_n;
    CoverageReport report = coverage_stats(corpus.pairs, builder,
                                           coverage_mode, config.batch_size);
    std::printf("%-16s word=%.4f sent=%.4f avg|Vx|=%.1f avg|Vb|=%.1f "
                "avg|VR|=%.1f\n",
                label.c_str(), report.word_level_ratio,
                report.full_sentence_ratio, report.avg_sentence_vocab,
                report.avg_batch_vocab, report.avg_reference_vocab);
  };

  row("P", false, true, nullptr, config.top_n_dict);
  for (std::size_t n : sweep) row(strcat("D@", n), true, false, nullptr, n);
  for (std::size_t n : sweep) row(strcat("P+D@", n), true, true, nullptr, n);
  for (std::size_t n : sweep)
    row(strcat("P+D+T@", n), true, true, &common, n);

  if (!config.vocab_dump_file.empty()) {
    std::ofstream dump(config.vocab_dump_file);
    dump << artifact_header(config, "stats") << '\n';
    VocabBuilderConfig builder =
        builder_config(config, &dict, &phrases, &common);
    for (const auto& pair : corpus.pairs) {
      SentenceVocab vocab =
          coverage_mode == CoverageMode::kTrain
              ? build_train_vocab(pair.source, pair.target, builder)
              : build_decode_vocab(pair.source, builder);
      dump << pair.pair_id << " :";
      for (WordId id : vocab.global_ids) dump << ' ' << id;
      dump << '\n';
    }
  }
}

void run_train(const PipelineConfig& config) {
  LoadedCorpus corpus = load_corpus(config);
  WordDictionary dict =
      load_dictionary(config, corpus.src_vocab, corpus.tgt_vocab);
  PhraseSetTable phrases = load_phrase_table(
      config.phrase_file, corpus.src_vocab, corpus.tgt_vocab, config);
  IdSet common = top_common_words(corpus.tgt_vocab, config.common_top_n);
  VocabBuilderConfig builder =
      builder_config(config, &dict, &phrases, &common);

  ModelConfig model_config;
  model_config.d_emb = config.d_emb;
  model_config.d_h = config.d_h;
  model_config.d_s = config.d_s;
  model_config.d_o = config.d_o;
  model_config.src_vocab_size = static_cast<int>(corpus.src_vocab.size());
  model_config.tgt_vocab_size = static_cast<int>(corpus.tgt_vocab.size());
  model_config.src_vocab_hash = corpus.src_vocab.content_hash();
  model_config.tgt_vocab_hash = corpus.tgt_vocab.content_hash();
  Model model = Model::random(model_config, config.seed);

  TrainConfig train_config;
  train_config.rho = config.rho;
  train_config.epsilon = config.epsilon;
  train_config.batch_size = config.batch_size;
  train_config.epochs = config.epochs;
  train_config.seed = config.seed;
  train_config.freeze_embeddings_after = config.freeze_embeddings_after;

  train(model, corpus.pairs, builder, train_config,
        [&](const Model& m, const EpochLog& log) {
          std::printf("epoch %d loss %.6f tokens/sec %.0f avg_batch_vocab "
                      "%.1f\n",
                      log.epoch, log.mean_loss, log.tokens_per_sec,
                      log.avg_batch_vocab);
          std::fflush(stdout);
          m.save(strcat(config.model_file, ".epoch", log.epoch));
        });
  model.save(config.model_file);
  std::cerr << "wrote " << config.model_file << '\n';
}

void run_decode(const PipelineConfig& config) {
  Vocabulary src_vocab = Vocabulary::load(config.src_vocab_file);
  Vocabulary tgt_vocab = Vocabulary::load(config.tgt_vocab_file);
  Model model = Model::load(config.model_file);
  if (!config.force &&
      (model.cfg.src_vocab_hash != src_vocab.content_hash() ||
       model.cfg.tgt_vocab_hash != tgt_vocab.content_hash()))
    fail("checkpoint ", config.model_file,
         " was trained against different vocabulary files; artifacts are "
         "stale (pass --force to override)");
  WordDictionary dict = load_dictionary(config, src_vocab, tgt_vocab);
  PhraseSetTable phrases =
      load_phrase_table(config.phrase_file, src_vocab, tgt_vocab, config);
  IdSet common = top_common_words(tgt_vocab, config.common_top_n);
  VocabBuilderConfig builder =
      builder_config(config, &dict, &phrases, &common);

  std::string input =
      config.input_file.empty() ? config.src_corpus : config.input_file;
  std::ifstream in(input);
  if (!in) fail("cannot read decode input ", input);
  std::ofstream out(config.output_file);
  if (!out) fail("cannot write ", config.output_file);
  std::ofstream attn_dump;
  if (!config.attn_dump_file.empty()) {
    attn_dump.open(config.attn_dump_file);
    attn_dump << artifact_header(config, "decode") << '\n';
  }

  DecodeSearchConfig search;
  search.beam = config.beam;
  search.max_len = config.decode_max_len;
  search.length_norm = config.length_norm;

  std::vector<Tokens> outputs;
  double vocab_size_sum = 0.0;
  std::size_t sentence_count = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    Tokens tokens;
    std::string tok;
    while (is >> tok) tokens.push_back(tok);
    IdSequence x = src_vocab.encode(tokens);
    SentenceVocab vocab = build_decode_vocab(x, builder);
    vocab_size_sum += static_cast<double>(vocab.size());
    auto hyps = beam_search(model, x, vocab, search);
    Tokens surface =
        unk_replace(hyps.front(), x, dict, src_vocab, tgt_vocab);
    for (std::size_t i = 0; i < surface.size(); ++i)
      out << (i ? " " : "") << surface[i];
    out << '\n';
    outputs.push_back(std::move(surface));
    if (attn_dump.is_open()) {
      const auto& hyp = hyps.front();
      for (std::size_t t = 0; t < hyp.attn_trace.size(); ++t) {
        Eigen::Index i_star = 0;
        hyp.attn_trace[t].maxCoeff(&i_star);
        attn_dump << t << ' ' << i_star << '\n';
      }
      attn_dump << '\n';
    }
    ++sentence_count;
  }
  if (sentence_count > 0)
    std::printf("avg |V_o| %.1f over %zu sentences\n",
                vocab_size_sum / static_cast<double>(sentence_count),
                sentence_count);

  if (!config.ref_file.empty()) {
    std::ifstream refs_in(config.ref_file);
    if (!refs_in) fail("cannot read references ", config.ref_file);
    std::vector<Tokens> refs;
    while (std::getline(refs_in, line)) {
      std::istringstream is(line);
      Tokens tokens;
      std::string tok;
      while (is >> tok) tokens.push_back(tok);
      refs.push_back(std::move(tokens));
    }
    double bleu = bleu4(outputs, refs, config.bleu_plus_one);
    std::printf("BLEU %.2f%s\n", bleu,
                config.bleu_plus_one ? " (+1 smoothing)" : "");
  }
}

void run_bench(const PipelineConfig& config,
               const std::vector<std::size_t>& vocab_sizes) {
  Model model;
  if (std::filesystem::exists(config.model_file)) {
    model = Model::load(config.model_file);
  } else {
    ModelConfig model_config;
    model_config.d_emb = config.d_emb;
    model_config.d_h = config.d_h;
    model_config.d_s = config.d_s;
    model_config.d_o = config.d_o;
    model_config.src_vocab_size = 1000;
    model_config.tgt_vocab_size = static_cast<int>(config.tgt_vocab_size);
    model = Model::random(model_config, config.seed);
    std::cerr << "no checkpoint at " << config.model_file
              << "; benchmarking a random model with |V_y|="
              << model_config.tgt_vocab_size << '\n';
  }
  std::vector<std::size_t> sweep = vocab_sizes;
  sweep.push_back(0);  // full vocabulary
  auto timings = bench_output_layer(model, sweep);
  double full_time = timings.back().seconds_per_step;
  for (const auto& t : timings) {
    std::size_t size = t.restricted_size == 0
                           ? static_cast<std::size_t>(model.cfg.tgt_vocab_size)
                           : t.restricted_size;
    std::printf("|V_o|=%-8zu %.3g s/step  speedup vs full %.2fx\n", size,
                t.seconds_per_step, full_time / t.seconds_per_step);
  }
}

}  // namespace vocnmt
