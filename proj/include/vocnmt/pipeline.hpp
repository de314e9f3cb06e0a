#ifndef VOCNMT_PIPELINE_HPP
#define VOCNMT_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vocnmt/align.hpp"
#include "vocnmt/corpus.hpp"
#include "vocnmt/decode.hpp"
#include "vocnmt/lexicon.hpp"
#include "vocnmt/nmt.hpp"
#include "vocnmt/phrase.hpp"
#include "vocnmt/vocab.hpp"

namespace vocnmt {

// Every knob of the pipeline, fillable from a flat key=value config file
// with command-line overrides.
struct PipelineConfig {
  // paths
  std::string src_corpus, tgt_corpus;
  std::string src_vocab_file = "src.vocab", tgt_vocab_file = "tgt.vocab";
  std::string ttable_file = "ttable.tsv";
  std::string dict_file = "dict.tsv";
  std::string phrase_file = "phrases.txt";
  std::string align_file = "align.txt";
  std::string model_file = "model.txt";
  std::string output_file = "output.txt";
  std::string input_file;  // decode input; defaults to src_corpus
  std::string ref_file;    // optional decode references
  std::string attn_dump_file;
  std::string vocab_dump_file;

  // corpus
  std::size_t max_len = 50;
  std::size_t src_vocab_size = 50000;
  std::size_t tgt_vocab_size = 50000;

  // alignment
  int em_iters = 5;

  // dictionary / phrases
  std::size_t dict_max_candidates = 50;
  double dict_min_prob = 0.0;
  int phrase_max_src_len = 4;
  int phrase_max_tgt_len = 4;

  // vocabulary assembly
  std::size_t top_n_dict = 10;
  std::size_t top_k_phrase = 10;
  std::size_t common_top_n = 2000;
  bool use_dict = true;
  bool use_phrases = true;

  // model / training
  int d_emb = 64, d_h = 64, d_s = 64, d_o = 64;
  double rho = 0.95, epsilon = 1e-6;
  std::size_t batch_size = 80;
  int epochs = 10;
  std::uint64_t seed = 1;
  int freeze_embeddings_after = -1;

  // decoding
  int beam = 12;
  int decode_max_len = 100;
  bool length_norm = false;
  bool bleu_plus_one = false;

  bool force = false;  // skip artifact hash checks

  // Hash over the inputs that every downstream artifact depends on.
  std::uint64_t data_hash() const;
};

// "# vocnmt <stage> config <hex>"; readers verify the hex against the
// current config's data_hash unless config.force is set.
std::string artifact_header(const PipelineConfig& config,
                            const std::string& stage);
void check_artifact_header(const PipelineConfig& config,
                           const std::string& header_line,
                           const std::string& path);

struct LoadedCorpus {
  Vocabulary src_vocab, tgt_vocab;
  std::vector<SentencePair> pairs;
  std::size_t dropped = 0;
};

LoadedCorpus load_corpus(const PipelineConfig& config);

void save_ttable(const TTable& table, const Vocabulary& src_vocab,
                 const Vocabulary& tgt_vocab, const std::string& path,
                 const PipelineConfig& config, const std::string& stage);
TTable load_ttable(const std::string& path, const Vocabulary& src_vocab,
                   const Vocabulary& tgt_vocab, const PipelineConfig& config);

void save_alignments(const std::vector<AlignmentLinks>& alignments,
                     const std::string& path, const PipelineConfig& config);
std::vector<AlignmentLinks> load_alignments(const std::string& path,
                                            const PipelineConfig& config);

void save_phrase_table(const PhraseSetTable& table, const Vocabulary& src_vocab,
                       const Vocabulary& tgt_vocab, const std::string& path,
                       const PipelineConfig& config);
PhraseSetTable load_phrase_table(const std::string& path,
                                 const Vocabulary& src_vocab,
                                 const Vocabulary& tgt_vocab,
                                 const PipelineConfig& config);

// Stage drivers; each reads the artifacts of earlier stages and writes its
// own. They return 0 or throw DataError.
void run_align(const PipelineConfig& config);
void run_lexicon(const PipelineConfig& config);
void run_phrases(const PipelineConfig& config);
void run_stats(const PipelineConfig& config, const std::string& mode,
               const std::vector<std::size_t>& sweep);
void run_train(const PipelineConfig& config);
void run_decode(const PipelineConfig& config);
void run_bench(const PipelineConfig& config,
               const std::vector<std::size_t>& vocab_sizes);

}  // namespace vocnmt

#endif
