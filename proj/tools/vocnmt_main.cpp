#include <CLI11.hpp>
#include <iostream>
#include <vector>

#include "vocnmt/pipeline.hpp"
#include "vocnmt/util.hpp"

namespace {

using vocnmt::PipelineConfig;

// Registers every pipeline knob on a subcommand so any of them can come from
// the flat key=value config file or be overridden on the command line.
void add_options(CLI::App* cmd, PipelineConfig& cfg) {
  cmd->set_config("--config", "", "flat key=value config file");
  cmd->add_option("--src-corpus", cfg.src_corpus);
  cmd->add_option("--tgt-corpus", cfg.tgt_corpus);
  cmd->add_option("--src-vocab", cfg.src_vocab_file);
  cmd->add_option("--tgt-vocab", cfg.tgt_vocab_file);
  cmd->add_option("--ttable", cfg.ttable_file);
  cmd->add_option("--dict", cfg.dict_file);
  cmd->add_option("--phrases", cfg.phrase_file);
  cmd->add_option("--align", cfg.align_file);
  cmd->add_option("--model", cfg.model_file);
  cmd->add_option("--output", cfg.output_file);
  cmd->add_option("--input", cfg.input_file);
  cmd->add_option("--refs", cfg.ref_file);
  cmd->add_option("--attn-dump", cfg.attn_dump_file);
  cmd->add_option("--vocab-dump", cfg.vocab_dump_file);
  cmd->add_option("--max-len", cfg.max_len);
  cmd->add_option("--src-vocab-size", cfg.src_vocab_size);
  cmd->add_option("--tgt-vocab-size", cfg.tgt_vocab_size);
  cmd->add_option("--em-iters", cfg.em_iters);
  cmd->add_option("--dict-max-candidates", cfg.dict_max_candidates);
  cmd->add_option("--dict-min-prob", cfg.dict_min_prob);
  cmd->add_option("--phrase-max-src-len", cfg.phrase_max_src_len);
  cmd->add_option("--phrase-max-tgt-len", cfg.phrase_max_tgt_len);
  cmd->add_option("--top-n-dict", cfg.top_n_dict);
  cmd->add_option("--top-k-phrase", cfg.top_k_phrase);
  cmd->add_option("--common-top-n", cfg.common_top_n);
  cmd->add_flag("--use-dict,!--no-use-dict", cfg.use_dict);
  cmd->add_flag("--use-phrases,!--no-use-phrases", cfg.use_phrases);
  cmd->add_option("--d-emb", cfg.d_emb);
  cmd->add_option("--d-h", cfg.d_h);
  cmd->add_option("--d-s", cfg.d_s);
  cmd->add_option("--d-o", cfg.d_o);
  cmd->add_option("--rho", cfg.rho);
  cmd->add_option("--epsilon", cfg.epsilon);
  cmd->add_option("--batch-size", cfg.batch_size);
  cmd->add_option("--epochs", cfg.epochs);
  cmd->add_option("--seed", cfg.seed);
  cmd->add_option("--freeze-embeddings-after", cfg.freeze_embeddings_after);
  cmd->add_option("--beam", cfg.beam);
  cmd->add_option("--decode-max-len", cfg.decode_max_len);
  cmd->add_flag("--length-norm", cfg.length_norm);
  cmd->add_flag("--bleu-plus-one", cfg.bleu_plus_one);
  cmd->add_flag("--force", cfg.force);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sentence-level target vocabulary NMT pipeline"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  std::string stats_mode = "train";
  std::vector<std::size_t> stats_sweep = {10, 20, 50};
  std::vector<std::size_t> bench_sizes = {2000, 6000, 30000};

  CLI::App* align = app.add_subcommand("align", "word-align the corpus");
  CLI::App* lexicon =
      app.add_subcommand("lexicon", "build the word dictionary");
  CLI::App* phrases =
      app.add_subcommand("phrases", "extract the phrase library");
  CLI::App* stats =
      app.add_subcommand("stats", "coverage and vocabulary-size statistics");
  stats->add_option("--mode", stats_mode)
      ->check(CLI::IsMember({"train", "decode"}));
  stats->add_option("--sweep", stats_sweep, "dictionary top-n values");
  CLI::App* train = app.add_subcommand("train", "train the NMT model");
  CLI::App* decode = app.add_subcommand("decode", "beam-search decode");
  CLI::App* bench =
      app.add_subcommand("bench", "output-layer and training speed");
  bench->add_option("--vocab-sizes", bench_sizes,
                    "restricted sizes to benchmark");
  for (CLI::App* cmd :
       {align, lexicon, phrases, stats, train, decode, bench})
    add_options(cmd, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (align->parsed()) vocnmt::run_align(cfg);
    if (lexicon->parsed()) vocnmt::run_lexicon(cfg);
    if (phrases->parsed()) vocnmt::run_phrases(cfg);
    if (stats->parsed()) vocnmt::run_stats(cfg, stats_mode, stats_sweep);
    if (train->parsed()) vocnmt::run_train(cfg);
    if (decode->parsed()) vocnmt::run_decode(cfg);
    if (bench->parsed()) vocnmt::run_bench(cfg, bench_sizes);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
