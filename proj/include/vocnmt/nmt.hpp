#ifndef VOCNMT_NMT_HPP
#define VOCNMT_NMT_HPP

#include <functional>
#include <optional>
#include <vector>

#include "vocnmt/model.hpp"
#include "vocnmt/vocab.hpp"

namespace vocnmt {

// h_i = [h_bwd_i ; h_fwd_i], column i per source position.
struct EncoderStates {
  MatrixXd h;  // (2*d_h) x l
};

struct GruCache {
  VectorXd x, h_prev, z, r, hbar, h;
};

struct EncodeCache {
  std::vector<GruCache> fwd, bwd;
  EncoderStates states;
};

struct AttendResult {
  VectorXd alpha;    // l, sums to 1
  VectorXd context;  // 2*d_h
};

EncoderStates encode(const Model& model, const IdSequence& x);
EncodeCache encode_with_cache(const Model& model, const IdSequence& x);

// Initial decoder state: tanh affine map of the backward encoder state at
// position 0.
VectorXd initial_state(const Model& model, const EncoderStates& h);

AttendResult attend(const Model& model, const VectorXd& s_prev,
                    const EncoderStates& h, const VectorXd& y_prev_embed);

VectorXd decode_step(const Model& model, const VectorXd& s_prev,
                     WordId y_prev, const VectorXd& context);

// Softmax over the restricted ids only; nullptr means the full vocabulary.
// The result is indexed by local position within the restriction.
VectorXd output_distribution(const Model& model, const VectorXd& s,
                             WordId y_prev, const VectorXd& context,
                             const SentenceVocab* restricted);

struct StepCache {
  WordId y_prev;
  VectorXd y_prev_embed;
  MatrixXd attn_pre;  // d_h x l, pre-scoring tanh activations
  VectorXd alpha;
  VectorXd context;
  GruCache dec;
  VectorXd o;       // post-tanh intermediate output
  VectorXd probs;   // over the restriction
  int gold_local;
};

struct ForwardCache {
  EncodeCache enc;
  MatrixXd attn_h;  // attn.wh * h, shared across steps
  VectorXd s0;
  std::vector<StepCache> steps;
  double loss = 0.0;
};

// Teacher-forced NLL with BOS prepended and EOS appended to the target.
double sentence_loss(const Model& model, const SentencePair& pair,
                     const SentenceVocab& vocab);
ForwardCache sentence_forward(const Model& model, const SentencePair& pair,
                              const SentenceVocab& vocab);

// Accumulates d(loss)/d(params) into grads (a zero- or previously-filled
// Model of the same shape).
void sentence_backward(const Model& model, const SentencePair& pair,
                       const SentenceVocab& vocab, const ForwardCache& cache,
                       Model& grads);

struct TrainConfig {
  double rho = 0.95;
  double epsilon = 1e-6;
  std::size_t batch_size = 80;
  int epochs = 10;
  std::uint64_t seed = 1;
  int freeze_embeddings_after = -1;  // 1-based epoch; -1 = never
  // Pads every batch vocabulary up to this size (speed experiments only).
  std::size_t force_batch_vocab_size = 0;
  bool verbose = false;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double tokens_per_sec = 0.0;
  double avg_batch_vocab = 0.0;
};

class AdaDelta {
 public:
  AdaDelta(Model& model, double rho, double epsilon);

  // touched_rows limits updates (and accumulator decay) of w_proj, b_proj
  // and tgt_embed to those rows; embeddings are skipped entirely when
  // update_embeddings is false.
  void update(Model& model, Model& grads, const std::vector<WordId>& touched_rows,
              bool update_embeddings);

 private:
  double rho_, epsilon_;
  std::vector<VectorXd> acc_grad_, acc_delta_;
};

using EpochCallback =
    std::function<void(const Model& model, const EpochLog& log)>;

std::vector<EpochLog> train(Model& model, const std::vector<SentencePair>& pairs,
                            const VocabBuilderConfig& vocab_config,
                            const TrainConfig& config,
                            const EpochCallback& on_epoch = nullptr);

// Max relative error between analytic and central-difference gradients
// (step 1e-5) over every parameter. corrupt, when given, mutates the
// analytic gradients first (negative-control hook).
double gradient_check(Model& model, const SentencePair& pair,
                      const SentenceVocab& vocab,
                      const std::function<void(Model&)>& corrupt = nullptr);

// Per-sentence incremental decoding over a fixed source sentence.
class Decoder {
 public:
  Decoder(const Model& model, const IdSequence& x);

  struct Step {
    VectorXd s;
    VectorXd alpha;
    VectorXd log_probs;  // over the restriction's local indexes
  };

  const VectorXd& init_state() const { return s0_; }
  Step step(const VectorXd& s_prev, WordId y_prev,
            const SentenceVocab* restricted) const;

 private:
  const Model& model_;
  EncoderStates enc_;
  MatrixXd attn_h_;
  VectorXd s0_;
};

}  // namespace vocnmt

#endif
