#ifndef VOCNMT_MODEL_HPP
#define VOCNMT_MODEL_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "vocnmt/corpus.hpp"

namespace vocnmt {

using Eigen::MatrixXd;
using Eigen::VectorXd;
// Row-major for matrices accessed by row gather (embeddings, output rows).
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ModelConfig {
  int d_emb = 64;
  int d_h = 64;  // per-direction encoder hidden size
  int d_s = 64;  // decoder hidden size
  int d_o = 64;  // intermediate output size
  int src_vocab_size = 0;
  int tgt_vocab_size = 0;
  std::uint64_t src_vocab_hash = 0;
  std::uint64_t tgt_vocab_hash = 0;
};

// z = sigmoid(wz x + uz h + bz), r likewise, hbar = tanh(wh x + uh (r.h) + bh),
// h' = z.h + (1-z).hbar  (update gate at 1 carries the previous state).
struct GruParams {
  MatrixXd wz, uz, wr, ur, wh, uh;
  VectorXd bz, br, bh;

  void resize(int input_dim, int hidden_dim);
};

// score_i = v . tanh(ws s_prev + wh h_i + wy y_prev + b)
struct AttentionParams {
  MatrixXd ws, wh, wy;
  VectorXd b, v;
};

// o_t = tanh(ws s_t + wy y_prev + wc c_t + b)
struct OutputParams {
  MatrixXd ws, wy, wc;
  VectorXd b;
};

struct ParamRef {
  std::string name;
  double* data;
  std::ptrdiff_t size;
  std::ptrdiff_t rows;
  std::ptrdiff_t cols;  // 1 for vectors; row-major slices for sparse rows
};

struct Model {
  ModelConfig cfg;
  RowMatrixXd src_embed;  // |V_src| x d_emb
  RowMatrixXd tgt_embed;  // |V_y| x d_emb
  GruParams enc_fwd, enc_bwd;
  GruParams dec;             // input = [y_prev_embed ; context]
  AttentionParams attn;      // hidden size d_h
  MatrixXd w_init;           // s_0 = tanh(w_init * h_bwd_0 + b_init)
  VectorXd b_init;
  OutputParams out;
  RowMatrixXd w_proj;  // |V_y| x d_o
  VectorXd b_proj;     // |V_y|

  static Model zeros(const ModelConfig& cfg);
  static Model random(const ModelConfig& cfg, std::uint64_t seed,
                      double scale = 0.08);

  // Every parameter tensor, in a fixed order.
  std::vector<ParamRef> param_refs();

  void save(const std::string& path) const;
  static Model load(const std::string& path);
};

}  // namespace vocnmt

#endif
