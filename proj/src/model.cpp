#include "vocnmt/model.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "vocnmt/util.hpp"

namespace vocnmt {

void GruParams::resize(int input_dim, int hidden_dim) {
  wz.setZero(hidden_dim, input_dim);
  wr.setZero(hidden_dim, input_dim);
  wh.setZero(hidden_dim, input_dim);
  uz.setZero(hidden_dim, hidden_dim);
  ur.setZero(hidden_dim, hidden_dim);
  uh.setZero(hidden_dim, hidden_dim);
  bz.setZero(hidden_dim);
  br.setZero(hidden_dim);
  bh.setZero(hidden_dim);
}

Model Model::zeros(const ModelConfig& cfg) {
  if (cfg.src_vocab_size < kNumReserved || cfg.tgt_vocab_size < kNumReserved)
    fail("model vocabulary sizes must include the reserved ids");
  Model m;
  m.cfg = cfg;
  m.src_embed.setZero(cfg.src_vocab_size, cfg.d_emb);
  m.tgt_embed.setZero(cfg.tgt_vocab_size, cfg.d_emb);
  m.enc_fwd.resize(cfg.d_emb, cfg.d_h);
  m.enc_bwd.resize(cfg.d_emb, cfg.d_h);
  m.dec.resize(cfg.d_emb + 2 * cfg.d_h, cfg.d_s);
  m.attn.ws.setZero(cfg.d_h, cfg.d_s);
  m.attn.wh.setZero(cfg.d_h, 2 * cfg.d_h);
  m.attn.wy.setZero(cfg.d_h, cfg.d_emb);
  m.attn.b.setZero(cfg.d_h);
  m.attn.v.setZero(cfg.d_h);
  m.w_init.setZero(cfg.d_s, cfg.d_h);
  m.b_init.setZero(cfg.d_s);
  m.out.ws.setZero(cfg.d_o, cfg.d_s);
  m.out.wy.setZero(cfg.d_o, cfg.d_emb);
  m.out.wc.setZero(cfg.d_o, 2 * cfg.d_h);
  m.out.b.setZero(cfg.d_o);
  m.w_proj.setZero(cfg.tgt_vocab_size, cfg.d_o);
  m.b_proj.setZero(cfg.tgt_vocab_size);
  return m;
}

Model Model::random(const ModelConfig& cfg, std::uint64_t seed, double scale) {
  Model m = zeros(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (auto& ref : m.param_refs())
    for (std::ptrdiff_t i = 0; i < ref.size; ++i) ref.data[i] = dist(rng);
  return m;
}

std::vector<ParamRef> Model::param_refs() {
  std::vector<ParamRef> refs;
  auto add = [&](std::string name, double* data, std::ptrdiff_t rows,
                 std::ptrdiff_t cols) {
    refs.push_back({std::move(name), data, rows * cols, rows, cols});
  };
  add("src_embed", src_embed.data(), src_embed.rows(), src_embed.cols());
  add("tgt_embed", tgt_embed.data(), tgt_embed.rows(), tgt_embed.cols());
  auto add_gru = [&](const std::string& prefix, GruParams& g) {
    for (auto [suffix, mat] :
         {std::pair{".wz", &g.wz}, {".wr", &g.wr}, {".wh", &g.wh},
          {".uz", &g.uz}, {".ur", &g.ur}, {".uh", &g.uh}})
      add(prefix + suffix, mat->data(), mat->rows(), mat->cols());
    for (auto [suffix, vec] :
         {std::pair{".bz", &g.bz}, {".br", &g.br}, {".bh", &g.bh}})
      add(prefix + suffix, vec->data(), vec->size(), 1);
  };
  add_gru("enc_fwd", enc_fwd);
  add_gru("enc_bwd", enc_bwd);
  add_gru("dec", dec);
  add("attn.ws", attn.ws.data(), attn.ws.rows(), attn.ws.cols());
  add("attn.wh", attn.wh.data(), attn.wh.rows(), attn.wh.cols());
  add("attn.wy", attn.wy.data(), attn.wy.rows(), attn.wy.cols());
  add("attn.b", attn.b.data(), attn.b.size(), 1);
  add("attn.v", attn.v.data(), attn.v.size(), 1);
  add("w_init", w_init.data(), w_init.rows(), w_init.cols());
  add("b_init", b_init.data(), b_init.size(), 1);
  add("out.ws", out.ws.data(), out.ws.rows(), out.ws.cols());
  add("out.wy", out.wy.data(), out.wy.rows(), out.wy.cols());
  add("out.wc", out.wc.data(), out.wc.rows(), out.wc.cols());
  add("out.b", out.b.data(), out.b.size(), 1);
  add("w_proj", w_proj.data(), w_proj.rows(), w_proj.cols());
  add("b_proj", b_proj.data(), b_proj.size(), 1);
  return refs;
}

void Model::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) fail("cannot write model checkpoint ", path);
  os << "vocnmt-model 1\n";
  os << "d_emb " << cfg.d_emb << "\nd_h " << cfg.d_h << "\nd_s " << cfg.d_s
     << "\nd_o " << cfg.d_o << "\nsrc_vocab_size " << cfg.src_vocab_size
     << "\ntgt_vocab_size " << cfg.tgt_vocab_size << "\nsrc_vocab_hash "
     << hex64(cfg.src_vocab_hash) << "\ntgt_vocab_hash "
     << hex64(cfg.tgt_vocab_hash) << "\n";
  char buf[64];
  for (auto& ref : const_cast<Model*>(this)->param_refs()) {
    os << "tensor " << ref.name << ' ' << ref.rows << ' ' << ref.cols << '\n';
    for (std::ptrdiff_t i = 0; i < ref.size; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", ref.data[i]);
      os << buf << (i + 1 == ref.size ? '\n' : ' ');
    }
  }
}

Model Model::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail("cannot read model checkpoint ", path);
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "vocnmt-model" || version != 1)
    fail("unrecognized checkpoint format in ", path);
  ModelConfig cfg;
  std::string key, hash;
  is >> key >> cfg.d_emb >> key >> cfg.d_h >> key >> cfg.d_s >> key >>
      cfg.d_o >> key >> cfg.src_vocab_size >> key >> cfg.tgt_vocab_size;
  is >> key >> hash;
  cfg.src_vocab_hash = std::stoull(hash, nullptr, 16);
  is >> key >> hash;
  cfg.tgt_vocab_hash = std::stoull(hash, nullptr, 16);
  Model m = zeros(cfg);
  for (auto& ref : m.param_refs()) {
    std::string tag, name;
    std::ptrdiff_t rows = 0, cols = 0;
    is >> tag >> name >> rows >> cols;
    if (tag != "tensor" || name != ref.name || rows != ref.rows ||
        cols != ref.cols)
      fail("checkpoint ", path, ": expected tensor ", ref.name, " ", ref.rows,
           "x", ref.cols, ", got ", name, " ", rows, "x", cols);
    for (std::ptrdiff_t i = 0; i < ref.size; ++i) is >> ref.data[i];
  }
  if (!is) fail("truncated checkpoint ", path);
  return m;
}

}  // namespace vocnmt
