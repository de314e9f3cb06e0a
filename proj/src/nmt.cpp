#include "vocnmt/nmt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>

#include "vocnmt/util.hpp"

namespace vocnmt {

namespace {

VectorXd sigmoid(const VectorXd& v) {
  return (1.0 / (1.0 + (-v.array()).exp())).matrix();
}

// Max-subtracted softmax, in place.
void softmax_inplace(VectorXd& v) {
  double mx = v.maxCoeff();
  v = (v.array() - mx).exp().matrix();
  v /= v.sum();
}

VectorXd gru_forward(const GruParams& p, const VectorXd& x,
                     const VectorXd& h_prev, GruCache* cache) {
  VectorXd z = sigmoid(p.wz * x + p.uz * h_prev + p.bz);
  VectorXd r = sigmoid(p.wr * x + p.ur * h_prev + p.br);
  VectorXd hbar =
      (p.wh * x + p.uh * (r.cwiseProduct(h_prev)) + p.bh).array().tanh().matrix();
  VectorXd h = z.cwiseProduct(h_prev) + (1.0 - z.array()).matrix().cwiseProduct(hbar);
  if (cache) *cache = {x, h_prev, z, r, hbar, h};
  return h;
}

// dx and dh_prev are accumulated into.
void gru_backward(const GruParams& p, const GruCache& c, const VectorXd& dh,
                  GruParams& g, VectorXd& dx, VectorXd& dh_prev) {
  VectorXd dz = dh.cwiseProduct(c.h_prev - c.hbar);
  VectorXd dhbar = dh.cwiseProduct((1.0 - c.z.array()).matrix());
  dh_prev += dh.cwiseProduct(c.z);

  VectorXd dhbar_pre =
      dhbar.cwiseProduct((1.0 - c.hbar.array().square()).matrix());
  VectorXd rh = c.r.cwiseProduct(c.h_prev);
  g.wh.noalias() += dhbar_pre * c.x.transpose();
  g.uh.noalias() += dhbar_pre * rh.transpose();
  g.bh += dhbar_pre;
  VectorXd drh = p.uh.transpose() * dhbar_pre;
  VectorXd dr = drh.cwiseProduct(c.h_prev);
  dh_prev += drh.cwiseProduct(c.r);
  dx.noalias() += p.wh.transpose() * dhbar_pre;

  VectorXd dz_pre =
      dz.cwiseProduct(c.z.cwiseProduct((1.0 - c.z.array()).matrix()));
  g.wz.noalias() += dz_pre * c.x.transpose();
  g.uz.noalias() += dz_pre * c.h_prev.transpose();
  g.bz += dz_pre;
  dh_prev.noalias() += p.uz.transpose() * dz_pre;
  dx.noalias() += p.wz.transpose() * dz_pre;

  VectorXd dr_pre =
      dr.cwiseProduct(c.r.cwiseProduct((1.0 - c.r.array()).matrix()));
  g.wr.noalias() += dr_pre * c.x.transpose();
  g.ur.noalias() += dr_pre * c.h_prev.transpose();
  g.br += dr_pre;
  dh_prev.noalias() += p.ur.transpose() * dr_pre;
  dx.noalias() += p.wr.transpose() * dr_pre;
}

// alpha and context for one step, given the precomputed attn.wh * h.
AttendResult attend_pre(const Model& m, const VectorXd& s_prev,
                        const MatrixXd& h, const MatrixXd& attn_h,
                        const VectorXd& y_prev_embed, MatrixXd* pre_out) {
  Eigen::Index l = h.cols();
  VectorXd base = m.attn.ws * s_prev + m.attn.wy * y_prev_embed + m.attn.b;
  MatrixXd pre = (attn_h.colwise() + base).array().tanh().matrix();
  VectorXd scores = pre.transpose() * m.attn.v;
  softmax_inplace(scores);
  AttendResult out;
  out.alpha = scores;
  out.context = h * scores;
  if (pre_out) *pre_out = std::move(pre);
  (void)l;
  return out;
}

VectorXd restricted_logits(const Model& m, const VectorXd& o,
                           const SentenceVocab* restricted) {
  if (!restricted) return m.w_proj * o + m.b_proj;
  VectorXd logits(restricted->size());
  for (std::size_t k = 0; k < restricted->size(); ++k) {
    WordId gid = restricted->global_ids[k];
    logits[k] = m.w_proj.row(gid).dot(o) + m.b_proj[gid];
  }
  return logits;
}

void check_restriction(const Model& m, const SentenceVocab* restricted) {
  if (!restricted) return;
  if (restricted->global_ids.empty())
    fail("restricted vocabulary is empty");
  if (!restricted->contains(kEosId))
    fail("restricted vocabulary lacks EOS; decoding could not terminate");
  if (restricted->global_ids.back() >= m.cfg.tgt_vocab_size)
    fail("restricted vocabulary id ", restricted->global_ids.back(),
         " exceeds model target vocabulary ", m.cfg.tgt_vocab_size);
}

std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  return fnv1a(strcat(seed, ":", epoch));
}

}  // namespace

EncodeCache encode_with_cache(const Model& model, const IdSequence& x) {
  int l = static_cast<int>(x.size());
  int d_h = model.cfg.d_h;
  for (WordId id : x)
    if (id < 0 || id >= model.cfg.src_vocab_size)
      fail("source id ", id, " out of range for model (",
           model.cfg.src_vocab_size, ")");
  EncodeCache cache;
  cache.fwd.resize(l);
  cache.bwd.resize(l);
  cache.states.h.resize(2 * d_h, l);

  VectorXd h = VectorXd::Zero(d_h);
  for (int i = 0; i < l; ++i) {
    VectorXd e = model.src_embed.row(x[i]).transpose();
    h = gru_forward(model.enc_fwd, e, h, &cache.fwd[i]);
    cache.states.h.col(i).tail(d_h) = h;
  }
  h.setZero();
  for (int i = l - 1; i >= 0; --i) {
    VectorXd e = model.src_embed.row(x[i]).transpose();
    h = gru_forward(model.enc_bwd, e, h, &cache.bwd[i]);
    cache.states.h.col(i).head(d_h) = h;
  }
  return cache;
}

EncoderStates encode(const Model& model, const IdSequence& x) {
  return encode_with_cache(model, x).states;
}

VectorXd initial_state(const Model& model, const EncoderStates& h) {
  VectorXd h_bwd0 = h.h.col(0).head(model.cfg.d_h);
  return (model.w_init * h_bwd0 + model.b_init).array().tanh().matrix();
}

AttendResult attend(const Model& model, const VectorXd& s_prev,
                    const EncoderStates& h, const VectorXd& y_prev_embed) {
  MatrixXd attn_h = model.attn.wh * h.h;
  return attend_pre(model, s_prev, h.h, attn_h, y_prev_embed, nullptr);
}

VectorXd decode_step(const Model& model, const VectorXd& s_prev,
                     WordId y_prev, const VectorXd& context) {
  VectorXd e = model.tgt_embed.row(y_prev).transpose();
  VectorXd input(e.size() + context.size());
  input << e, context;
  return gru_forward(model.dec, input, s_prev, nullptr);
}

VectorXd output_distribution(const Model& model, const VectorXd& s,
                             WordId y_prev, const VectorXd& context,
                             const SentenceVocab* restricted) {
  check_restriction(model, restricted);
  VectorXd e = model.tgt_embed.row(y_prev).transpose();
  VectorXd o =
      (model.out.ws * s + model.out.wy * e + model.out.wc * context +
       model.out.b)
          .array()
          .tanh()
          .matrix();
  VectorXd logits = restricted_logits(model, o, restricted);
  softmax_inplace(logits);
  return logits;
}

ForwardCache sentence_forward(const Model& model, const SentencePair& pair,
                              const SentenceVocab& vocab) {
  check_restriction(model, &vocab);
  ForwardCache cache;
  cache.enc = encode_with_cache(model, pair.source);
  const MatrixXd& h = cache.enc.states.h;
  cache.attn_h = model.attn.wh * h;
  cache.s0 = initial_state(model, cache.enc.states);

  std::size_t m = pair.target.size();
  cache.steps.resize(m + 1);
  const VectorXd* s_prev = &cache.s0;
  for (std::size_t t = 0; t <= m; ++t) {
    StepCache& st = cache.steps[t];
    st.y_prev = t == 0 ? kBosId : pair.target[t - 1];
    WordId gold = t < m ? pair.target[t] : kEosId;
    int gold_local = vocab.local(gold);
    if (gold_local < 0)
      fail("reference id ", gold, " missing from the batch vocabulary (pair ",
           pair.pair_id, ")");
    st.gold_local = gold_local;
    st.y_prev_embed = model.tgt_embed.row(st.y_prev).transpose();

    AttendResult att = attend_pre(model, *s_prev, h, cache.attn_h,
                                  st.y_prev_embed, &st.attn_pre);
    st.alpha = std::move(att.alpha);
    st.context = std::move(att.context);

    VectorXd input(st.y_prev_embed.size() + st.context.size());
    input << st.y_prev_embed, st.context;
    gru_forward(model.dec, input, *s_prev, &st.dec);

    st.o = (model.out.ws * st.dec.h + model.out.wy * st.y_prev_embed +
            model.out.wc * st.context + model.out.b)
               .array()
               .tanh()
               .matrix();
    st.probs = restricted_logits(model, st.o, &vocab);
    softmax_inplace(st.probs);
    cache.loss -= std::log(st.probs[gold_local]);
    s_prev = &st.dec.h;
  }
  return cache;
}

double sentence_loss(const Model& model, const SentencePair& pair,
                     const SentenceVocab& vocab) {
  return sentence_forward(model, pair, vocab).loss;
}

void sentence_backward(const Model& model, const SentencePair& pair,
                       const SentenceVocab& vocab, const ForwardCache& cache,
                       Model& grads) {
  int d_h = model.cfg.d_h;
  int d_emb = model.cfg.d_emb;
  const MatrixXd& h = cache.enc.states.h;
  Eigen::Index l = h.cols();

  MatrixXd dh_enc = MatrixXd::Zero(2 * d_h, l);
  MatrixXd d_attn_h = MatrixXd::Zero(d_h, l);
  VectorXd ds_next = VectorXd::Zero(model.cfg.d_s);

  for (int t = static_cast<int>(cache.steps.size()) - 1; t >= 0; --t) {
    const StepCache& st = cache.steps[t];
    const VectorXd& s_prev = t == 0 ? cache.s0 : cache.steps[t - 1].dec.h;

    // softmax + cross entropy
    VectorXd dlogit = st.probs;
    dlogit[st.gold_local] -= 1.0;
    VectorXd do_vec = VectorXd::Zero(model.cfg.d_o);
    for (int k = 0; k < dlogit.size(); ++k) {
      WordId gid = vocab.global_ids[k];
      grads.w_proj.row(gid).noalias() += dlogit[k] * st.o.transpose();
      grads.b_proj[gid] += dlogit[k];
      do_vec.noalias() += dlogit[k] * model.w_proj.row(gid).transpose();
    }
    VectorXd do_pre = do_vec.cwiseProduct(
        (1.0 - st.o.array().square()).matrix());
    grads.out.ws.noalias() += do_pre * st.dec.h.transpose();
    grads.out.wy.noalias() += do_pre * st.y_prev_embed.transpose();
    grads.out.wc.noalias() += do_pre * st.context.transpose();
    grads.out.b += do_pre;

    VectorXd ds = ds_next + model.out.ws.transpose() * do_pre;
    VectorXd dy_e = model.out.wy.transpose() * do_pre;
    VectorXd dc = model.out.wc.transpose() * do_pre;

    // decoder cell
    VectorXd dx = VectorXd::Zero(d_emb + 2 * d_h);
    VectorXd ds_prev = VectorXd::Zero(model.cfg.d_s);
    gru_backward(model.dec, st.dec, ds, grads.dec, dx, ds_prev);
    dy_e += dx.head(d_emb);
    dc += dx.tail(2 * d_h);

    // attention: context = h * alpha
    VectorXd dalpha = h.transpose() * dc;
    dh_enc.noalias() += dc * st.alpha.transpose();
    double inner = st.alpha.dot(dalpha);
    VectorXd dscore =
        st.alpha.cwiseProduct((dalpha.array() - inner).matrix());
    grads.attn.v.noalias() += st.attn_pre * dscore;
    MatrixXd dz = (model.attn.v * dscore.transpose()).cwiseProduct(
        (1.0 - st.attn_pre.array().square()).matrix());
    VectorXd dz_sum = dz.rowwise().sum();
    d_attn_h += dz;
    grads.attn.ws.noalias() += dz_sum * s_prev.transpose();
    grads.attn.wy.noalias() += dz_sum * st.y_prev_embed.transpose();
    grads.attn.b += dz_sum;
    ds_prev.noalias() += model.attn.ws.transpose() * dz_sum;
    dy_e.noalias() += model.attn.wy.transpose() * dz_sum;

    grads.tgt_embed.row(st.y_prev) += dy_e.transpose();
    ds_next = std::move(ds_prev);
  }

  // initial state map
  VectorXd ds0_pre =
      ds_next.cwiseProduct((1.0 - cache.s0.array().square()).matrix());
  VectorXd h_bwd0 = h.col(0).head(d_h);
  grads.w_init.noalias() += ds0_pre * h_bwd0.transpose();
  grads.b_init += ds0_pre;
  dh_enc.col(0).head(d_h).noalias() += model.w_init.transpose() * ds0_pre;

  // shared attention projection of the encoder states
  grads.attn.wh.noalias() += d_attn_h * h.transpose();
  dh_enc.noalias() += model.attn.wh.transpose() * d_attn_h;

  // encoder chains
  VectorXd carry = VectorXd::Zero(d_h);
  for (int i = static_cast<int>(l) - 1; i >= 0; --i) {
    VectorXd dh_i = dh_enc.col(i).tail(d_h) + carry;
    VectorXd dx = VectorXd::Zero(d_emb);
    carry.setZero();
    gru_backward(model.enc_fwd, cache.enc.fwd[i], dh_i, grads.enc_fwd, dx,
                 carry);
    grads.src_embed.row(pair.source[i]) += dx.transpose();
  }
  carry.setZero();
  for (int i = 0; i < static_cast<int>(l); ++i) {
    VectorXd dh_i = dh_enc.col(i).head(d_h) + carry;
    VectorXd dx = VectorXd::Zero(d_emb);
    carry.setZero();
    gru_backward(model.enc_bwd, cache.enc.bwd[i], dh_i, grads.enc_bwd, dx,
                 carry);
    grads.src_embed.row(pair.source[i]) += dx.transpose();
  }
}

AdaDelta::AdaDelta(Model& model, double rho, double epsilon)
    : rho_(rho), epsilon_(epsilon) {
  for (auto& ref : model.param_refs()) {
    acc_grad_.push_back(VectorXd::Zero(ref.size));
    acc_delta_.push_back(VectorXd::Zero(ref.size));
  }
}

void AdaDelta::update(Model& model, Model& grads,
                      const std::vector<WordId>& touched_rows,
                      bool update_embeddings) {
  auto params = model.param_refs();
  auto gradient = grads.param_refs();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& ref = params[p];
    double* theta = ref.data;
    const double* g = gradient[p].data;
    double* eg = acc_grad_[p].data();
    double* ex = acc_delta_[p].data();
    auto step = [&](std::ptrdiff_t i) {
      double gi = g[i];
      eg[i] = rho_ * eg[i] + (1.0 - rho_) * gi * gi;
      double dx = -std::sqrt((ex[i] + epsilon_) / (eg[i] + epsilon_)) * gi;
      ex[i] = rho_ * ex[i] + (1.0 - rho_) * dx * dx;
      theta[i] += dx;
    };
    bool is_embedding = ref.name == "src_embed" || ref.name == "tgt_embed";
    if (is_embedding && !update_embeddings) continue;
    bool row_sparse = ref.name == "tgt_embed" || ref.name == "w_proj" ||
                      ref.name == "b_proj";
    if (row_sparse) {
      for (WordId row : touched_rows) {
        std::ptrdiff_t begin = static_cast<std::ptrdiff_t>(row) * ref.cols;
        for (std::ptrdiff_t i = begin; i < begin + ref.cols; ++i) step(i);
      }
    } else {
      for (std::ptrdiff_t i = 0; i < ref.size; ++i) step(i);
    }
  }
}

std::vector<EpochLog> train(Model& model,
                            const std::vector<SentencePair>& pairs,
                            const VocabBuilderConfig& vocab_config,
                            const TrainConfig& config,
                            const EpochCallback& on_epoch) {
  if (pairs.empty()) fail("training requires a non-empty corpus");
  AdaDelta optimizer(model, config.rho, config.epsilon);
  Model grads = Model::zeros(model.cfg);
  std::vector<EpochLog> logs;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto start = std::chrono::steady_clock::now();
    auto batches = make_batches(pairs.size(), config.batch_size,
                                epoch_seed(config.seed, epoch));
    double loss_sum = 0.0;
    std::int64_t token_sum = 0;
    double batch_vocab_sum = 0.0;
    bool update_embeddings = config.freeze_embeddings_after < 0 ||
                             epoch <= config.freeze_embeddings_after;

    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      std::vector<SentenceVocab> member_vocabs;
      member_vocabs.reserve(batches[bi].size());
      for (std::size_t idx : batches[bi]) {
        member_vocabs.push_back(build_train_vocab(
            pairs[idx].source, pairs[idx].target, vocab_config));
      }
      std::vector<const SentenceVocab*> ptrs;
      for (const auto& v : member_vocabs) ptrs.push_back(&v);
      BatchVocab batch_vocab = build_batch_vocab(ptrs);
      if (config.force_batch_vocab_size > batch_vocab.size()) {
        // pad with the smallest absent ids (timing experiments)
        std::map<WordId, std::uint8_t> tagged;
        for (std::size_t k = 0; k < batch_vocab.global_ids.size(); ++k)
          tagged[batch_vocab.global_ids[k]] = batch_vocab.provenance[k];
        for (WordId id = 0; id < model.cfg.tgt_vocab_size &&
                            tagged.size() < config.force_batch_vocab_size;
             ++id)
          tagged.emplace(id, 0);
        BatchVocab padded;
        for (const auto& [id, tag] : tagged) {
          padded.local_of_global.emplace(
              id, static_cast<int>(padded.global_ids.size()));
          padded.global_ids.push_back(id);
          padded.provenance.push_back(tag);
        }
        batch_vocab = std::move(padded);
      }
      batch_vocab_sum += static_cast<double>(batch_vocab.size());

      double batch_loss = 0.0;
      for (std::size_t idx : batches[bi]) {
        ForwardCache cache = sentence_forward(model, pairs[idx], batch_vocab);
        batch_loss += cache.loss;
        token_sum += static_cast<std::int64_t>(pairs[idx].target.size()) + 1;
        sentence_backward(model, pairs[idx], batch_vocab, cache, grads);
      }
      if (!std::isfinite(batch_loss))
        fail("training diverged at epoch ", epoch, " batch ", bi);
      loss_sum += batch_loss;

      optimizer.update(model, grads, batch_vocab.global_ids,
                       update_embeddings);

      // clear only what the batch touched
      for (auto& ref : grads.param_refs()) {
        bool row_sparse = ref.name == "tgt_embed" || ref.name == "w_proj" ||
                          ref.name == "b_proj";
        if (row_sparse) {
          for (WordId row : batch_vocab.global_ids)
            std::fill(ref.data + static_cast<std::ptrdiff_t>(row) * ref.cols,
                      ref.data + (static_cast<std::ptrdiff_t>(row) + 1) *
                                     ref.cols,
                      0.0);
        } else {
          std::fill(ref.data, ref.data + ref.size, 0.0);
        }
      }
    }

    auto elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    EpochLog log;
    log.epoch = epoch;
    log.mean_loss = loss_sum / static_cast<double>(token_sum);
    log.tokens_per_sec = static_cast<double>(token_sum) / elapsed;
    log.avg_batch_vocab =
        batch_vocab_sum / static_cast<double>(batches.size());
    if (config.verbose)
      std::cerr << "epoch " << log.epoch << " loss " << log.mean_loss
                << " tokens/sec " << log.tokens_per_sec << " avg_batch_vocab "
                << log.avg_batch_vocab << '\n';
    logs.push_back(log);
    if (on_epoch) on_epoch(model, log);
  }
  return logs;
}

double gradient_check(Model& model, const SentencePair& pair,
                      const SentenceVocab& vocab,
                      const std::function<void(Model&)>& corrupt) {
  Model grads = Model::zeros(model.cfg);
  ForwardCache cache = sentence_forward(model, pair, vocab);
  sentence_backward(model, pair, vocab, cache, grads);
  if (corrupt) corrupt(grads);

  constexpr double kStep = 1e-5;
  double max_rel = 0.0;
  auto params = model.param_refs();
  auto analytic = grads.param_refs();
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::ptrdiff_t i = 0; i < params[p].size; ++i) {
      double saved = params[p].data[i];
      params[p].data[i] = saved + kStep;
      double up = sentence_loss(model, pair, vocab);
      params[p].data[i] = saved - kStep;
      double down = sentence_loss(model, pair, vocab);
      params[p].data[i] = saved;
      double numeric = (up - down) / (2.0 * kStep);
      double a = analytic[p].data[i];
      double rel = std::abs(a - numeric) /
                   std::max(1e-2, std::abs(a) + std::abs(numeric));
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

Decoder::Decoder(const Model& model, const IdSequence& x) : model_(model) {
  enc_ = encode(model, x);
  attn_h_ = model.attn.wh * enc_.h;
  s0_ = initial_state(model, enc_);
}

Decoder::Step Decoder::step(const VectorXd& s_prev, WordId y_prev,
                            const SentenceVocab* restricted) const {
  check_restriction(model_, restricted);
  VectorXd e = model_.tgt_embed.row(y_prev).transpose();
  AttendResult att = attend_pre(model_, s_prev, enc_.h, attn_h_, e, nullptr);
  VectorXd input(e.size() + att.context.size());
  input << e, att.context;
  Step out;
  out.s = gru_forward(model_.dec, input, s_prev, nullptr);
  out.alpha = std::move(att.alpha);
  VectorXd o = (model_.out.ws * out.s + model_.out.wy * e +
                model_.out.wc * att.context + model_.out.b)
                   .array()
                   .tanh()
                   .matrix();
  VectorXd logits = restricted_logits(model_, o, restricted);
  double mx = logits.maxCoeff();
  double lse = mx + std::log((logits.array() - mx).exp().sum());
  out.log_probs = (logits.array() - lse).matrix();
  return out;
}

}  // namespace vocnmt
