#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sentseq/context.hpp"
#include "sentseq/crf.hpp"
#include "sentseq/encoder.hpp"
#include "sentseq/vocab.hpp"

namespace sentseq {

struct ModelConfig {
  EncoderConfig encoder;
  ContextConfig context;
  bool use_crf = true;
  bool emission_softmax = false;
  bool crf_boundary = false;
  double dropout = 0.5;
  double beta = 0.01;        // weight of the expectation-linear penalty
  bool use_el_reg = true;
  int emb_dim = 0;           // 0: adopt the embedding file's dim
  bool emb_trainable = false;
  int num_labels = 0;        // set from data

  void validate() const {
    encoder.validate();
    context.validate();
    if (dropout < 0 || dropout >= 1) throw ConfigError("reg.dropout must be in [0, 1)");
    if (beta < 0) throw ConfigError("reg.beta must be >= 0");
    if (emb_dim < 0) throw ConfigError("emb.dim must be >= 0");
    if (num_labels < 2) throw ConfigError("model needs at least 2 labels");
  }

  // Width of the vector entering the feed-forward head.
  int head_input_dim() const { return 2 * context.d_hd; }

  // Trainable parameter count (frozen embeddings excluded); the config
  // arithmetic behind it is spelled out in the README.
  long param_count(int vocab_size) const;
};

// Sentences as vocab indices; built once per corpus before training.
struct EncodedAbstract {
  const Abstract* source = nullptr;
  std::vector<std::vector<int>> token_ids;
  std::vector<int> labels;
};

std::vector<EncodedAbstract> encode_corpus(const Corpus& corpus, const Vocabulary& vocab);

struct ForwardMode {
  bool train = false;
  Rng* dropout_rng = nullptr;  // required when train and dropout > 0
};

template <typename T>
class ModelT {
 public:
  ModelConfig cfg;

  static ModelT init(const ModelConfig& cfg, int vocab_size, std::uint64_t seed) {
    cfg.validate();
    ModelT m;
    m.cfg = cfg;
    Rng rng(splitmix64(seed ^ 0x6d0de1ULL));
    m.build(vocab_size, rng);
    return m;
  }

 private:
  void build(int vocab_size, Rng& rng);

 public:
  // Named tensors in declaration order; the checkpoint format and Adam both
  // iterate this list.
  std::vector<std::pair<std::string, TensorT<T>>> params;

  TensorT<T> embedding;  // {emb_dim, |V|}; also present in params

  // Per-sentence emission score vectors ({l} each) for one abstract.
  std::vector<TensorT<T>> forward(GraphT<T>& g,
                                  const std::vector<std::vector<int>>& token_ids,
                                  const ForwardMode& mode) const;

  // Training objective for one abstract given its emissions.
  TensorT<T> loss(GraphT<T>& g, const std::vector<TensorT<T>>& emissions,
                  const std::vector<int>& gold) const;

  // Viterbi (or per-sentence argmax without the CRF) over raw values.
  std::vector<int> decode(const std::vector<TensorT<T>>& emissions) const;

  const TensorT<T>& transitions() const { return trans_; }
  CrfBoundaryT<T> boundary() const { return boundary_; }

  std::vector<std::pair<std::string, TensorT<T>>> trainable_params() const {
    std::vector<std::pair<std::string, TensorT<T>>> out;
    for (const auto& [name, p] : params)
      if (p.requires_grad()) out.emplace_back(name, p);
    return out;
  }

  void zero_grads() {
    for (auto& [name, p] : params) p.zero_grad();
  }

 private:
  TensorT<T> add_param(const std::string& name, TensorT<T> t) {
    params.emplace_back(name, t);
    return t;
  }

  TensorT<T> dropout(GraphT<T>& g, const TensorT<T>& x, const ForwardMode& mode) const {
    if (cfg.dropout <= 0) return x;
    if (!mode.train) return g.scale(x, static_cast<T>(1.0 - cfg.dropout));
    if (!mode.dropout_rng)
      throw ContractError("training forward pass needs a dropout rng");
    std::vector<T> mask(x.numel());
    for (auto& v : mask)
      v = mode.dropout_rng->bernoulli(cfg.dropout) ? T(0) : T(1);
    return g.mul(x, TensorT<T>::of(x.shape(), std::move(mask)));
  }

  BiRnnParamsT<T> enc_rnn_;
  CnnParamsT<T> enc_cnn_;
  AttentionParamsT<T> attn_;
  ContextParamsT<T> ctx_;
  HeadParamsT<T> head_;
  TensorT<T> trans_;
  CrfBoundaryT<T> boundary_;
};

template <typename T>
void ModelT<T>::build(int vocab_size, Rng& rng) {
  if (cfg.emb_dim < 1) throw ConfigError("emb.dim must be set before building the model");
  // Embedding: PAD column zero, the rest uniform(-0.25, 0.25). Pretrained
  // values may overwrite this afterwards.
  {
    std::vector<T> vals(static_cast<std::size_t>(cfg.emb_dim) * vocab_size, T(0));
    Rng base = rng.fork(1);
    for (int c = kUnkIndex; c < vocab_size; ++c) {
      Rng col = base.fork(static_cast<std::uint64_t>(c));
      for (int i = 0; i < cfg.emb_dim; ++i)
        vals[static_cast<std::size_t>(i) * vocab_size + c] =
            static_cast<T>(col.uniform(-0.25, 0.25));
    }
    embedding = add_param("embed.w", TensorT<T>::of({cfg.emb_dim, vocab_size},
                                                    std::move(vals), cfg.emb_trainable));
  }

  const auto& e = cfg.encoder;
  if (e.kind == EncoderKind::Rnn) {
    enc_rnn_ = init_birnn<T>(e.cell, cfg.emb_dim, e.d_hs, rng.fork(2));
    add_param("enc.fwd.w", enc_rnn_.fwd.w);
    add_param("enc.fwd.b", enc_rnn_.fwd.b);
    if (e.cell == RnnCell::Gru) {
      add_param("enc.fwd.w2", enc_rnn_.fwd.w2);
      add_param("enc.fwd.b2", enc_rnn_.fwd.b2);
    }
    add_param("enc.bwd.w", enc_rnn_.bwd.w);
    add_param("enc.bwd.b", enc_rnn_.bwd.b);
    if (e.cell == RnnCell::Gru) {
      add_param("enc.bwd.w2", enc_rnn_.bwd.w2);
      add_param("enc.bwd.b2", enc_rnn_.bwd.b2);
    }
  } else {
    enc_cnn_ = init_cnn<T>(e.windows, cfg.emb_dim, e.d_c, rng.fork(3));
    for (std::size_t k = 0; k < e.windows.size(); ++k) {
      const std::string tag = std::to_string(e.windows[k]);
      add_param("enc.cnn.w" + tag, enc_cnn_.w[k]);
      add_param("enc.cnn.b" + tag, enc_cnn_.b[k]);
    }
  }

  if (e.use_attention) {
    attn_ = init_attention<T>(e.d_out(), e.d_a, e.r, rng.fork(4));
    add_param("attn.w_s", attn_.w_s);
    add_param("attn.b_s", attn_.b_s);
    add_param("attn.u_s", attn_.u_s);
  }

  ctx_ = init_context<T>(cfg.context, e.pooled_dim(), rng.fork(5));
  if (cfg.context.use_context) {
    add_param("ctx.fwd.w", ctx_.rnn.fwd.w);
    add_param("ctx.fwd.b", ctx_.rnn.fwd.b);
    add_param("ctx.bwd.w", ctx_.rnn.bwd.w);
    add_param("ctx.bwd.b", ctx_.rnn.bwd.b);
  } else if (ctx_.proj_w.defined()) {
    add_param("ctx.proj.w", ctx_.proj_w);
    add_param("ctx.proj.b", ctx_.proj_b);
  }

  const int head_in = cfg.context.use_context || ctx_.proj_w.defined()
                          ? cfg.head_input_dim()
                          : e.pooled_dim();
  head_ = init_head<T>(head_in, cfg.context.ffn_width(), cfg.num_labels, rng.fork(6));
  add_param("head.w1", head_.w1);
  add_param("head.b1", head_.b1);
  add_param("head.w2", head_.w2);
  add_param("head.b2", head_.b2);

  if (cfg.use_crf) {
    trans_ = add_param("crf.trans",
                       TensorT<T>::zeros({cfg.num_labels, cfg.num_labels}, true));
    if (cfg.crf_boundary) {
      boundary_.start = add_param("crf.start", TensorT<T>::zeros({cfg.num_labels}, true));
      boundary_.end = add_param("crf.end", TensorT<T>::zeros({cfg.num_labels}, true));
    }
  }
}

template <typename T>
std::vector<TensorT<T>> ModelT<T>::forward(GraphT<T>& g,
                                           const std::vector<std::vector<int>>& token_ids,
                                           const ForwardMode& mode) const {
  if (token_ids.empty()) throw ContractError("forward: abstract has no sentences");
  std::vector<TensorT<T>> sent_vecs;
  sent_vecs.reserve(token_ids.size());
  for (const auto& ids : token_ids) {
    auto E = g.gather_cols(embedding, ids);
    TensorT<T> H = cfg.encoder.kind == EncoderKind::Rnn ? encode_rnn(g, enc_rnn_, E)
                                                        : encode_cnn(g, enc_cnn_, E);
    TensorT<T> s = cfg.encoder.use_attention
                       ? attention_pool(g, attn_, H).s
                       : fallback_pool(g, cfg.encoder.kind, H);
    sent_vecs.push_back(dropout(g, s, mode));
  }
  auto ctx_vecs = contextualize(g, cfg.context, ctx_, sent_vecs);
  std::vector<TensorT<T>> emissions;
  emissions.reserve(ctx_vecs.size());
  for (const auto& h : ctx_vecs)
    emissions.push_back(emit(g, head_, dropout(g, h, mode), cfg.emission_softmax));
  return emissions;
}

template <typename T>
TensorT<T> ModelT<T>::loss(GraphT<T>& g, const std::vector<TensorT<T>>& emissions,
                           const std::vector<int>& gold) const {
  if (emissions.size() != gold.size())
    throw ContractError("loss: emission/label length mismatch");
  for (int y : gold)
    if (y < 0 || y >= cfg.num_labels)
      throw ContractError("loss: gold label out of range");
  if (cfg.use_crf) return crf_nll(g, emissions, gold, trans_, boundary_);
  // Without sequence optimization: sum of per-sentence cross-entropies.
  TensorT<T> total;
  for (std::size_t i = 0; i < emissions.size(); ++i) {
    auto ce = g.sub(g.logsumexp(emissions[i], 0), g.pick(emissions[i], {gold[i]}));
    total = total.defined() ? g.add(total, ce) : ce;
  }
  return total;
}

template <typename T>
std::vector<int> ModelT<T>::decode(const std::vector<TensorT<T>>& emissions) const {
  std::vector<std::vector<T>> values;
  values.reserve(emissions.size());
  for (const auto& e : emissions) values.push_back(e.value());
  if (cfg.use_crf) {
    std::vector<T> start, end;
    if (boundary_.enabled()) {
      start = boundary_.start.value();
      end = boundary_.end.value();
    }
    return viterbi_decode(values, trans_.value(), cfg.num_labels, start, end);
  }
  std::vector<int> path;
  path.reserve(values.size());
  for (const auto& row : values) {
    int best = 0;
    for (int j = 1; j < cfg.num_labels; ++j)
      if (row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(best)]) best = j;
    path.push_back(best);
  }
  return path;
}

using Model = ModelT<float>;

}  // namespace sentseq
