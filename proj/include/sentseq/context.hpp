#pragma once

#include <vector>

#include "sentseq/encoder.hpp"

namespace sentseq {

struct ContextConfig {
  int d_hd = 200;       // hidden size per direction of the abstract-level bi-LSTM
  int ffn_hidden = 0;   // 0: defaults to d_hd
  bool use_context = true;

  int ffn_width() const { return ffn_hidden > 0 ? ffn_hidden : d_hd; }

  void validate() const {
    if (d_hd < 1) throw ConfigError("context.d_hd must be >= 1");
    if (ffn_hidden < 0) throw ConfigError("context.ffn_hidden must be >= 0");
  }
};

template <typename T>
struct ContextParamsT {
  BiRnnParamsT<T> rnn;          // when use_context
  TensorT<T> proj_w, proj_b;    // bypass projection when disabled and dims differ
};

template <typename T>
ContextParamsT<T> init_context(const ContextConfig& cfg, int input_dim, Rng rng) {
  ContextParamsT<T> p;
  if (cfg.use_context) {
    p.rnn = init_birnn<T>(RnnCell::Lstm, input_dim, cfg.d_hd, rng.fork(0));
  } else if (input_dim != 2 * cfg.d_hd) {
    p.proj_w = xavier_init<T>({2 * cfg.d_hd, input_dim}, rng.fork(1));
    p.proj_b = TensorT<T>::zeros({2 * cfg.d_hd}, true);
  }
  return p;
}

// Abstract-level bi-LSTM over the sentence vectors. With use_context=false
// this is an identity bypass (plus a linear projection when the widths
// disagree) so every downstream shape stays fixed.
template <typename T>
std::vector<TensorT<T>> contextualize(GraphT<T>& g, const ContextConfig& cfg,
                                      const ContextParamsT<T>& p,
                                      const std::vector<TensorT<T>>& sent_vecs) {
  if (sent_vecs.empty()) throw ContractError("contextualize: empty sentence sequence");
  if (!cfg.use_context) {
    if (!p.proj_w.defined()) return sent_vecs;
    std::vector<TensorT<T>> out;
    out.reserve(sent_vecs.size());
    for (const auto& s : sent_vecs)
      out.push_back(g.add(g.matmul(p.proj_w, s), p.proj_b));
    return out;
  }
  auto H = encode_rnn(g, p.rnn, g.concat_cols(sent_vecs));
  std::vector<TensorT<T>> out;
  out.reserve(sent_vecs.size());
  for (int t = 0; t < static_cast<int>(sent_vecs.size()); ++t)
    out.push_back(g.col(H, t));
  return out;
}

// One-hidden-layer feed-forward head mapping a contextualized sentence
// vector to per-label emission scores.
template <typename T>
struct HeadParamsT {
  TensorT<T> w1, b1;  // {ffn, in}, {ffn}
  TensorT<T> w2, b2;  // {l, ffn}, {l}
};

template <typename T>
HeadParamsT<T> init_head(int input_dim, int hidden, int num_labels, Rng rng) {
  HeadParamsT<T> p;
  p.w1 = xavier_init<T>({hidden, input_dim}, rng.fork(0));
  p.b1 = TensorT<T>::zeros({hidden}, true);
  p.w2 = xavier_init<T>({num_labels, hidden}, rng.fork(1));
  p.b2 = TensorT<T>::zeros({num_labels}, true);
  return p;
}

// Emission scores are left unnormalized by default; the label-sequence layer
// applies its own global softmax. emission_softmax=true restores a
// per-sentence softmax for experimentation.
template <typename T>
TensorT<T> emit(GraphT<T>& g, const HeadParamsT<T>& p, const TensorT<T>& h,
                bool emission_softmax = false) {
  auto hidden = g.tanh(g.add(g.matmul(p.w1, h), p.b1));
  auto scores = g.flatten(g.add(g.matmul(p.w2, hidden), p.b2));
  return emission_softmax ? g.softmax(scores, 0) : scores;
}

}  // namespace sentseq
