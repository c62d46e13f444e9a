#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sentseq/error.hpp"
#include "sentseq/rng.hpp"
#include "sentseq/tensor.hpp"

namespace sentseq {

enum class EncoderKind { Rnn, Cnn };
enum class RnnCell { Lstm, Gru };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::Rnn;
  RnnCell cell = RnnCell::Lstm;
  int d_hs = 200;                        // hidden size per direction (RNN)
  std::vector<int> windows = {2, 3, 4, 5};
  int d_c = 200;                         // filters per window (CNN)
  int d_a = 200;                         // attention projection dim
  int r = 15;                            // context vectors
  bool use_attention = true;

  int d_out() const {
    return kind == EncoderKind::Rnn ? 2 * d_hs
                                    : static_cast<int>(windows.size()) * d_c;
  }
  // Dimension of the per-sentence vector s.
  int pooled_dim() const { return use_attention ? r * d_out() : d_out(); }

  void validate() const {
    if (kind == EncoderKind::Rnn && d_hs < 1)
      throw ConfigError("encoder.d_hs must be >= 1 for the RNN encoder");
    if (kind == EncoderKind::Cnn && (windows.empty() || d_c < 1))
      throw ConfigError("CNN encoder needs non-empty windows and encoder.d_c >= 1");
    if (kind == EncoderKind::Cnn)
      for (int w : windows)
        if (w < 1) throw ConfigError("CNN window sizes must be >= 1");
    if (use_attention && (d_a < 1 || r < 1))
      throw ConfigError("attention needs attention.d_a >= 1 and attention.r >= 1");
  }
};

// Xavier/Glorot uniform over the matrix dimensions, the usual default when
// nothing else is specified.
template <typename T>
TensorT<T> xavier_init(Shape shape, Rng rng) {
  const double fan_in = shape.size() == 2 ? shape[1] : shape[0];
  const double fan_out = shape[0];
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  std::vector<T> vals(shape_numel(shape));
  for (auto& v : vals) v = static_cast<T>(rng.uniform(-bound, bound));
  return TensorT<T>::of(std::move(shape), std::move(vals), true);
}

// One direction of a recurrent encoder. LSTM packs the i,f,o,g gates into
// w/b; GRU keeps z,r in w/b and the candidate in w2/b2.
template <typename T>
struct RnnDirParamsT {
  TensorT<T> w, b;
  TensorT<T> w2, b2;  // GRU only
};

template <typename T>
struct BiRnnParamsT {
  RnnCell cell = RnnCell::Lstm;
  int d_h = 0;
  RnnDirParamsT<T> fwd, bwd;
};

template <typename T>
struct RnnState {
  TensorT<T> h;  // {d_h, 1}
  TensorT<T> c;  // {d_h, 1}, LSTM only
};

template <typename T>
BiRnnParamsT<T> init_birnn(RnnCell cell, int input_dim, int d_h, Rng rng) {
  BiRnnParamsT<T> p;
  p.cell = cell;
  p.d_h = d_h;
  const int gates = cell == RnnCell::Lstm ? 4 : 2;
  int tag = 0;
  for (RnnDirParamsT<T>* dir : {&p.fwd, &p.bwd}) {
    dir->w = xavier_init<T>({gates * d_h, input_dim + d_h}, rng.fork(tag++));
    dir->b = TensorT<T>::zeros({gates * d_h}, true);
    if (cell == RnnCell::Gru) {
      dir->w2 = xavier_init<T>({d_h, input_dim + d_h}, rng.fork(tag++));
      dir->b2 = TensorT<T>::zeros({d_h}, true);
    }
  }
  return p;
}

// LSTM: i,f,o = sigmoid gates, g = tanh candidate, c' = f*c + i*g,
// h' = o * tanh(c'). GRU: z,r = sigmoid gates, candidate from [x; r*h],
// h' = z*h + (1-z)*candidate.
template <typename T>
RnnState<T> rnn_step(GraphT<T>& g, RnnCell cell, const RnnDirParamsT<T>& p,
                     const TensorT<T>& x, const RnnState<T>& prev) {
  const int d_h = prev.h.dim(0);
  if (cell == RnnCell::Lstm) {
    auto gates = g.add(g.matmul(p.w, g.concat_rows({x, prev.h})), p.b);
    auto i = g.sigmoid(g.rows(gates, 0, d_h));
    auto f = g.sigmoid(g.rows(gates, d_h, d_h));
    auto o = g.sigmoid(g.rows(gates, 2 * d_h, d_h));
    auto cand = g.tanh(g.rows(gates, 3 * d_h, d_h));
    auto c = g.add(g.mul(f, prev.c), g.mul(i, cand));
    return {g.mul(o, g.tanh(c)), c};
  }
  auto gates = g.add(g.matmul(p.w, g.concat_rows({x, prev.h})), p.b);
  auto z = g.sigmoid(g.rows(gates, 0, d_h));
  auto r = g.sigmoid(g.rows(gates, d_h, d_h));
  auto cand_in = g.concat_rows({x, g.mul(r, prev.h)});
  auto cand = g.tanh(g.add(g.matmul(p.w2, cand_in), p.b2));
  auto keep = g.mul(z, prev.h);
  auto ones = TensorT<T>::full({d_h, 1}, T(1));
  auto update = g.mul(g.sub(ones, z), cand);
  return {g.add(keep, update), TensorT<T>()};
}

// Bidirectional pass over the columns of E {input_dim, N}. Column t of the
// result stacks the forward state at t over the backward state at t.
template <typename T>
TensorT<T> encode_rnn(GraphT<T>& g, const BiRnnParamsT<T>& p, const TensorT<T>& E) {
  const int n = E.dim(1);
  auto zero_state = [&]() {
    RnnState<T> s;
    s.h = TensorT<T>::zeros({p.d_h, 1});
    if (p.cell == RnnCell::Lstm) s.c = TensorT<T>::zeros({p.d_h, 1});
    return s;
  };
  std::vector<TensorT<T>> fwd(static_cast<std::size_t>(n));
  RnnState<T> state = zero_state();
  for (int t = 0; t < n; ++t) {
    state = rnn_step(g, p.cell, p.fwd, g.col(E, t), state);
    fwd[static_cast<std::size_t>(t)] = state.h;
  }
  std::vector<TensorT<T>> bwd(static_cast<std::size_t>(n));
  state = zero_state();
  for (int t = n - 1; t >= 0; --t) {
    state = rnn_step(g, p.cell, p.bwd, g.col(E, t), state);
    bwd[static_cast<std::size_t>(t)] = state.h;
  }
  std::vector<TensorT<T>> columns;
  columns.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t)
    columns.push_back(g.concat_rows({fwd[static_cast<std::size_t>(t)],
                                     bwd[static_cast<std::size_t>(t)]}));
  return g.concat_cols(columns);
}

template <typename T>
struct CnnParamsT {
  std::vector<int> windows;
  std::vector<TensorT<T>> w;  // per window: {d_c, window * input_dim}
  std::vector<TensorT<T>> b;  // per window: {d_c}
};

template <typename T>
CnnParamsT<T> init_cnn(const std::vector<int>& windows, int input_dim, int d_c, Rng rng) {
  CnnParamsT<T> p;
  p.windows = windows;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    p.w.push_back(xavier_init<T>({d_c, windows[k] * input_dim},
                                 rng.fork(static_cast<std::uint64_t>(k))));
    p.b.push_back(TensorT<T>::zeros({d_c}, true));
  }
  return p;
}

// Per-window 1-D convolution with "same" zero padding and tanh, features
// concatenated per position so H keeps one column per token.
template <typename T>
TensorT<T> encode_cnn(GraphT<T>& g, const CnnParamsT<T>& p, const TensorT<T>& E) {
  std::vector<TensorT<T>> feats;
  feats.reserve(p.windows.size());
  for (std::size_t k = 0; k < p.windows.size(); ++k) {
    auto u = g.unfold_cols(E, p.windows[k]);
    feats.push_back(g.tanh(g.add(g.matmul(p.w[k], u), p.b[k])));
  }
  return feats.size() == 1 ? feats[0] : g.concat_rows(feats);
}

template <typename T>
struct AttentionParamsT {
  TensorT<T> w_s;  // {d_a, d_out}
  TensorT<T> b_s;  // {d_a}
  TensorT<T> u_s;  // {r, d_a}
};

template <typename T>
AttentionParamsT<T> init_attention(int d_out, int d_a, int r, Rng rng) {
  AttentionParamsT<T> p;
  p.w_s = xavier_init<T>({d_a, d_out}, rng.fork(0));
  p.b_s = TensorT<T>::zeros({d_a}, true);
  p.u_s = xavier_init<T>({r, d_a}, rng.fork(1));
  return p;
}

template <typename T>
struct AttentionPooled {
  TensorT<T> s;  // {r * d_out, 1}
  TensorT<T> a;  // {r, N}, rows sum to 1
};

// A = softmax(U_s tanh(W_s H + b_s)) with the softmax over positions;
// S = A H^T, flattened row-major into s.
template <typename T>
AttentionPooled<T> attention_pool(GraphT<T>& g, const AttentionParamsT<T>& p,
                                  const TensorT<T>& H) {
  auto proj = g.tanh(g.add(g.matmul(p.w_s, H), p.b_s));
  auto a = g.softmax(g.matmul(p.u_s, proj), 1);
  auto pooled = g.matmul(a, g.transpose(H));  // {r, d_out}
  const int r = p.u_s.dim(0);
  return {g.reshape(pooled, {r * H.dim(0), 1}), a};
}

// Pooling used by the no-attention variant: final fwd/bwd states for the
// RNN encoder, positionwise max for the CNN encoder.
template <typename T>
TensorT<T> fallback_pool(GraphT<T>& g, EncoderKind kind, const TensorT<T>& H) {
  if (kind == EncoderKind::Cnn) return g.max_rows(H);
  const int d_h = H.dim(0) / 2;
  const int n = H.dim(1);
  auto last_fwd = g.rows(g.col(H, n - 1), 0, d_h);
  auto last_bwd = g.rows(g.col(H, 0), d_h, d_h);
  return g.concat_rows({last_fwd, last_bwd});
}

}  // namespace sentseq
