#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sentseq/model.hpp"

namespace sentseq {

struct TrainSettings {
  double lr0 = 0.003;
  double lr_decay = 0.9;  // multiplied in after each epoch
  int epochs = 30;
  int patience = 5;       // early stop after this many non-improving epochs
  int batch_size = 16;    // abstracts per optimizer step
  double grad_clip = 0;   // global L2 clip, 0 disables

  void validate() const {
    if (!std::isfinite(lr0) || lr0 <= 0) throw ConfigError("train.lr0 must be > 0");
    if (!std::isfinite(lr_decay) || lr_decay <= 0 || lr_decay > 1)
      throw ConfigError("train.lr_decay must be in (0, 1]");
    if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
    if (patience < 1) throw ConfigError("train.patience must be >= 1");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (grad_clip < 0) throw ConfigError("train.grad_clip must be >= 0");
  }
};

inline double epoch_lr(int epoch, const TrainSettings& cfg) {
  if (epoch < 0) throw ContractError("epoch index must be >= 0");
  return cfg.lr0 * std::pow(cfg.lr_decay, epoch);
}

// Adam with bias correction; one moment pair per trainable tensor, in the
// model's parameter order.
template <typename T>
struct AdamStateT {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<std::vector<T>> m, v;
  long step = 0;

  static AdamStateT init(const std::vector<std::pair<std::string, TensorT<T>>>& params) {
    AdamStateT s;
    for (const auto& [name, p] : params) {
      s.m.emplace_back(p.numel(), T(0));
      s.v.emplace_back(p.numel(), T(0));
    }
    return s;
  }
};

template <typename T>
void adam_step(std::vector<std::pair<std::string, TensorT<T>>>& params,
               AdamStateT<T>& state, double lr) {
  if (params.size() != state.m.size())
    throw ContractError("adam state does not match parameter list");
  ++state.step;
  const double bc1 = 1.0 - std::pow(AdamStateT<T>::kBeta1, state.step);
  const double bc2 = 1.0 - std::pow(AdamStateT<T>::kBeta2, state.step);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& [name, p] = params[pi];
    const auto& g = p.grad();
    auto& m = state.m[pi];
    auto& v = state.v[pi];
    auto& x = p.value();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(static_cast<double>(g[i])))
        throw NumericError("non-finite gradient in parameter '" + name + "'");
      m[i] = static_cast<T>(AdamStateT<T>::kBeta1 * m[i] +
                            (1.0 - AdamStateT<T>::kBeta1) * g[i]);
      v[i] = static_cast<T>(AdamStateT<T>::kBeta2 * v[i] +
                            (1.0 - AdamStateT<T>::kBeta2) * g[i] * g[i]);
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      x[i] = static_cast<T>(x[i] - lr * mhat / (std::sqrt(vhat) + AdamStateT<T>::kEps));
    }
  }
}

// Scale all gradients so their joint L2 norm is at most max_norm.
template <typename T>
void clip_gradients(std::vector<std::pair<std::string, TensorT<T>>>& params,
                    double max_norm) {
  double sq = 0;
  for (auto& [name, p] : params)
    for (T g : p.grad()) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0) return;
  const T factor = static_cast<T>(max_norm / norm);
  for (auto& [name, p] : params)
    for (T& g : p.grad()) g *= factor;
}

// Per-sentence emission values captured from the deterministic pass; kept
// frozen across finite-difference evaluations so the stop-gradient objective
// is a fixed function of the parameters.
template <typename T>
using FrozenEmissions = std::vector<std::vector<std::vector<T>>>;

template <typename T>
struct BatchObjective {
  TensorT<T> nll_mean;       // mean per abstract of the sequence loss
  TensorT<T> penalty_mean;   // expectation-linear gap per sentence; undefined if off
  long sentences = 0;
};

// One training objective evaluation over a batch of abstracts. The dropout
// pass feeds both the sequence loss and side (a) of the expectation-linear
// penalty; side (b) is the scaled deterministic pass, detached so gradients
// flow only through the dropout pass.
template <typename T>
BatchObjective<T> batch_objective(GraphT<T>& g, const ModelT<T>& model,
                                  const std::vector<const EncodedAbstract*>& batch,
                                  Rng* dropout_rng,
                                  FrozenEmissions<T>* frozen_b = nullptr) {
  if (batch.empty()) throw ContractError("batch_objective: empty batch");
  const bool want_penalty =
      model.cfg.use_el_reg && model.cfg.beta > 0 && model.cfg.dropout > 0;
  BatchObjective<T> out;
  TensorT<T> nll_sum, pen_sum;
  std::size_t bi = 0;
  for (const EncodedAbstract* a : batch) {
    ForwardMode mode;
    mode.train = true;
    mode.dropout_rng = dropout_rng;
    auto emissions = model.forward(g, a->token_ids, mode);
    auto nll = model.loss(g, emissions, a->labels);
    nll_sum = nll_sum.defined() ? g.add(nll_sum, nll) : nll;
    out.sentences += static_cast<long>(emissions.size());

    if (want_penalty) {
      std::vector<std::vector<T>> b_vals;
      if (frozen_b && bi < frozen_b->size()) {
        b_vals = (*frozen_b)[bi];
      } else {
        typename GraphT<T>::NoGradGuard guard(g);
        auto det = model.forward(g, a->token_ids, ForwardMode{});
        b_vals.reserve(det.size());
        for (auto& e : det) b_vals.push_back(e.value());
        if (frozen_b) frozen_b->push_back(b_vals);
      }
      for (std::size_t i = 0; i < emissions.size(); ++i) {
        auto diff = g.sub(emissions[i],
                          TensorT<T>::of(emissions[i].shape(), b_vals[i]));
        auto sq = g.sum(g.mul(diff, diff));
        pen_sum = pen_sum.defined() ? g.add(pen_sum, sq) : sq;
      }
    }
    ++bi;
  }
  out.nll_mean = g.scale(nll_sum, T(1) / static_cast<T>(batch.size()));
  if (want_penalty)
    out.penalty_mean = g.scale(pen_sum, T(1) / static_cast<T>(out.sentences));
  return out;
}

// nll_mean + beta * penalty_mean.
template <typename T>
TensorT<T> total_loss(GraphT<T>& g, const ModelT<T>& model, const BatchObjective<T>& obj) {
  if (!obj.penalty_mean.defined()) return obj.nll_mean;
  return g.add(obj.nll_mean, g.scale(obj.penalty_mean, static_cast<T>(model.cfg.beta)));
}

}  // namespace sentseq
