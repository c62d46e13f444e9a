#pragma once

#include <string>
#include <vector>

#include "sentseq/data.hpp"
#include "sentseq/tensor.hpp"

namespace sentseq {

// Optional learned start/end score vectors; disabled by default, in which
// case a path is scored purely by emissions plus pairwise transitions.
template <typename T>
struct CrfBoundaryT {
  TensorT<T> start, end;  // {l} each, or undefined
  bool enabled() const { return start.defined(); }
};

// Path score: sum of per-sentence emission scores along the path plus the
// transition score of every adjacent label pair.
template <typename T>
TensorT<T> crf_sequence_score(GraphT<T>& g, const std::vector<TensorT<T>>& emissions,
                              const std::vector<int>& path, const TensorT<T>& trans,
                              const CrfBoundaryT<T>& boundary = {}) {
  const int n = static_cast<int>(emissions.size());
  const int l = trans.dim(0);
  if (static_cast<int>(path.size()) != n)
    throw ContractError("label path length " + std::to_string(path.size()) +
                        " does not match " + std::to_string(n) + " sentences");
  for (int y : path)
    if (y < 0 || y >= l)
      throw ContractError("label index " + std::to_string(y) + " out of range");

  TensorT<T> score = g.pick(emissions[0], {path[0]});
  for (int i = 1; i < n; ++i) {
    score = g.add(score, g.pick(emissions[static_cast<std::size_t>(i)], {path[i]}));
    score = g.add(score, g.pick(trans, {path[i - 1] * l + path[i]}));
  }
  if (boundary.enabled()) {
    score = g.add(score, g.pick(boundary.start, {path[0]}));
    score = g.add(score, g.pick(boundary.end, {path[n - 1]}));
  }
  return score;
}

// log sum over all label paths of exp(score), by the forward algorithm in
// log space. alpha[j] = log-sum score of paths ending at label j.
template <typename T>
TensorT<T> crf_log_partition(GraphT<T>& g, const std::vector<TensorT<T>>& emissions,
                             const TensorT<T>& trans,
                             const CrfBoundaryT<T>& boundary = {}) {
  if (emissions.empty()) throw ContractError("log_partition: no emissions");
  TensorT<T> alpha = emissions[0];
  if (boundary.enabled()) alpha = g.add(alpha, boundary.start);
  for (std::size_t i = 1; i < emissions.size(); ++i) {
    // M[p, c] = alpha[p] + T[p, c]; reduce over p.
    auto m = g.add(trans, alpha);
    alpha = g.add(g.logsumexp(m, 0), emissions[i]);
  }
  if (boundary.enabled()) alpha = g.add(alpha, boundary.end);
  return g.logsumexp(alpha, 0);
}

// Negative log probability of the gold path under the global softmax.
template <typename T>
TensorT<T> crf_nll(GraphT<T>& g, const std::vector<TensorT<T>>& emissions,
                   const std::vector<int>& gold, const TensorT<T>& trans,
                   const CrfBoundaryT<T>& boundary = {}) {
  return g.sub(crf_log_partition(g, emissions, trans, boundary),
               crf_sequence_score(g, emissions, gold, trans, boundary));
}

// Max-score path over raw emission values. emissions[i] has l scores for
// sentence i; trans is row-major l*l. Ties break toward the lowest label
// index, both at each backtrack step and at the final position.
template <typename T>
std::vector<int> viterbi_decode(const std::vector<std::vector<T>>& emissions,
                                const std::vector<T>& trans, int l,
                                const std::vector<T>& start = {},
                                const std::vector<T>& end = {}) {
  const int n = static_cast<int>(emissions.size());
  if (n == 0) throw ContractError("viterbi: no emissions");
  if (static_cast<int>(trans.size()) != l * l)
    throw ContractError("viterbi: transition matrix size mismatch");

  std::vector<T> score(emissions[0].begin(), emissions[0].end());
  if (!start.empty())
    for (int j = 0; j < l; ++j) score[static_cast<std::size_t>(j)] += start[static_cast<std::size_t>(j)];
  std::vector<int> back(static_cast<std::size_t>((n - 1) * l), 0);
  std::vector<T> next(static_cast<std::size_t>(l));
  for (int t = 1; t < n; ++t) {
    for (int j = 0; j < l; ++j) {
      T best = score[0] + trans[static_cast<std::size_t>(j)];
      int best_i = 0;
      for (int i = 1; i < l; ++i) {
        const T s = score[static_cast<std::size_t>(i)] +
                    trans[static_cast<std::size_t>(i * l + j)];
        if (s > best) {
          best = s;
          best_i = i;
        }
      }
      next[static_cast<std::size_t>(j)] =
          best + emissions[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
      back[static_cast<std::size_t>((t - 1) * l + j)] = best_i;
    }
    score = next;
  }
  if (!end.empty())
    for (int j = 0; j < l; ++j) score[static_cast<std::size_t>(j)] += end[static_cast<std::size_t>(j)];

  int best_j = 0;
  for (int j = 1; j < l; ++j)
    if (score[static_cast<std::size_t>(j)] > score[static_cast<std::size_t>(best_j)]) best_j = j;

  std::vector<int> path(static_cast<std::size_t>(n));
  path[static_cast<std::size_t>(n - 1)] = best_j;
  for (int t = n - 2; t >= 0; --t)
    path[static_cast<std::size_t>(t)] =
        back[static_cast<std::size_t>(t * l + path[static_cast<std::size_t>(t + 1)])];
  return path;
}

// Transition table report (rows: previous label, columns: current label)
// and its inverse parser.
std::string format_transition_report(const std::vector<float>& trans,
                                     const LabelSet& labels);
struct TransitionReport {
  std::vector<std::string> labels;
  std::vector<float> matrix;  // row-major l*l
};
TransitionReport parse_transition_report(const std::string& text);

}  // namespace sentseq
