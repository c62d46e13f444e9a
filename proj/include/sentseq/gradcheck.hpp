#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sentseq/error.hpp"
#include "sentseq/tensor.hpp"

namespace sentseq {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_autodiff = 0.0;
  double worst_fd = 0.0;
  std::size_t checked = 0;
};

// |a - b| / max(|a|, |b|, floor). The floor keeps structurally-zero gradients
// from turning finite-difference noise into a huge ratio.
inline double grad_rel_err(double a, double b, double floor = 1e-6) {
  const double denom = std::max({std::fabs(a), std::fabs(b), floor});
  return std::fabs(a - b) / denom;
}

// Central-difference check of d(loss)/d(param) for every listed parameter.
// `loss_fn` must rebuild the loss from current parameter values on the given
// graph each time it is called (the graph is cleared between evaluations).
template <typename T>
GradCheckResult finite_diff_check(
    std::vector<std::pair<std::string, TensorT<T>>> params,
    const std::function<TensorT<T>(GraphT<T>&)>& loss_fn, T h = T(1e-3)) {
  GraphT<T> g;
  TensorT<T> loss = loss_fn(g);
  for (auto& [name, p] : params) p.zero_grad();
  g.backward(loss);

  std::vector<std::vector<T>> autodiff;
  autodiff.reserve(params.size());
  for (auto& [name, p] : params) autodiff.push_back(p.grad());

  auto eval = [&]() {
    GraphT<T> scratch;
    typename GraphT<T>::NoGradGuard guard(scratch);
    return static_cast<double>(loss_fn(scratch).item());
  };

  GradCheckResult res;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& tensor = params[pi].second;
    for (std::size_t i = 0; i < tensor.numel(); ++i) {
      const T orig = tensor.value()[i];
      tensor.value()[i] = orig + h;
      const double fp = eval();
      tensor.value()[i] = orig - h;
      const double fm = eval();
      tensor.value()[i] = orig;
      const double fd = (fp - fm) / (2.0 * static_cast<double>(h));
      const double ad = static_cast<double>(autodiff[pi][i]);
      const double rel = grad_rel_err(ad, fd);
      ++res.checked;
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_param = params[pi].first;
        res.worst_index = i;
        res.worst_autodiff = ad;
        res.worst_fd = fd;
      }
    }
  }
  return res;
}

}  // namespace sentseq
