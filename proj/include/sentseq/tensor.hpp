#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sentseq/error.hpp"

namespace sentseq {

using Shape = std::vector<int>;

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

inline std::size_t shape_numel(const Shape& s) {
  if (s.empty()) throw ShapeError("empty shape");
  std::size_t n = 1;
  for (int d : s) {
    if (d <= 0) throw ShapeError("non-positive dimension in shape " + shape_str(s));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

template <typename T>
struct TensorStorageT {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // sized like value iff requires_grad
  bool requires_grad = false;
  bool op_output = false;  // produced by a graph op (not a leaf)
};

// Dense row-major tensor handle. Copies share storage; ops live on GraphT.
template <typename T>
class TensorT {
 public:
  TensorT() = default;

  static TensorT zeros(Shape shape, bool requires_grad = false) {
    return of(std::move(shape), {}, requires_grad, T(0));
  }

  static TensorT full(Shape shape, T fill, bool requires_grad = false) {
    return of(std::move(shape), {}, requires_grad, fill);
  }

  static TensorT of(Shape shape, std::vector<T> values, bool requires_grad = false,
                    T fill = T(0)) {
    auto d = std::make_shared<TensorStorageT<T>>();
    const std::size_t n = shape_numel(shape);
    d->shape = std::move(shape);
    if (values.empty()) {
      d->value.assign(n, fill);
    } else {
      if (values.size() != n)
        throw ShapeError("value count " + std::to_string(values.size()) +
                         " does not match shape " + shape_str(d->shape));
      d->value = std::move(values);
    }
    d->requires_grad = requires_grad;
    if (requires_grad) d->grad.assign(n, T(0));
    return TensorT(std::move(d));
  }

  static TensorT scalar(T v, bool requires_grad = false) {
    return of({1}, {v}, requires_grad);
  }

  bool defined() const { return d_ != nullptr; }
  const Shape& shape() const { return d_->shape; }
  int ndim() const { return static_cast<int>(d_->shape.size()); }
  int dim(int i) const { return d_->shape[static_cast<std::size_t>(i)]; }
  std::size_t numel() const { return d_->value.size(); }
  bool is_scalar() const { return numel() == 1; }
  bool requires_grad() const { return d_->requires_grad; }

  std::vector<T>& value() { return d_->value; }
  const std::vector<T>& value() const { return d_->value; }

  std::vector<T>& grad() {
    require_grad_buffer();
    return d_->grad;
  }
  const std::vector<T>& grad() const {
    require_grad_buffer();
    return d_->grad;
  }

  void zero_grad() {
    if (d_->requires_grad) std::fill(d_->grad.begin(), d_->grad.end(), T(0));
  }

  T item() const {
    if (!is_scalar()) throw ContractError("item() on non-scalar tensor " + shape_str(shape()));
    return d_->value[0];
  }

  T at(int i) const { return d_->value[static_cast<std::size_t>(i)]; }
  T& at(int i) { return d_->value[static_cast<std::size_t>(i)]; }
  T at(int i, int j) const { return d_->value[flat(i, j)]; }
  T& at(int i, int j) { return d_->value[flat(i, j)]; }

  TensorT detached_copy() const {
    return of(d_->shape, d_->value, false);
  }

  TensorStorageT<T>* storage() const { return d_.get(); }

 private:
  explicit TensorT(std::shared_ptr<TensorStorageT<T>> d) : d_(std::move(d)) {}

  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(d_->shape[1]) +
           static_cast<std::size_t>(j);
  }

  void require_grad_buffer() const {
    if (!d_->requires_grad)
      throw ContractError("tensor does not require grad; no gradient buffer");
  }

  template <typename U>
  friend class GraphT;

  std::shared_ptr<TensorStorageT<T>> d_;
};

// Reverse-mode tape. Ops run eagerly and append their backward closure; the
// append order is a topological order of the graph, so backward() is a single
// reverse sweep. Single-threaded by contract.
template <typename T>
class GraphT {
  using Storage = std::shared_ptr<TensorStorageT<T>>;

  struct Node {
    Storage output;
    std::function<void()> back;
  };

 public:
  // Temporarily disables recording; outputs become plain constants.
  class NoGradGuard {
   public:
    explicit NoGradGuard(GraphT& g) : g_(g) { ++g_.no_grad_depth_; }
    ~NoGradGuard() { --g_.no_grad_depth_; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

   private:
    GraphT& g_;
  };

  bool grad_enabled() const { return no_grad_depth_ == 0; }
  std::size_t node_count() const { return tape_.size(); }

  void clear() { tape_.clear(); }

  // Populates .grad of every requires_grad tensor reachable from loss.
  // Leaf gradients accumulate across calls; intermediate (op output)
  // gradients are reset at the start of each sweep.
  void backward(const TensorT<T>& loss) {
    if (!loss.is_scalar())
      throw ContractError("backward requires a scalar loss, got shape " +
                          shape_str(loss.shape()));
    if (!loss.requires_grad() || !loss.d_->op_output)
      throw ContractError("backward: loss is not a graph output requiring grad");
    for (auto& node : tape_) {
      if (node.output->requires_grad)
        std::fill(node.output->grad.begin(), node.output->grad.end(), T(0));
    }
    loss.d_->grad[0] = T(1);
    for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) {
      if (it->output->requires_grad && it->back) it->back();
    }
  }

  // ---- construction helpers ----

  TensorT<T> constant(Shape shape, std::vector<T> values) {
    return TensorT<T>::of(std::move(shape), std::move(values), false);
  }

  // ---- ops ----

  TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b) {
    check2d(a, "matmul lhs");
    check2d(b, "matmul rhs");
    const int m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
    if (k != k2)
      throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                       " vs " + shape_str(b.shape()));
    TensorT<T> out = make_output({m, n}, a, b);
    const T* pa = a.value().data();
    const T* pb = b.value().data();
    T* po = out.value().data();
    for (int i = 0; i < m; ++i) {
      T* orow = po + static_cast<std::size_t>(i) * n;
      for (int kk = 0; kk < k; ++kk) {
        const T av = pa[static_cast<std::size_t>(i) * k + kk];
        if (av == T(0)) continue;
        const T* brow = pb + static_cast<std::size_t>(kk) * n;
        for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
      }
    }
    record(out, [as = a.d_, bs = b.d_, os = out.d_, m, k, n]() {
      const T* go = os->grad.data();
      if (as->requires_grad) {
        T* ga = as->grad.data();
        const T* pb = bs->value.data();
        for (int i = 0; i < m; ++i)
          for (int kk = 0; kk < k; ++kk) {
            const T* grow = go + static_cast<std::size_t>(i) * n;
            const T* brow = pb + static_cast<std::size_t>(kk) * n;
            T s = T(0);
            for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
            ga[static_cast<std::size_t>(i) * k + kk] += s;
          }
      }
      if (bs->requires_grad) {
        T* gb = bs->grad.data();
        const T* pa = as->value.data();
        for (int i = 0; i < m; ++i) {
          const T* grow = go + static_cast<std::size_t>(i) * n;
          for (int kk = 0; kk < k; ++kk) {
            const T av = pa[static_cast<std::size_t>(i) * k + kk];
            if (av == T(0)) continue;
            T* brow = gb + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) brow[j] += av * grow[j];
          }
        }
      }
    });
    return out;
  }

  TensorT<T> transpose(const TensorT<T>& a) {
    check2d(a, "transpose");
    const int m = a.dim(0), n = a.dim(1);
    TensorT<T> out = make_output({n, m}, a);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out.at(j, i) = a.at(i, j);
    record(out, [as = a.d_, os = out.d_, m, n]() {
      if (!as->requires_grad) return;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          as->grad[static_cast<std::size_t>(i) * n + j] +=
              os->grad[static_cast<std::size_t>(j) * m + i];
    });
    return out;
  }

  TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b) { return binary(a, b, BinOp::Add); }
  TensorT<T> sub(const TensorT<T>& a, const TensorT<T>& b) { return binary(a, b, BinOp::Sub); }
  TensorT<T> mul(const TensorT<T>& a, const TensorT<T>& b) { return binary(a, b, BinOp::Mul); }

  TensorT<T> scale(const TensorT<T>& a, T c) {
    TensorT<T> out = make_output(a.shape(), a);
    for (std::size_t i = 0; i < a.numel(); ++i) out.value()[i] = a.value()[i] * c;
    record(out, [as = a.d_, os = out.d_, c]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < as->grad.size(); ++i) as->grad[i] += c * os->grad[i];
    });
    return out;
  }

  TensorT<T> tanh(const TensorT<T>& a) {
    TensorT<T> out = make_output(a.shape(), a);
    for (std::size_t i = 0; i < a.numel(); ++i) out.value()[i] = std::tanh(a.value()[i]);
    record(out, [as = a.d_, os = out.d_]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < as->grad.size(); ++i) {
        const T y = os->value[i];
        as->grad[i] += (T(1) - y * y) * os->grad[i];
      }
    });
    return out;
  }

  TensorT<T> sigmoid(const TensorT<T>& a) {
    TensorT<T> out = make_output(a.shape(), a);
    for (std::size_t i = 0; i < a.numel(); ++i) {
      const T x = a.value()[i];
      out.value()[i] = x >= T(0) ? T(1) / (T(1) + std::exp(-x))
                                 : std::exp(x) / (T(1) + std::exp(x));
    }
    record(out, [as = a.d_, os = out.d_]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < as->grad.size(); ++i) {
        const T y = os->value[i];
        as->grad[i] += y * (T(1) - y) * os->grad[i];
      }
    });
    return out;
  }

  TensorT<T> exp(const TensorT<T>& a) {
    TensorT<T> out = make_output(a.shape(), a);
    for (std::size_t i = 0; i < a.numel(); ++i) {
      const T y = std::exp(a.value()[i]);
      if (!std::isfinite(y))
        throw DomainError("exp overflow at input " + std::to_string(a.value()[i]));
      out.value()[i] = y;
    }
    record(out, [as = a.d_, os = out.d_]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < as->grad.size(); ++i)
        as->grad[i] += os->value[i] * os->grad[i];
    });
    return out;
  }

  TensorT<T> log(const TensorT<T>& a) {
    TensorT<T> out = make_output(a.shape(), a);
    for (std::size_t i = 0; i < a.numel(); ++i) {
      const T x = a.value()[i];
      if (!(x > T(0)))
        throw DomainError("log of non-positive value " + std::to_string(x));
      out.value()[i] = std::log(x);
    }
    record(out, [as = a.d_, os = out.d_]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < as->grad.size(); ++i)
        as->grad[i] += os->grad[i] / as->value[i];
    });
    return out;
  }

  // Slices along `axis` sum to 1. Max-subtraction for stability.
  TensorT<T> softmax(const TensorT<T>& a, int axis) {
    auto [slices, len, outer_stride, inner_stride] = axis_layout(a, axis, "softmax");
    TensorT<T> out = make_output(a.shape(), a);
    const T* pa = a.value().data();
    T* po = out.value().data();
    for (std::size_t s = 0; s < slices; ++s) {
      const std::size_t base = slice_base(s, len, outer_stride, inner_stride);
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t i = 0; i < len; ++i)
        mx = std::max(mx, pa[base + i * inner_stride]);
      T z = T(0);
      for (std::size_t i = 0; i < len; ++i) {
        const T e = std::exp(pa[base + i * inner_stride] - mx);
        po[base + i * inner_stride] = e;
        z += e;
      }
      for (std::size_t i = 0; i < len; ++i) po[base + i * inner_stride] /= z;
    }
    record(out, [as = a.d_, os = out.d_, slices, len, outer_stride, inner_stride]() {
      if (!as->requires_grad) return;
      const T* y = os->value.data();
      const T* gy = os->grad.data();
      for (std::size_t s = 0; s < slices; ++s) {
        const std::size_t base = slice_base(s, len, outer_stride, inner_stride);
        T dot = T(0);
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t p = base + i * inner_stride;
          dot += gy[p] * y[p];
        }
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t p = base + i * inner_stride;
          as->grad[p] += (gy[p] - dot) * y[p];
        }
      }
    });
    return out;
  }

  // Reduces `axis` with log-sum-exp. 2-D input -> 1-D output, 1-D -> scalar.
  TensorT<T> logsumexp(const TensorT<T>& a, int axis) {
    auto [slices, len, outer_stride, inner_stride] = axis_layout(a, axis, "logsumexp");
    Shape out_shape = a.ndim() == 1 ? Shape{1} : Shape{static_cast<int>(slices)};
    TensorT<T> out = make_output(out_shape, a);
    const T* pa = a.value().data();
    for (std::size_t s = 0; s < slices; ++s) {
      const std::size_t base = slice_base(s, len, outer_stride, inner_stride);
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t i = 0; i < len; ++i)
        mx = std::max(mx, pa[base + i * inner_stride]);
      T z = T(0);
      for (std::size_t i = 0; i < len; ++i)
        z += std::exp(pa[base + i * inner_stride] - mx);
      out.value()[s] = mx + std::log(z);
    }
    record(out, [as = a.d_, os = out.d_, slices, len, outer_stride, inner_stride]() {
      if (!as->requires_grad) return;
      const T* pa = as->value.data();
      for (std::size_t s = 0; s < slices; ++s) {
        const std::size_t base = slice_base(s, len, outer_stride, inner_stride);
        const T lse = os->value[s];
        const T g = os->grad[s];
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t p = base + i * inner_stride;
          as->grad[p] += g * std::exp(pa[p] - lse);
        }
      }
    });
    return out;
  }

  TensorT<T> sum(const TensorT<T>& a) {
    TensorT<T> out = make_output({1}, a);
    T s = T(0);
    for (T v : a.value()) s += v;
    out.value()[0] = s;
    record(out, [as = a.d_, os = out.d_]() {
      if (!as->requires_grad) return;
      const T g = os->grad[0];
      for (auto& gv : as->grad) gv += g;
    });
    return out;
  }

  TensorT<T> mean(const TensorT<T>& a) {
    TensorT<T> s = sum(a);
    return scale(s, T(1) / static_cast<T>(a.numel()));
  }

  // Selected entries by flat row-major index; gradient scatter-adds.
  TensorT<T> pick(const TensorT<T>& a, std::vector<int> idx) {
    for (int i : idx)
      if (i < 0 || static_cast<std::size_t>(i) >= a.numel())
        throw ContractError("pick index " + std::to_string(i) + " out of range for " +
                            shape_str(a.shape()));
    TensorT<T> out = make_output({static_cast<int>(idx.size())}, a);
    for (std::size_t k = 0; k < idx.size(); ++k)
      out.value()[k] = a.value()[static_cast<std::size_t>(idx[k])];
    record(out, [as = a.d_, os = out.d_, idx = std::move(idx)]() {
      if (!as->requires_grad) return;
      for (std::size_t k = 0; k < idx.size(); ++k)
        as->grad[static_cast<std::size_t>(idx[k])] += os->grad[k];
    });
    return out;
  }

  TensorT<T> rows(const TensorT<T>& a, int start, int len) {
    check2d(a, "rows");
    const int m = a.dim(0), n = a.dim(1);
    if (start < 0 || len < 1 || start + len > m)
      throw ContractError("rows [" + std::to_string(start) + ", +" + std::to_string(len) +
                          ") out of range for " + shape_str(a.shape()));
    TensorT<T> out = make_output({len, n}, a);
    std::copy_n(a.value().begin() + static_cast<std::size_t>(start) * n,
                static_cast<std::size_t>(len) * n, out.value().begin());
    record(out, [as = a.d_, os = out.d_, start, len, n]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < static_cast<std::size_t>(len) * n; ++i)
        as->grad[static_cast<std::size_t>(start) * n + i] += os->grad[i];
    });
    return out;
  }

  TensorT<T> col(const TensorT<T>& a, int j) { return gather_cols(a, {j}); }

  // Column gather: out[:, k] = a[:, idx[k]]. Duplicate indices accumulate.
  TensorT<T> gather_cols(const TensorT<T>& a, std::vector<int> idx) {
    check2d(a, "gather_cols");
    const int m = a.dim(0), n = a.dim(1);
    for (int j : idx)
      if (j < 0 || j >= n)
        throw ContractError("gather_cols index " + std::to_string(j) +
                            " out of range for " + shape_str(a.shape()));
    const int k = static_cast<int>(idx.size());
    TensorT<T> out = make_output({m, k}, a);
    for (int i = 0; i < m; ++i)
      for (int c = 0; c < k; ++c) out.at(i, c) = a.at(i, idx[static_cast<std::size_t>(c)]);
    record(out, [as = a.d_, os = out.d_, idx = std::move(idx), m, n, k]() {
      if (!as->requires_grad) return;
      for (int i = 0; i < m; ++i)
        for (int c = 0; c < k; ++c)
          as->grad[static_cast<std::size_t>(i) * n + idx[static_cast<std::size_t>(c)]] +=
              os->grad[static_cast<std::size_t>(i) * k + c];
    });
    return out;
  }

  TensorT<T> concat_rows(const std::vector<TensorT<T>>& parts) {
    return concat(parts, 0);
  }

  TensorT<T> concat_cols(const std::vector<TensorT<T>>& parts) {
    return concat(parts, 1);
  }

  TensorT<T> reshape(const TensorT<T>& a, Shape shape) {
    if (shape_numel(shape) != a.numel())
      throw ShapeError("reshape from " + shape_str(a.shape()) + " to " + shape_str(shape) +
                       " changes element count");
    TensorT<T> out = make_output(std::move(shape), a);
    out.value() = a.value();
    record(out, [as = a.d_, os = out.d_]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < as->grad.size(); ++i) as->grad[i] += os->grad[i];
    });
    return out;
  }

  TensorT<T> flatten(const TensorT<T>& a) {
    return reshape(a, {static_cast<int>(a.numel())});
  }

  // im2col for 1-D convolution over columns with "same" zero padding:
  // out[(w*m + i), t] = a[i, t + w - pad_left] or 0 outside. pad_left =
  // (window-1)/2, so even windows pad one more on the right.
  TensorT<T> unfold_cols(const TensorT<T>& a, int window) {
    check2d(a, "unfold_cols");
    if (window < 1) throw ContractError("unfold_cols: window must be >= 1");
    const int m = a.dim(0), n = a.dim(1);
    const int pad_left = (window - 1) / 2;
    TensorT<T> out = make_output({window * m, n}, a);
    for (int w = 0; w < window; ++w)
      for (int t = 0; t < n; ++t) {
        const int src = t + w - pad_left;
        if (src < 0 || src >= n) continue;
        for (int i = 0; i < m; ++i) out.at(w * m + i, t) = a.at(i, src);
      }
    record(out, [as = a.d_, os = out.d_, m, n, window, pad_left]() {
      if (!as->requires_grad) return;
      for (int w = 0; w < window; ++w)
        for (int t = 0; t < n; ++t) {
          const int src = t + w - pad_left;
          if (src < 0 || src >= n) continue;
          for (int i = 0; i < m; ++i)
            as->grad[static_cast<std::size_t>(i) * n + src] +=
                os->grad[static_cast<std::size_t>(w * m + i) * n + t];
        }
    });
    return out;
  }

  // Row-wise max over columns -> {m, 1}. Gradient routes to the first
  // (lowest-index) argmax of each row.
  TensorT<T> max_rows(const TensorT<T>& a) {
    check2d(a, "max_rows");
    const int m = a.dim(0), n = a.dim(1);
    TensorT<T> out = make_output({m, 1}, a);
    std::vector<int> arg(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
      T best = a.at(i, 0);
      int bj = 0;
      for (int j = 1; j < n; ++j)
        if (a.at(i, j) > best) {
          best = a.at(i, j);
          bj = j;
        }
      out.at(i, 0) = best;
      arg[static_cast<std::size_t>(i)] = bj;
    }
    record(out, [as = a.d_, os = out.d_, arg = std::move(arg), n]() {
      if (!as->requires_grad) return;
      for (std::size_t i = 0; i < arg.size(); ++i)
        as->grad[i * n + static_cast<std::size_t>(arg[i])] += os->grad[i];
    });
    return out;
  }

 private:
  enum class BinOp { Add, Sub, Mul };

  // Broadcast forms: identical shapes; {m,n} op {m} / {m,1} (per-row value
  // repeated across columns); any op scalar {1}.
  TensorT<T> binary(const TensorT<T>& a, const TensorT<T>& b, BinOp op) {
    enum class Mode { Same, RowVec, Scalar } mode;
    if (a.shape() == b.shape()) {
      mode = Mode::Same;
    } else if (b.numel() == 1) {
      mode = Mode::Scalar;
    } else if (a.ndim() == 2 &&
               ((b.ndim() == 1 && b.dim(0) == a.dim(0)) ||
                (b.ndim() == 2 && b.dim(0) == a.dim(0) && b.dim(1) == 1))) {
      mode = Mode::RowVec;
    } else {
      throw ShapeError(op_name(op) + ": shapes not broadcastable, " +
                       shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    const int n = a.ndim() == 2 ? a.dim(1) : 1;
    TensorT<T> out = make_output(a.shape(), a, b);
    const T* pa = a.value().data();
    const T* pb = b.value().data();
    T* po = out.value().data();
    for (std::size_t i = 0; i < a.numel(); ++i) {
      const T bv = mode == Mode::Same     ? pb[i]
                   : mode == Mode::Scalar ? pb[0]
                                          : pb[i / static_cast<std::size_t>(n)];
      po[i] = apply(op, pa[i], bv);
    }
    record(out, [as = a.d_, bs = b.d_, os = out.d_, op, mode, n]() {
      const T* go = os->grad.data();
      const std::size_t count = os->grad.size();
      if (as->requires_grad) {
        for (std::size_t i = 0; i < count; ++i) {
          T g = go[i];
          if (op == BinOp::Mul) {
            const T bv = mode == Mode::Same     ? bs->value[i]
                         : mode == Mode::Scalar ? bs->value[0]
                                                : bs->value[i / static_cast<std::size_t>(n)];
            g *= bv;
          }
          as->grad[i] += g;
        }
      }
      if (bs->requires_grad) {
        for (std::size_t i = 0; i < count; ++i) {
          T g = go[i];
          if (op == BinOp::Sub) g = -g;
          if (op == BinOp::Mul) g = go[i] * as->value[i];
          const std::size_t bi = mode == Mode::Same     ? i
                                 : mode == Mode::Scalar ? 0
                                                        : i / static_cast<std::size_t>(n);
          bs->grad[bi] += g;
        }
      }
    });
    return out;
  }

  static T apply(BinOp op, T a, T b) {
    switch (op) {
      case BinOp::Add: return a + b;
      case BinOp::Sub: return a - b;
      case BinOp::Mul: return a * b;
    }
    return T(0);
  }

  static std::string op_name(BinOp op) {
    switch (op) {
      case BinOp::Add: return "add";
      case BinOp::Sub: return "sub";
      case BinOp::Mul: return "mul";
    }
    return "?";
  }

  TensorT<T> concat(const std::vector<TensorT<T>>& parts, int axis) {
    if (parts.empty()) throw ContractError("concat of zero tensors");
    for (const auto& p : parts) check2d(p, "concat");
    const int fixed = parts[0].dim(1 - axis);
    int total = 0;
    for (const auto& p : parts) {
      if (p.dim(1 - axis) != fixed)
        throw ShapeError("concat: mismatched shapes " + shape_str(parts[0].shape()) +
                         " vs " + shape_str(p.shape()));
      total += p.dim(axis);
    }
    Shape out_shape = axis == 0 ? Shape{total, fixed} : Shape{fixed, total};
    bool any_grad = false;
    for (const auto& p : parts) any_grad = any_grad || p.requires_grad();
    TensorT<T> out = make_output_any(out_shape, any_grad);
    std::vector<Storage> srcs;
    srcs.reserve(parts.size());
    std::vector<int> sizes;
    for (const auto& p : parts) {
      srcs.push_back(p.d_);
      sizes.push_back(p.dim(axis));
    }
    // forward copy
    if (axis == 0) {
      std::size_t off = 0;
      for (const auto& p : parts) {
        std::copy(p.value().begin(), p.value().end(), out.value().begin() + off);
        off += p.numel();
      }
    } else {
      int coff = 0;
      for (const auto& p : parts) {
        const int pn = p.dim(1);
        for (int i = 0; i < fixed; ++i)
          for (int j = 0; j < pn; ++j) out.at(i, coff + j) = p.at(i, j);
        coff += pn;
      }
    }
    record(out, [srcs, sizes, os = out.d_, axis, fixed, total]() {
      if (axis == 0) {
        std::size_t off = 0;
        for (std::size_t p = 0; p < srcs.size(); ++p) {
          const std::size_t cnt = static_cast<std::size_t>(sizes[p]) * fixed;
          if (srcs[p]->requires_grad)
            for (std::size_t i = 0; i < cnt; ++i) srcs[p]->grad[i] += os->grad[off + i];
          off += cnt;
        }
      } else {
        int coff = 0;
        for (std::size_t p = 0; p < srcs.size(); ++p) {
          const int pn = sizes[p];
          if (srcs[p]->requires_grad)
            for (int i = 0; i < fixed; ++i)
              for (int j = 0; j < pn; ++j)
                srcs[p]->grad[static_cast<std::size_t>(i) * pn + j] +=
                    os->grad[static_cast<std::size_t>(i) * total + coff + j];
          coff += pn;
        }
      }
    });
    return out;
  }

  static void check2d(const TensorT<T>& a, const char* what) {
    if (a.ndim() != 2)
      throw ShapeError(std::string(what) + " expects a 2-D tensor, got " +
                       shape_str(a.shape()));
  }

  // (slices, len, outer_stride, inner_stride) for iterating 1-D/2-D along axis.
  static std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> axis_layout(
      const TensorT<T>& a, int axis, const char* what) {
    if (a.ndim() == 1) {
      if (axis != 0)
        throw ContractError(std::string(what) + ": axis " + std::to_string(axis) +
                            " invalid for 1-D tensor");
      return {1, a.numel(), 0, 1};
    }
    if (a.ndim() != 2 || (axis != 0 && axis != 1))
      throw ContractError(std::string(what) + ": axis " + std::to_string(axis) +
                          " invalid for shape " + shape_str(a.shape()));
    const auto m = static_cast<std::size_t>(a.dim(0));
    const auto n = static_cast<std::size_t>(a.dim(1));
    if (axis == 0) return {n, m, 1, n};  // one slice per column, stride down rows
    return {m, n, n, 1};                 // one slice per row
  }

  static std::size_t slice_base(std::size_t s, std::size_t /*len*/,
                                std::size_t outer_stride, std::size_t inner_stride) {
    return outer_stride == 0 ? 0
           : inner_stride == 1 ? s * outer_stride
                               : s;  // axis 0: base = column index
  }

  TensorT<T> make_output(Shape shape, const TensorT<T>& a) {
    return make_output_any(std::move(shape), a.requires_grad());
  }

  TensorT<T> make_output(Shape shape, const TensorT<T>& a, const TensorT<T>& b) {
    return make_output_any(std::move(shape), a.requires_grad() || b.requires_grad());
  }

  TensorT<T> make_output_any(Shape shape, bool inputs_need_grad) {
    const bool rg = inputs_need_grad && grad_enabled();
    TensorT<T> out = TensorT<T>::zeros(std::move(shape), rg);
    out.d_->op_output = true;
    return out;
  }

  void record(TensorT<T>& out, std::function<void()> back) {
    if (out.requires_grad()) tape_.push_back(Node{out.d_, std::move(back)});
  }

  std::vector<Node> tape_;
  int no_grad_depth_ = 0;
};

using Tensor = TensorT<float>;
using Graph = GraphT<float>;

}  // namespace sentseq
