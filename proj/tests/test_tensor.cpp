#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sentseq/gradcheck.hpp"
#include "sentseq/rng.hpp"
#include "sentseq/tensor.hpp"

using namespace sentseq;

using DTensor = TensorT<double>;
using DGraph = GraphT<double>;

namespace {

DTensor random_tensor(Shape shape, Rng& rng, double lo = -2.0, double hi = 2.0,
                      bool requires_grad = true) {
  std::vector<double> vals(shape_numel(shape));
  for (auto& v : vals) v = rng.uniform(lo, hi);
  return DTensor::of(std::move(shape), std::move(vals), requires_grad);
}

// fd-checks d(sum of op output)/d(inputs) for an op built by `build`.
void check_op_gradient(std::vector<std::pair<std::string, DTensor>> inputs,
                       const std::function<DTensor(DGraph&)>& build,
                       double tol = 1e-4) {
  auto res = finite_diff_check<double>(
      inputs, [&](DGraph& g) { return g.sum(build(g)); }, 1e-3);
  INFO("worst param ", res.worst_param, "[", res.worst_index, "] autodiff ",
       res.worst_autodiff, " fd ", res.worst_fd);
  CHECK(res.max_rel_err < tol);
}

}  // namespace

TEST_CASE("matmul identity and selection") {
  Graph g;
  auto i2 = Tensor::of({2, 2}, {1, 0, 0, 1});
  auto a = Tensor::of({2, 2}, {1, 2, 3, 4});
  auto out = g.matmul(i2, a);
  CHECK(out.value() == std::vector<float>{1, 2, 3, 4});

  auto sel = g.matmul(Tensor::of({1, 2}, {1, 0}), Tensor::of({2, 1}, {0, 5}));
  CHECK(sel.value() == std::vector<float>{0});
}

TEST_CASE("matmul shape error names both shapes") {
  Graph g;
  auto a = Tensor::zeros({2, 3});
  auto b = Tensor::zeros({2, 3});
  CHECK_THROWS_WITH_AS(g.matmul(a, b),
                       doctest::Contains("[2x3]"), ShapeError);
}

TEST_CASE("matmul gradient of sum equals column sums of other factor") {
  Rng rng(7);
  auto a = random_tensor({3, 4}, rng);
  auto b = random_tensor({4, 2}, rng, -2.0, 2.0, false);
  DGraph g;
  auto out = g.matmul(a, b);
  g.backward(g.sum(out));
  // d(sum_{ij} (AB)_{ij}) / dA_{ik} = sum_j B_{kj}
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 4; ++k) {
      double expect = 0.0;
      for (int j = 0; j < 2; ++j) expect += b.at(k, j);
      CHECK(a.grad()[static_cast<std::size_t>(i * 4 + k)] ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  // same thing via the finite-difference oracle
  check_op_gradient({{"a", a}}, [&](DGraph& gg) { return gg.matmul(a, b); });
}

TEST_CASE("elementwise trivials") {
  Graph g;
  CHECK(g.tanh(Tensor::scalar(0)).item() == 0.0f);
  CHECK(g.sigmoid(Tensor::scalar(0)).item() == 0.5f);
  CHECK(g.exp(Tensor::scalar(0)).item() == 1.0f);
  CHECK(g.log(Tensor::scalar(1)).item() == 0.0f);
}

TEST_CASE("tanh derivative matches central differences at 0.3") {
  DGraph g;
  auto x = DTensor::scalar(0.3, true);
  g.backward(g.tanh(x));
  const double h = 1e-3;
  const double fd = (std::tanh(0.3 + h) - std::tanh(0.3 - h)) / (2 * h);
  CHECK(grad_rel_err(x.grad()[0], fd) < 1e-4);
}

TEST_CASE("log and exp domain violations") {
  Graph g;
  CHECK_THROWS_AS(g.log(Tensor::scalar(0)), DomainError);
  CHECK_THROWS_AS(g.log(Tensor::scalar(-1)), DomainError);
  CHECK_THROWS_AS(g.exp(Tensor::scalar(1e9)), DomainError);
}

TEST_CASE("non-broadcastable shapes rejected") {
  Graph g;
  CHECK_THROWS_AS(g.add(Tensor::zeros({2, 3}), Tensor::zeros({3})), ShapeError);
  CHECK_THROWS_AS(g.mul(Tensor::zeros({4}), Tensor::zeros({5})), ShapeError);
}

TEST_CASE("softmax trivial cases") {
  Graph g;
  auto u = g.softmax(Tensor::of({3}, {0, 0, 0}), 0);
  for (float v : u.value()) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-6));

  auto big = g.softmax(Tensor::of({2}, {1000, 1000}), 0);
  CHECK(big.value()[0] == doctest::Approx(0.5));
  CHECK(big.value()[1] == doctest::Approx(0.5));
  CHECK(std::isfinite(big.value()[0]));
}

TEST_CASE("softmax matches 64-bit recomputation") {
  // frozen oracle: exp([1,2,3]) / sum in double precision
  const double e1 = std::exp(1.0), e2 = std::exp(2.0), e3 = std::exp(3.0);
  const double z = e1 + e2 + e3;
  Graph g;
  auto out = g.softmax(Tensor::of({3}, {1, 2, 3}), 0);
  CHECK(out.value()[0] == doctest::Approx(e1 / z).epsilon(1e-6));
  CHECK(out.value()[1] == doctest::Approx(e2 / z).epsilon(1e-6));
  CHECK(out.value()[2] == doctest::Approx(e3 / z).epsilon(1e-6));
}

TEST_CASE("softmax is shift invariant per slice") {
  Rng rng(11);
  DGraph g;
  auto x = random_tensor({4, 5}, rng, -3.0, 3.0, false);
  auto shifted = g.add(x, DTensor::scalar(17.5));
  for (int axis : {0, 1}) {
    auto a = g.softmax(x, axis);
    auto b = g.softmax(shifted, axis);
    for (std::size_t i = 0; i < a.numel(); ++i)
      CHECK(std::fabs(a.value()[i] - b.value()[i]) < 1e-6);
  }
}

TEST_CASE("softmax slices sum to one along both axes") {
  Rng rng(3);
  DGraph g;
  auto x = random_tensor({3, 6}, rng, -5.0, 5.0, false);
  auto rowwise = g.softmax(x, 1);
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int j = 0; j < 6; ++j) s += rowwise.at(i, j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  auto colwise = g.softmax(x, 0);
  for (int j = 0; j < 6; ++j) {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += colwise.at(i, j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("backward on sum gives ones; backward needs scalar graph output") {
  Graph g;
  auto x = Tensor::of({3}, {1, 2, 3}, true);
  auto s = g.sum(x);
  g.backward(s);
  CHECK(x.grad() == std::vector<float>{1, 1, 1});

  auto y = Tensor::of({2}, {1, 2}, true);
  auto two = g.add(y, y);
  CHECK_THROWS_AS(g.backward(two), ContractError);   // non-scalar
  CHECK_THROWS_AS(g.backward(y), ContractError);     // leaf, not an op output
}

TEST_CASE("backward of x*x at 3 gives 6, repeated backward accumulates") {
  Graph g;
  auto x = Tensor::scalar(3, true);
  auto loss = g.mul(x, x);
  g.backward(loss);
  CHECK(x.grad()[0] == 6.0f);
  g.backward(loss);
  CHECK(x.grad()[0] == 12.0f);
  x.zero_grad();
  g.backward(loss);
  CHECK(x.grad()[0] == 6.0f);
}

TEST_CASE("requires_grad=false tensors never accumulate gradient") {
  Graph g;
  auto x = Tensor::scalar(2, true);
  auto c = Tensor::scalar(5, false);
  auto loss = g.mul(x, c);
  g.backward(loss);
  CHECK(x.grad()[0] == 5.0f);
  CHECK_THROWS_AS(c.grad(), ContractError);
}

TEST_CASE("graph built twice from identical inputs gives bitwise-identical grads") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    DGraph g;
    auto a = random_tensor({4, 3}, rng);
    auto w = random_tensor({3, 4}, rng);
    auto h = g.tanh(g.matmul(a, w));
    auto sm = g.softmax(h, 1);
    g.backward(g.sum(g.mul(sm, h)));
    auto grads = a.grad();
    auto wg = w.grad();
    grads.insert(grads.end(), wg.begin(), wg.end());
    return grads;
  };
  CHECK(run(99) == run(99));
}

TEST_CASE("per-op gradients match finite differences on random inputs") {
  Rng rng(42);

  auto a23 = random_tensor({2, 3}, rng);
  auto b34 = random_tensor({3, 4}, rng);
  check_op_gradient({{"a", a23}, {"b", b34}},
                    [&](DGraph& g) { return g.matmul(a23, b34); });

  auto x = random_tensor({3, 4}, rng);
  auto y = random_tensor({3, 4}, rng);
  check_op_gradient({{"x", x}, {"y", y}}, [&](DGraph& g) { return g.add(x, y); });
  check_op_gradient({{"x", x}, {"y", y}}, [&](DGraph& g) { return g.sub(x, y); });
  check_op_gradient({{"x", x}, {"y", y}}, [&](DGraph& g) { return g.mul(x, y); });

  auto bias = random_tensor({3}, rng);
  check_op_gradient({{"x", x}, {"b", bias}}, [&](DGraph& g) { return g.add(x, bias); });
  auto bias_col = random_tensor({3, 1}, rng);
  check_op_gradient({{"x", x}, {"b", bias_col}},
                    [&](DGraph& g) { return g.mul(x, bias_col); });
  auto c = random_tensor({1}, rng);
  check_op_gradient({{"x", x}, {"c", c}}, [&](DGraph& g) { return g.sub(x, c); });

  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.tanh(x); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.sigmoid(x); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.exp(x); });

  auto pos = random_tensor({3, 4}, rng, 0.5, 2.0);
  check_op_gradient({{"x", pos}}, [&](DGraph& g) { return g.log(pos); });

  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.transpose(x); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.reshape(x, {4, 3}); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.rows(x, 1, 2); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.gather_cols(x, {3, 0, 0, 2}); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.pick(x, {0, 5, 11, 5}); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.unfold_cols(x, 3); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.unfold_cols(x, 2); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.scale(x, -1.7); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.max_rows(x); });
  check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.mean(x); });

  // softmax/logsumexp through a weighting so the gradient is non-trivial
  auto wgt = random_tensor({3, 4}, rng, 0.5, 1.5, false);
  for (int axis : {0, 1}) {
    check_op_gradient({{"x", x}},
                      [&](DGraph& g) { return g.mul(g.softmax(x, axis), wgt); });
    check_op_gradient({{"x", x}}, [&](DGraph& g) { return g.logsumexp(x, axis); });
  }
  auto v = random_tensor({5}, rng);
  check_op_gradient({{"v", v}}, [&](DGraph& g) { return g.logsumexp(v, 0); });

  auto p1 = random_tensor({2, 3}, rng);
  auto p2 = random_tensor({4, 3}, rng);
  check_op_gradient({{"p1", p1}, {"p2", p2}},
                    [&](DGraph& g) { return g.concat_rows({p1, p2}); });
  auto q1 = random_tensor({3, 2}, rng);
  auto q2 = random_tensor({3, 5}, rng);
  check_op_gradient({{"q1", q1}, {"q2", q2}},
                    [&](DGraph& g) { return g.concat_cols({q1, q2, q1}); });
}

TEST_CASE("unfold_cols padding contract: N=1 window 3 sees [0, e1, 0]") {
  Graph g;
  auto e = Tensor::of({2, 1}, {1.5f, -2.0f});
  auto u = g.unfold_cols(e, 3);
  CHECK(u.shape() == Shape{6, 1});
  CHECK(u.value() == std::vector<float>{0, 0, 1.5f, -2.0f, 0, 0});
}

TEST_CASE("max_rows picks row maxima") {
  Graph g;
  auto h = Tensor::of({2, 2}, {1, 3, 4, 2});
  auto m = g.max_rows(h);
  CHECK(m.value() == std::vector<float>{3, 4});
}

TEST_CASE("tensor invariants: shape/data agreement enforced") {
  CHECK_THROWS_AS(Tensor::of({2, 2}, {1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(Tensor::zeros({0, 2}), ShapeError);
  auto t = Tensor::zeros({2, 3}, true);
  CHECK(t.numel() == 6);
  CHECK(t.grad().size() == 6);
}

TEST_CASE("no-grad guard produces constants") {
  Graph g;
  auto x = Tensor::scalar(2, true);
  {
    Graph::NoGradGuard guard(g);
    auto y = g.mul(x, x);
    CHECK_FALSE(y.requires_grad());
  }
  CHECK(g.node_count() == 0);
}
