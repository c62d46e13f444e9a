#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sentseq/encoder.hpp"
#include "sentseq/rng.hpp"

using namespace sentseq;

using DTensor = TensorT<double>;
using DGraph = GraphT<double>;

namespace {

DTensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> vals(shape_numel(shape));
  for (auto& v : vals) v = rng.uniform(lo, hi);
  return DTensor::of(std::move(shape), std::move(vals));
}

void zero_params(RnnDirParamsT<double>& p) {
  for (auto* t : {&p.w, &p.b, &p.w2, &p.b2})
    if (t->defined()) std::fill(t->value().begin(), t->value().end(), 0.0);
}

}  // namespace

TEST_CASE("encode_rnn: single token gives one column from both directions") {
  for (RnnCell cell : {RnnCell::Lstm, RnnCell::Gru}) {
    Rng rng(3);
    auto p = init_birnn<double>(cell, 4, 3, rng);
    DGraph g;
    auto E = random_tensor({4, 1}, rng);
    auto H = encode_rnn(g, p, E);
    CHECK(H.shape() == Shape{6, 1});
    // both halves are functions of the same single input
    RnnState<double> init{DTensor::zeros({3, 1}),
                          cell == RnnCell::Lstm ? DTensor::zeros({3, 1}) : DTensor()};
    auto fwd = rnn_step(g, cell, p.fwd, g.col(E, 0), init);
    auto bwd = rnn_step(g, cell, p.bwd, g.col(E, 0), init);
    for (int i = 0; i < 3; ++i) {
      CHECK(H.at(i, 0) == doctest::Approx(fwd.h.at(i, 0)).epsilon(1e-12));
      CHECK(H.at(3 + i, 0) == doctest::Approx(bwd.h.at(i, 0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("encode_rnn: zero input and zero parameters give all-zero states") {
  for (RnnCell cell : {RnnCell::Lstm, RnnCell::Gru}) {
    Rng rng(1);
    auto p = init_birnn<double>(cell, 3, 2, rng);
    zero_params(p.fwd);
    zero_params(p.bwd);
    DGraph g;
    auto H = encode_rnn(g, p, DTensor::zeros({3, 4}));
    for (double v : H.value()) CHECK(v == 0.0);
  }
}

TEST_CASE("encode_rnn: reversing tokens swaps direction halves") {
  Rng rng(11);
  auto p = init_birnn<double>(RnnCell::Lstm, 4, 3, rng);
  p.bwd = p.fwd;  // shared weights make the swap exact
  DGraph g;
  auto E = random_tensor({4, 3}, rng);
  std::vector<double> rev_vals(E.numel());
  for (int i = 0; i < 4; ++i)
    for (int t = 0; t < 3; ++t)
      rev_vals[static_cast<std::size_t>(i * 3 + t)] = E.at(i, 2 - t);
  auto E_rev = DTensor::of({4, 3}, std::move(rev_vals));

  auto H = encode_rnn(g, p, E);
  auto H_rev = encode_rnn(g, p, E_rev);
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < 3; ++i) {
      CHECK(H_rev.at(i, t) == doctest::Approx(H.at(3 + i, 2 - t)).epsilon(1e-12));
      CHECK(H_rev.at(3 + i, t) == doctest::Approx(H.at(i, 2 - t)).epsilon(1e-12));
    }
}

TEST_CASE("encoder output dims match the published configuration") {
  EncoderConfig pubmed_cnn;
  pubmed_cnn.kind = EncoderKind::Cnn;
  pubmed_cnn.windows = {2, 3, 4, 5};
  pubmed_cnn.d_c = 200;
  CHECK(pubmed_cnn.d_out() == 800);

  EncoderConfig pubmed_rnn;
  pubmed_rnn.d_hs = 200;
  pubmed_rnn.r = 15;
  CHECK(pubmed_rnn.d_out() == 400);
  CHECK(pubmed_rnn.pooled_dim() == 6000);
}

TEST_CASE("encode_cnn: window 1 with identity kernel is a columnwise map of E") {
  Rng rng(5);
  CnnParamsT<double> p = init_cnn<double>({1}, 3, 3, rng);
  // identity kernel rows, zero bias
  std::fill(p.w[0].value().begin(), p.w[0].value().end(), 0.0);
  for (int i = 0; i < 3; ++i) p.w[0].at(i, i) = 1.0;
  std::fill(p.b[0].value().begin(), p.b[0].value().end(), 0.0);

  DGraph g;
  auto E = random_tensor({3, 5}, rng);
  auto H = encode_cnn(g, p, E);
  REQUIRE(H.shape() == Shape{3, 5});
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < 5; ++t)
      CHECK(H.at(i, t) == doctest::Approx(std::tanh(E.at(i, t))).epsilon(1e-12));
}

TEST_CASE("encode_cnn: N=1 window 3 sees zero padding around the token") {
  Rng rng(6);
  CnnParamsT<double> p = init_cnn<double>({3}, 2, 4, rng);
  DGraph g;
  auto E = random_tensor({2, 1}, rng);
  auto H = encode_cnn(g, p, E);
  REQUIRE(H.shape() == Shape{4, 1});
  // direct computation: kernel applied to [0, e1, 0]
  for (int f = 0; f < 4; ++f) {
    double acc = p.b[0].at(f);
    for (int i = 0; i < 2; ++i) acc += p.w[0].at(f, 2 + i) * E.at(i, 0);
    CHECK(H.at(f, 0) == doctest::Approx(std::tanh(acc)).epsilon(1e-12));
  }
}

TEST_CASE("encode_cnn: PAD-extended input matches truncated computation") {
  Rng rng(8);
  CnnParamsT<double> p = init_cnn<double>({3, 2}, 3, 4, rng);
  DGraph g;
  auto E = random_tensor({3, 4}, rng);
  std::vector<double> padded_vals(3 * 7, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < 4; ++t) padded_vals[static_cast<std::size_t>(i * 7 + t)] = E.at(i, t);
  auto E_pad = DTensor::of({3, 7}, std::move(padded_vals));

  auto H = encode_cnn(g, p, E);
  auto H_pad = encode_cnn(g, p, E_pad);
  for (int i = 0; i < 8; ++i)
    for (int t = 0; t < 4; ++t)
      CHECK(H_pad.at(i, t) == doctest::Approx(H.at(i, t)).epsilon(1e-12));
}

TEST_CASE("attention_pool: zero context matrix means uniform mean pooling") {
  Rng rng(9);
  auto attn = init_attention<double>(4, 3, 2, rng);
  std::fill(attn.u_s.value().begin(), attn.u_s.value().end(), 0.0);
  DGraph g;
  auto H = random_tensor({4, 5}, rng);
  auto pooled = attention_pool(g, attn, H);
  CHECK(pooled.s.shape() == Shape{8, 1});
  for (int row = 0; row < 2; ++row)
    for (int i = 0; i < 4; ++i) {
      double mean = 0;
      for (int t = 0; t < 5; ++t) mean += H.at(i, t);
      mean /= 5;
      CHECK(pooled.s.at(row * 4 + i, 0) == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("attention_pool: single position stacks r copies of h1") {
  Rng rng(10);
  auto attn = init_attention<double>(3, 4, 3, rng);
  DGraph g;
  auto H = random_tensor({3, 1}, rng);
  auto pooled = attention_pool(g, attn, H);
  for (int row = 0; row < 3; ++row) {
    CHECK(pooled.a.at(row, 0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 3; ++i)
      CHECK(pooled.s.at(row * 3 + i, 0) == doctest::Approx(H.at(i, 0)).epsilon(1e-12));
  }
}

TEST_CASE("attention_pool matches an independent high-precision recomputation") {
  Rng rng(12);
  auto attn = init_attention<double>(2, 3, 2, rng);
  DGraph g;
  auto H = random_tensor({2, 3}, rng);
  auto pooled = attention_pool(g, attn, H);

  // direct loop re-computation of the pooling equations
  const int d_out = 2, d_a = 3, r = 2, n = 3;
  std::vector<double> proj(static_cast<std::size_t>(d_a) * n, 0.0);
  for (int i = 0; i < d_a; ++i)
    for (int t = 0; t < n; ++t) {
      double acc = attn.b_s.at(i);
      for (int k = 0; k < d_out; ++k) acc += attn.w_s.at(i, k) * H.at(k, t);
      proj[static_cast<std::size_t>(i * n + t)] = std::tanh(acc);
    }
  for (int row = 0; row < r; ++row) {
    std::vector<double> scores(n);
    for (int t = 0; t < n; ++t) {
      double acc = 0;
      for (int i = 0; i < d_a; ++i)
        acc += attn.u_s.at(row, i) * proj[static_cast<std::size_t>(i * n + t)];
      scores[static_cast<std::size_t>(t)] = acc;
    }
    double mx = *std::max_element(scores.begin(), scores.end());
    double z = 0;
    for (double s : scores) z += std::exp(s - mx);
    for (int t = 0; t < n; ++t) {
      const double a = std::exp(scores[static_cast<std::size_t>(t)] - mx) / z;
      CHECK(pooled.a.at(row, t) == doctest::Approx(a).epsilon(1e-12));
    }
    for (int k = 0; k < d_out; ++k) {
      double acc = 0;
      for (int t = 0; t < n; ++t)
        acc += pooled.a.at(row, t) * H.at(k, t);
      CHECK(pooled.s.at(row * d_out + k, 0) == doctest::Approx(acc).epsilon(1e-12));
    }
  }
}

TEST_CASE("attention rows sum to one and stay in the convex hull of H columns") {
  Rng rng(14);
  auto attn = init_attention<double>(5, 4, 3, rng);
  for (int trial = 0; trial < 25; ++trial) {
    DGraph g;
    const int n = 1 + trial % 6;
    auto H = random_tensor({5, n}, rng, -4.0, 4.0);
    auto pooled = attention_pool(g, attn, H);
    for (int row = 0; row < 3; ++row) {
      double sum = 0;
      for (int t = 0; t < n; ++t) sum += pooled.a.at(row, t);
      CHECK(std::fabs(sum - 1.0) < 1e-6);
      for (int i = 0; i < 5; ++i) {
        double lo = H.at(i, 0), hi = H.at(i, 0);
        for (int t = 1; t < n; ++t) {
          lo = std::min(lo, H.at(i, t));
          hi = std::max(hi, H.at(i, t));
        }
        const double v = pooled.s.at(row * 5 + i, 0);
        CHECK(v >= lo - 1e-9);
        CHECK(v <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("fallback_pool: single column is returned as-is for both kinds") {
  DGraph g;
  auto H = DTensor::of({4, 1}, {1, 2, 3, 4});
  auto rnn = fallback_pool(g, EncoderKind::Rnn, H);
  CHECK(rnn.value() == std::vector<double>{1, 2, 3, 4});
  auto cnn = fallback_pool(g, EncoderKind::Cnn, H);
  CHECK(cnn.value() == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("fallback_pool: CNN max-pools positionwise") {
  DGraph g;
  auto H = DTensor::of({2, 2}, {1, 3, 4, 2});
  auto s = fallback_pool(g, EncoderKind::Cnn, H);
  CHECK(s.value() == std::vector<double>{3, 4});
}

TEST_CASE("fallback_pool: RNN variant equals stepping the recurrences directly") {
  Rng rng(15);
  auto p = init_birnn<double>(RnnCell::Lstm, 3, 2, rng);
  DGraph g;
  auto E = random_tensor({3, 3}, rng);
  auto H = encode_rnn(g, p, E);
  auto s = fallback_pool(g, EncoderKind::Rnn, H);

  RnnState<double> fwd{DTensor::zeros({2, 1}), DTensor::zeros({2, 1})};
  for (int t = 0; t < 3; ++t) fwd = rnn_step(g, RnnCell::Lstm, p.fwd, g.col(E, t), fwd);
  RnnState<double> bwd{DTensor::zeros({2, 1}), DTensor::zeros({2, 1})};
  for (int t = 2; t >= 0; --t) bwd = rnn_step(g, RnnCell::Lstm, p.bwd, g.col(E, t), bwd);

  for (int i = 0; i < 2; ++i) {
    CHECK(s.at(i, 0) == doctest::Approx(fwd.h.at(i, 0)).epsilon(1e-12));
    CHECK(s.at(2 + i, 0) == doctest::Approx(bwd.h.at(i, 0)).epsilon(1e-12));
  }
}

TEST_CASE("encoder config validation") {
  EncoderConfig bad;
  bad.d_hs = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  EncoderConfig cnn;
  cnn.kind = EncoderKind::Cnn;
  cnn.windows = {};
  CHECK_THROWS_AS(cnn.validate(), ConfigError);
}
