#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "ssrn/errors.hpp"
#include "ssrn/heads.hpp"
#include "ssrn/sampling.hpp"

using namespace ssrn;
using num::Matrix;
using testing::randn;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<std::tuple<std::size_t, std::size_t, double>> brute_force(const heads::SpanDistributions& d,
                                                                      std::size_t n) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> all;
  for (std::size_t s = 0; s < d.start.size(); ++s)
    for (std::size_t e = s; e < d.end.size(); ++e) all.emplace_back(s, e, d.start[s] * d.end[e]);
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  all.resize(std::min(n, all.size()));
  return all;
}

std::vector<double> random_simplex(std::size_t m, num::Rng& rng, int style) {
  std::vector<double> p(m);
  double z = 0;
  for (auto& x : p) {
    switch (style) {
      case 0: x = rng.uniform(); break;
      case 1: x = static_cast<double>(rng.integer(0, 3)); break;  // many exact ties and zeros
      default: x = std::exp(3.0 * rng.normal()); break;
    }
    z += x;
  }
  if (z == 0) {
    p[0] = 1;
    z = 1;
  }
  for (auto& x : p) x /= z;
  return p;
}

heads::SpanDistributions onehot(std::size_t m, std::size_t s, std::size_t e) {
  heads::SpanDistributions d{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  d.start[s] = 1.0;
  d.end[e] = 1.0;
  return d;
}

}  // namespace

TEST_CASE("lstm matches a plain-loop oracle") {
  num::Rng rng(1);
  ad::ParamStore store;
  const auto p = heads::LstmParams::create(store, "l", 3, 2, rng);
  const Matrix& b = store.value("l.b");
  for (std::size_t j = 0; j < 8; ++j) CHECK(b(0, j) == (j >= 2 && j < 4 ? 1.0 : 0.0));
  const Matrix x = randn(4, 3, rng);
  ad::Graph g(&store);
  const Matrix out = heads::lstm_sequence(g, p, g.constant(x)).value();
  const Matrix &wx = store.value("l.wx"), &u = store.value("l.u");
  std::vector<double> h(2, 0.0), c(2, 0.0);
  for (std::size_t t = 0; t < 4; ++t) {
    double pre[8];
    for (std::size_t j = 0; j < 8; ++j) {
      pre[j] = b(0, j);
      for (std::size_t i = 0; i < 3; ++i) pre[j] += x(t, i) * wx(i, j);
      for (std::size_t i = 0; i < 2; ++i) pre[j] += h[i] * u(i, j);
    }
    for (std::size_t j = 0; j < 2; ++j) {
      c[j] = sigmoid(pre[2 + j]) * c[j] + sigmoid(pre[j]) * std::tanh(pre[4 + j]);
      h[j] = sigmoid(pre[6 + j]) * std::tanh(c[j]);
      CHECK(std::abs(out(t, j) - h[j]) <= 1e-14);
    }
  }
}

TEST_CASE("span_scores gives two simplex vectors deterministically") {
  num::Rng rng(2);
  ad::ParamStore store;
  const auto p = heads::SpanPredictorParams::create(store, "h", 4, 5, rng);
  const Matrix f = randn(6, 4, rng);
  ad::Graph g(&store);
  const auto a = heads::span_scores(g, g.constant(f), p);
  const auto b = heads::span_scores(g, g.constant(f), p);
  CHECK(a.start == b.start);
  CHECK(a.end == b.end);
  for (const auto* v : {&a.start, &a.end}) {
    REQUIRE(v->size() == 6);
    double t = 0;
    for (double x : *v) {
      CHECK(x >= 0.0);
      t += x;
    }
    CHECK(std::abs(t - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(heads::span_scores(g, g.constant(randn(1, 4, rng)), p), ShapeError);
  CHECK_THROWS_AS(heads::span_scores(g, g.constant(randn(6, 3, rng)), p), ShapeError);
}

TEST_CASE("offset_scores is a plain linear layer") {
  num::Rng rng(3);
  ad::ParamStore store;
  const auto p = heads::SpanPredictorParams::create(store, "h", 4, 4, rng);
  for (double& w : store.value(p.offset.weight()).data()) w = 0.0;
  store.value(p.offset.bias()) = Matrix{{0.25, 1.5}};
  ad::Graph g(&store);
  const auto o = heads::to_offsets(heads::offset_scores(g, g.constant(randn(7, 4, rng)), p));
  REQUIRE(o.start.size() == 7);
  REQUIRE(o.end.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(o.start[i] == 0.25);
    CHECK(o.end[i] == 1.5);
  }
}

TEST_CASE("decode examples") {
  const auto top = heads::decode_top_n(onehot(8, 2, 5), 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].hard_start == 2);
  CHECK(top[0].hard_end == 5);
  CHECK(top[0].score == 1.0);

  const heads::SpanDistributions d{{0.1, 0.9}, {0.9, 0.1}};
  const auto t = heads::decode_top_n(d, 3);
  REQUIRE(t.size() == 3);
  CHECK(t[0].hard_start == 0);
  CHECK(t[0].hard_end == 0);
  CHECK(std::abs(t[0].score - 0.09) <= 1e-15);
  CHECK(t[1].hard_start == 1);
  CHECK(t[1].hard_end == 1);
  CHECK(t[2].hard_start == 0);
  CHECK(t[2].hard_end == 1);
  CHECK(heads::decode_top_n(d, 10).size() == 3);
  CHECK_THROWS_AS(heads::decode_top_n(d, 0), ValidationError);
}

TEST_CASE("decode equals brute-force enumeration, ties included") {
  num::Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = static_cast<std::size_t>(rng.integer(1, 40));
    const int style = trial % 3;
    const heads::SpanDistributions d{random_simplex(m, rng, style), random_simplex(m, rng, style)};
    for (std::size_t n : {1u, 2u, 5u, 17u}) {
      const auto got = heads::decode_top_n(d, n);
      const auto want = brute_force(d, n);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].hard_start == std::get<0>(want[i]));
        CHECK(got[i].hard_end == std::get<1>(want[i]));
        CHECK(got[i].score == std::get<2>(want[i]));
        CHECK(got[i].hard_start <= got[i].hard_end);
      }
    }
  }
}

TEST_CASE("refine examples") {
  heads::OffsetPredictions o{std::vector<double>(200, 1.0), std::vector<double>(200, 1.0)};
  o.start[66] = 0.4;
  o.end[133] = 1.2;
  const auto r = heads::refine(66, 133, o);
  CHECK(std::abs(r.start - 66.6) <= 1e-12);
  CHECK(std::abs(r.end - 133.2) <= 1e-12);
  CHECK_FALSE(r.clamped);

  const auto n = heads::refine(10, 20, o);
  CHECK(n.start == 10.0);
  CHECK(n.end == 20.0);

  heads::OffsetPredictions bad{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  const auto c = heads::refine(1, 1, bad);
  CHECK(c.clamped);
  CHECK(c.start == c.end);
  CHECK(c.end == 0.0);

  heads::OffsetPredictions wild{{-5.0, 0, 0}, {0, 0, 9.0}};
  const auto w = heads::refine(0, 2, wild);
  CHECK(w.start == 3.0);
  CHECK(w.end == 3.0);
  CHECK_FALSE(w.clamped);
  CHECK_THROWS_AS(heads::refine(0, 3, wild), IndexError);
}

TEST_CASE("refinement stays within one grid cell for in-range offsets") {
  num::Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto m = static_cast<std::size_t>(rng.integer(2, 64));
    heads::OffsetPredictions o{std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t i = 0; i < m; ++i) {
      o.start[i] = 1.0 - rng.uniform();  // (0, 1]
      o.end[i] = 1.0 + rng.uniform();    // [1, 2)
    }
    const auto s = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(m) - 2));
    const auto e = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(s) + 1, static_cast<std::int64_t>(m) - 1));
    const auto r = heads::refine(s, e, o);
    CHECK_FALSE(r.clamped);
    CHECK(r.start >= static_cast<double>(s));
    CHECK(r.start < static_cast<double>(s) + 1.0);
    CHECK(r.end >= static_cast<double>(e));
    CHECK(r.end < static_cast<double>(e) + 1.0);
  }
}

TEST_CASE("oracle distributions and offsets recover the original boundaries") {
  num::Rng rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t Ms[] = {16, 64, 200};
    const std::size_t M = Ms[trial % 3];
    const auto T = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(M), 5000));
    const auto plan = sampling::SamplingPlan::make(T, M, 0);
    double a = rng.uniform(0, static_cast<double>(T)), b = rng.uniform(0, static_cast<double>(T));
    if (a > b) std::swap(a, b);
    const auto labels = sampling::map_boundary({a, b}, plan);
    heads::OffsetPredictions o{std::vector<double>(M, 1.0), std::vector<double>(M, 1.0)};
    o.start[labels.hard_start] = labels.offset_start;
    o.end[labels.hard_end] = labels.offset_end;
    auto preds = heads::decode_top_n(onehot(M, labels.hard_start, labels.hard_end), 1);
    heads::finalize(preds, o, plan);
    REQUIRE(preds.size() == 1);
    CHECK(std::abs(preds[0].refined_start - labels.soft_start) <= 1e-12 * std::max(1.0, labels.soft_start));
    CHECK(std::abs(preds[0].time_start - a) <= 1e-9 * std::max(a, 1.0));
    if (labels.soft_end < static_cast<double>(M)) {
      CHECK(std::abs(preds[0].refined_end - labels.soft_end) <= 1e-12 * std::max(1.0, labels.soft_end));
      CHECK(std::abs(preds[0].time_end - b) <= 1e-9 * std::max(b, 1.0));
    }
  }
}

TEST_CASE("loss closed forms") {
  ad::Graph g;
  sampling::BoundaryLabels labels;
  labels.hard_start = 3;
  labels.hard_end = 150;
  labels.offset_start = 0.4;
  labels.offset_end = 1.2;
  Matrix offsets(200, 2, 1.0);
  offsets(3, 0) = 0.4;
  offsets(150, 1) = 1.2;
  const heads::SpanLogits uniform{g.constant(Matrix(1, 200, 0.7)), g.constant(Matrix(1, 200, -2.0))};
  const auto u = heads::values(heads::compute_losses(uniform, g.constant(offsets), labels, 1.0));
  CHECK(std::abs(u.l1 - 2.0 * std::log(200.0)) <= 1e-12);
  CHECK(std::abs(u.l1 - 10.5966) <= 1e-4);
  CHECK(u.l2 == 0.0);

  Matrix ls(1, 200, -30.0), le(1, 200, -30.0);
  ls(0, 3) = 30.0;
  le(0, 150) = 30.0;
  const heads::SpanLogits sharp{g.constant(ls), g.constant(le)};
  offsets(3, 0) = 0.9;     // d = 0.5 -> 0.125
  offsets(150, 1) = 3.2;   // d = 2   -> 1.5
  const auto s = heads::values(heads::compute_losses(sharp, g.constant(offsets), labels, 2.0));
  CHECK(s.l1 >= 0.0);
  CHECK(s.l1 <= 1e-6);
  CHECK(std::abs(s.l2 - 1.625) <= 1e-12);
  CHECK(std::abs(s.total - (s.l1 + 2.0 * s.l2)) <= 1e-12);

  labels.hard_end = 200;
  CHECK_THROWS_AS(heads::compute_losses(sharp, g.constant(offsets), labels, 1.0), ValidationError);
}

TEST_CASE("head gradients") {
  num::Rng rng(7);
  ad::ParamStore store;
  const auto p = heads::SpanPredictorParams::create(store, "h", 4, 4, rng);
  store.add("f", randn(4, 4, rng));
  sampling::BoundaryLabels labels;
  labels.hard_start = 1;
  labels.hard_end = 2;
  labels.offset_start = 0.3;
  labels.offset_end = 1.6;
  SUBCASE("cross-entropy of the span scores") {
    testing::require_grad_ok(
        [&](ad::Graph& g) {
          const auto l = heads::span_logits(g, g.param("f"), p);
          return ad::add(ad::cross_entropy(l.start, 1), ad::cross_entropy(l.end, 2));
        },
        store);
  }
  SUBCASE("smooth L1 on the offsets") {
    testing::require_grad_ok(
        [&](ad::Graph& g) {
          const auto o = heads::offset_scores(g, g.param("f"), p);
          const double t[] = {0.3};
          return ad::smooth_l1(ad::pick(o, 1, 0), t);
        },
        store);
  }
  SUBCASE("total loss") {
    testing::require_grad_ok(
        [&](ad::Graph& g) {
          const auto f = g.param("f");
          return heads::compute_losses(heads::span_logits(g, f, p), heads::offset_scores(g, f, p), labels, 0.7).total;
        },
        store);
  }
}
