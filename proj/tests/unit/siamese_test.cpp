#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ssrn/errors.hpp"
#include "ssrn/siamese.hpp"

using namespace ssrn;
using num::Matrix;
using testing::randn;

namespace {

struct Fixture {
  ad::ParamStore store;
  siamese::SiameseParams p;
  Fixture(std::size_t dim, double alpha, siamese::ReasoningMode mode = siamese::ReasoningMode::residual,
          std::uint64_t seed = 1) {
    num::Rng rng(seed);
    p = siamese::SiameseParams::create(store, "siam", dim, alpha, rng, siamese::AggregationMode::cosine, mode);
  }
  void identities() {
    store.value(p.w1) = Matrix::identity(p.dim);
    store.value(p.w2) = Matrix::identity(p.dim);
  }
};

std::vector<ad::Var> constants(ad::Graph& g, const std::vector<Matrix>& ms) {
  std::vector<ad::Var> out;
  for (const auto& m : ms) out.push_back(g.constant(m));
  return out;
}

}  // namespace

TEST_CASE("aggregate examples") {
  num::Rng rng(1);
  ad::Graph g;
  const Matrix fa = randn(5, 4, rng);
  const auto one = constants(g, {randn(5, 4, rng)});
  const Matrix c1 = siamese::aggregate(g, g.constant(fa), one).value();
  for (double x : c1.data()) CHECK(x == 1.0);

  const Matrix same = randn(5, 4, rng);
  for (std::size_t K : {2u, 3u, 5u}) {
    const auto streams = constants(g, std::vector<Matrix>(K, same));
    const Matrix c = siamese::aggregate(g, g.constant(fa), streams).value();
    for (double x : c.data()) CHECK(std::abs(x - 1.0 / static_cast<double>(K)) <= 1e-12);
  }

  const auto two = constants(g, {Matrix{{2, 0}}, Matrix{{0, 3}}});
  const Matrix c = siamese::aggregate(g, g.constant(Matrix{{1, 0}}), two).value();
  const double e = std::numbers::e;
  CHECK(std::abs(c(0, 0) - e / (e + 1)) <= 1e-15);
  CHECK(std::abs(c(0, 1) - 1 / (e + 1)) <= 1e-15);

  CHECK_THROWS_AS(siamese::aggregate(g, g.constant(fa), std::span<const ad::Var>{}), ValidationError);
  const auto bad = constants(g, {Matrix(5, 3)});
  CHECK_THROWS_AS(siamese::aggregate(g, g.constant(fa), bad), ShapeError);
}

TEST_CASE("affinity is row-stochastic and invariant to scaling one stream") {
  num::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    ad::Graph g;
    const Matrix fa = randn(6, 4, rng);
    std::vector<Matrix> s{randn(6, 4, rng), randn(6, 4, rng), randn(6, 4, rng)};
    const Matrix c = siamese::aggregate(g, g.constant(fa), constants(g, s)).value();
    for (std::size_t i = 0; i < 6; ++i) {
      double t = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(c(i, k) >= 0.0);
        t += c(i, k);
      }
      CHECK(std::abs(t - 1.0) <= 1e-12);
    }
    s[1] = num::scale(s[1], rng.uniform(0.01, 50.0));
    const Matrix c2 = siamese::aggregate(g, g.constant(fa), constants(g, s)).value();
    CHECK(testing::max_diff(c, c2) <= 1e-12);
  }
}

TEST_CASE("average aggregation is uniform") {
  num::Rng rng(3);
  ad::Graph g;
  const auto s = constants(g, {randn(4, 2, rng), randn(4, 2, rng), randn(4, 2, rng), randn(4, 2, rng)});
  const Matrix c = siamese::aggregate(g, g.constant(randn(4, 2, rng)), s, siamese::AggregationMode::average).value();
  for (double x : c.data()) CHECK(x == 0.25);
}

TEST_CASE("reason identities") {
  num::Rng rng(4);
  const Matrix fa = randn(5, 4, rng);
  {
    Fixture f(4, 0.0);
    f.identities();
    ad::Graph g(&f.store);
    const auto s = constants(g, {randn(5, 4, rng), randn(5, 4, rng)});
    const auto c = siamese::aggregate(g, g.constant(fa), s);
    CHECK(siamese::reason(g, g.constant(fa), s, c, f.p).value() == fa);
  }
  {
    Fixture f(4, 1.0);
    f.identities();
    ad::Graph g(&f.store);
    const Matrix fs = randn(5, 4, rng);
    const auto s = constants(g, {fs});
    const auto c = siamese::aggregate(g, g.constant(fa), s);
    CHECK(siamese::reason(g, g.constant(fa), s, c, f.p).value() == fs);
  }
  for (double alpha : {0.0, 0.3, 0.5, 1.0}) {
    Fixture f(4, alpha);
    f.identities();
    ad::Graph g(&f.store);
    const auto s = constants(g, {fa, fa, fa});
    const auto c = siamese::aggregate(g, g.constant(fa), s);
    CHECK(testing::max_diff(siamese::reason(g, g.constant(fa), s, c, f.p).value(), fa) <= 1e-12);
  }
}

TEST_CASE("reason matches a brute-force recomputation") {
  num::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Fixture f(2, 0.5);
    f.identities();
    const Matrix fa = randn(2, 2, rng), s1 = randn(2, 2, rng), s2 = randn(2, 2, rng);
    ad::Graph g(&f.store);
    const auto s = constants(g, {s1, s2});
    const Matrix out = siamese::reason(g, g.constant(fa), s, siamese::aggregate(g, g.constant(fa), s), f.p).value();
    for (std::size_t i = 0; i < 2; ++i) {
      auto cosine = [&](const Matrix& b) {
        const double dot = fa(i, 0) * b(i, 0) + fa(i, 1) * b(i, 1);
        return dot / (std::hypot(fa(i, 0), fa(i, 1)) * std::hypot(b(i, 0), b(i, 1)));
      };
      const double e1 = std::exp(cosine(s1)), e2 = std::exp(cosine(s2));
      const double c1 = e1 / (e1 + e2), c2 = e2 / (e1 + e2);
      for (std::size_t d = 0; d < 2; ++d) {
        const double want = 0.5 * (c1 * s1(i, d) + c2 * s2(i, d)) + 0.5 * fa(i, d);
        CHECK(std::abs(out(i, d) - want) <= 1e-15);
      }
    }
  }
}

TEST_CASE("output is linear in alpha") {
  num::Rng rng(6);
  const Matrix fa = randn(4, 4, rng);
  const std::vector<Matrix> streams{randn(4, 4, rng), randn(4, 4, rng)};
  auto run = [&](double alpha) {
    Fixture f(4, alpha, siamese::ReasoningMode::residual, 77);
    ad::Graph g(&f.store);
    const auto s = constants(g, streams);
    return siamese::reason(g, g.constant(fa), s, siamese::aggregate(g, g.constant(fa), s), f.p).value();
  };
  const Matrix r0 = run(0.0), r1 = run(1.0), mid = run(0.5);
  CHECK(testing::max_diff(mid, num::scale(num::add(r0, r1), 0.5)) <= 1e-12);
}

TEST_CASE("ablation variants") {
  num::Rng rng(7);
  const Matrix fa = randn(3, 4, rng);
  {
    Fixture f(4, 0.5);
    ad::Graph g(&f.store);
    CHECK(siamese::anchor_only(g, g.constant(fa), f.p).value() == num::matmul(fa, f.store.value(f.p.w2)));
    CHECK_FALSE(f.store.contains("siam.wcat"));
  }
  {
    Fixture f(4, 0.5, siamese::ReasoningMode::concat);
    REQUIRE(f.store.contains("siam.wcat"));
    ad::Graph g(&f.store);
    const Matrix s1 = randn(3, 4, rng), s2 = randn(3, 4, rng);
    const auto s = constants(g, {s1, s2});
    const auto c = siamese::aggregate(g, g.constant(fa), s, siamese::AggregationMode::average);
    const Matrix out = siamese::reason(g, g.constant(fa), s, c, f.p).value();
    const Matrix mean = num::scale(num::add(s1, s2), 0.5);
    CHECK(testing::max_diff(out, num::matmul(num::concat_cols(fa, mean), f.store.value(f.p.wcat))) <= 1e-14);
  }
  ad::ParamStore store;
  num::Rng r(1);
  CHECK_THROWS_AS(siamese::SiameseParams::create(store, "x", 4, 1.5, r), ValidationError);
}

TEST_CASE("aggregate and reason gradients through the cosine path") {
  num::Rng rng(8);
  for (auto mode : {siamese::ReasoningMode::residual, siamese::ReasoningMode::concat}) {
    Fixture f(4, 0.4, mode);
    f.store.add("fa", randn(3, 4, rng));
    f.store.add("s1", randn(3, 4, rng));
    f.store.add("s2", randn(3, 4, rng));
    testing::require_grad_ok(
        [&](ad::Graph& g) {
          const ad::Var s[] = {g.param("s1"), g.param("s2")};
          const auto c = siamese::aggregate(g, g.param("fa"), s);
          return testing::probe(g, siamese::reason(g, g.param("fa"), s, c, f.p), 3);
        },
        f.store);
  }
}
