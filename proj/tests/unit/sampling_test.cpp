#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ssrn/errors.hpp"
#include "ssrn/interval.hpp"
#include "ssrn/numcore/random.hpp"
#include "ssrn/sampling.hpp"

using namespace ssrn;
using namespace ssrn::sampling;

TEST_CASE("anchor indices") {
  const auto p = SamplingPlan::make(1000, 200, 4);
  const auto a = anchor_indices(p);
  REQUIRE(a.size() == 200);
  CHECK(a[0] == 0);
  CHECK(a[1] == 5);
  CHECK(a[199] == 995);
  CHECK(anchor_indices(SamplingPlan::make(7, 4, 0)) == std::vector<std::size_t>{0, 1, 3, 5});
  const auto id = anchor_indices(SamplingPlan::make(9, 9, 0));
  for (std::size_t i = 0; i < id.size(); ++i) CHECK(id[i] == i);
}

TEST_CASE("plan validation") {
  CHECK_THROWS_AS(SamplingPlan::make(10, 1, 0), ValidationError);
  CHECK_THROWS_AS(SamplingPlan::make(10, 11, 0), ValidationError);
  CHECK_NOTHROW(SamplingPlan::make(2, 2, 3));
}

TEST_CASE("siamese indices") {
  const auto p = SamplingPlan::make(1000, 200, 4);
  const auto s1 = siamese_indices(p, 1);
  CHECK(s1[0] == 1);
  CHECK(s1[1] == 6);
  CHECK(s1[2] == 11);
  CHECK(siamese_indices(p, 4)[199] == 999);
  CHECK_THROWS_AS(siamese_indices(p, 0), IndexError);
  CHECK_THROWS_AS(siamese_indices(p, 5), IndexError);

  const auto flat = SamplingPlan::make(8, 8, 3);
  for (std::size_t k = 1; k <= 3; ++k) {
    CHECK(flat.offsets[k - 1] == 1);
    const auto s = siamese_indices(flat, k);
    for (std::size_t i = 0; i + 1 < 8; ++i) CHECK(s[i] == i + 1);
    CHECK(s[7] == 7);
  }
}

TEST_CASE("siamese offsets stay within the stride and never precede the anchor") {
  num::Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto M = static_cast<std::size_t>(rng.integer(2, 64));
    const auto T = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(M), 2000));
    const auto K = static_cast<std::size_t>(rng.integer(0, 8));
    for (auto mode : {OffsetMode::adjacent, OffsetMode::spread}) {
      const auto p = SamplingPlan::make(T, M, K, mode);
      const auto cap = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(p.stride)));
      const auto a = anchor_indices(p);
      for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
      for (std::size_t k = 1; k <= K; ++k) {
        CHECK(p.offsets[k - 1] >= 1);
        CHECK(p.offsets[k - 1] <= cap);
        if (k > 1) CHECK(p.offsets[k - 1] >= p.offsets[k - 2]);
        const auto s = siamese_indices(p, k);
        for (std::size_t i = 0; i < M; ++i) {
          CHECK(s[i] >= a[i]);
          CHECK(s[i] <= T - 1);
        }
      }
      if (mode == OffsetMode::adjacent && K <= cap)
        for (std::size_t k = 1; k <= K; ++k) CHECK(p.offsets[k - 1] == k);
    }
  }
}

TEST_CASE("spread offsets") {
  const auto p = SamplingPlan::make(1000, 100, 4, OffsetMode::spread);
  CHECK(p.offsets == std::vector<std::size_t>{2, 4, 6, 8});
}

TEST_CASE("map_boundary examples") {
  const auto p = SamplingPlan::make(1000, 200, 0);
  const auto l = map_boundary({333, 666}, p);
  CHECK(l.hard_start == 66);
  CHECK(l.hard_end == 133);
  CHECK(std::abs(l.soft_start - 66.6) <= 1e-12);
  CHECK(std::abs(l.soft_end - 133.2) <= 1e-12);
  CHECK(std::abs(l.offset_start - 0.4) <= 1e-12);
  CHECK(std::abs(l.offset_end - 1.2) <= 1e-12);

  const auto z = map_boundary({0, 10}, p);
  CHECK(z.hard_start == 0);
  CHECK(z.soft_start == 0.0);
  CHECK(z.offset_start == 1.0);

  const auto e = map_boundary({500, 1000}, p);
  CHECK(e.soft_end == 200.0);
  CHECK(e.hard_end == 199);
  CHECK(e.offset_end == 2.0 - 1e-9);

  CHECK_THROWS_AS(map_boundary({-1, 10}, p), ValidationError);
  CHECK_THROWS_AS(map_boundary({10, 1001}, p), ValidationError);
  CHECK_THROWS_AS(map_boundary({20, 10}, p), ValidationError);
}

TEST_CASE("degenerate annotation at the right edge keeps hard_start <= hard_end") {
  const auto p = SamplingPlan::make(100, 10, 0);
  const auto l = map_boundary({100, 100}, p);
  CHECK(l.hard_start == 9);
  CHECK(l.hard_end == 9);
}

TEST_CASE("unmap_index examples") {
  const auto p = SamplingPlan::make(1000, 200, 0);
  CHECK(std::abs(unmap_index(66.6, p) - 333.0) <= 1e-9 * 333.0);
  CHECK(unmap_index(0, p) == 0.0);
  CHECK(unmap_index(66, p) == 330.0);
  CHECK(unmap_index(200, p) == 1000.0);
  CHECK_THROWS_AS(unmap_index(-0.5, p), ValidationError);
  CHECK_THROWS_AS(unmap_index(200.5, p), ValidationError);
}

TEST_CASE("label invariants hold on random annotations") {
  num::Rng rng(99);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t Ms[] = {16, 64, 200};
    const std::size_t M = Ms[rng.integer(0, 2)];
    const auto T = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(M), 5000));
    const auto p = SamplingPlan::make(T, M, 0);
    double a = rng.uniform(0, static_cast<double>(T)), b = rng.uniform(0, static_cast<double>(T));
    if (trial % 97 == 0) b = static_cast<double>(T);
    if (a > b) std::swap(a, b);
    const auto l = map_boundary({a, b}, p);
    CHECK(l.hard_start <= l.hard_end);
    CHECK(l.hard_end <= M - 1);
    CHECK(l.offset_start >= 0.0);
    CHECK(l.offset_start <= 1.0);
    CHECK(l.offset_end >= 1.0);
    CHECK(l.offset_end < 2.0);
    // Exact whenever the subtraction is exact (hard index >= 1); one rounding otherwise.
    const double back_s = static_cast<double>(l.hard_start) + 1.0 - l.offset_start;
    if (l.hard_start >= 1) CHECK(back_s == l.soft_start);
    CHECK(std::abs(back_s - l.soft_start) <= 0x1.0p-52);
    if (l.soft_end < static_cast<double>(M)) {
      const double back_e = static_cast<double>(l.hard_end) - 1.0 + l.offset_end;
      if (l.hard_end >= 1) CHECK(back_e == l.soft_end);
      CHECK(std::abs(back_e - l.soft_end) <= 0x1.0p-52);
    }
    const double stride = static_cast<double>(T) / static_cast<double>(M);
    for (double tau : {a, b}) {
      const double soft = tau / static_cast<double>(T) * static_cast<double>(M);
      CHECK(std::abs(unmap_index(soft, p) - tau) <= 1e-9 * std::max(tau, 1.0));
      const double hard = std::floor(soft);
      if (hard <= static_cast<double>(M - 1)) CHECK(std::abs(tau - unmap_index(hard, p)) < stride);
    }
  }
}

TEST_CASE("bias_report examples") {
  const auto p = SamplingPlan::make(1000, 200, 0);
  const BoundaryAnnotation one[] = {{333, 666}};
  const auto r = bias_report(one, p);
  CHECK(std::abs(r.mean_iou - 332.0 / 336.0) <= 1e-12);
  CHECK(r.max_drift == doctest::Approx(3.0).epsilon(1e-12));
  const BoundaryAnnotation grid[] = {{100, 500}, {0, 995}};
  CHECK(bias_report(grid, p).min_iou == 1.0);
  CHECK_THROWS_AS(bias_report(std::span<const BoundaryAnnotation>{}, p), ValidationError);
}

TEST_CASE("bias_report equals a brute-force recomputation") {
  num::Rng rng(1234);
  const double T = 1000, M = 200;
  const auto p = SamplingPlan::make(1000, 200, 0);
  std::vector<BoundaryAnnotation> anns;
  for (int i = 0; i < 10000; ++i) {
    double a = rng.uniform(0, T), b = rng.uniform(0, T);
    if (a > b) std::swap(a, b);
    anns.push_back({a, b});
  }
  const auto r = bias_report(anns, p);
  double sum = 0, worst = 1;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const double hs = std::min(std::floor(anns[i].start * M / T), M - 1) * T / M;
    const double he = std::max(std::min(std::floor(anns[i].end * M / T), M - 1) * T / M, hs);
    const double inter = std::max(0.0, std::min(anns[i].end, he) - std::max(anns[i].start, hs));
    const double uni = std::max(anns[i].end, he) - std::min(anns[i].start, hs);
    const double v = uni > 0 ? inter / uni : 1.0;
    CHECK(std::abs(r.ious[i] - v) <= 1e-12);
    CHECK(r.ious[i] >= 0.0);
    CHECK(r.ious[i] <= 1.0);
    sum += v;
    worst = std::min(worst, v);
  }
  CHECK(std::abs(r.mean_iou - sum / 10000.0) <= 1e-6);
  CHECK(r.min_iou == doctest::Approx(worst).epsilon(1e-12));
  CHECK(r.max_drift <= p.stride);
  std::size_t total = 0;
  for (auto h : r.histogram) total += h;
  CHECK(total == anns.size());
}

TEST_CASE("iou") {
  CHECK(iou({1, 4}, {1, 4}) == 1.0);
  CHECK(iou({0, 1}, {2, 3}) == 0.0);
  CHECK(iou({0, 10}, {5, 15}) == 1.0 / 3.0);
  CHECK(iou({2, 2}, {2, 2}) == 1.0);
  CHECK(iou({2, 2}, {3, 3}) == 0.0);
  CHECK_THROWS_AS(iou({3, 2}, {0, 1}), ValidationError);
}
