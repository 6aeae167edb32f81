// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "klocal/errors.hpp"
#include "klocal/model.hpp"
#include "klocal/truncator.hpp"
#include "reference.hpp"

using namespace klocal;

namespace {

KLocalOperator single(std::size_t n, const char* s, Complex c = 1.0) {
  return KLocalOperator(n, {Term{PauliString::parse(s), c}});
}

double witness_error(const KLocalOperator& H, const KLocalOperator& g, double t,
                     const KLocalOperator& w) {
  return ref::opnorm(ref::heisenberg(ref::dense(H), ref::dense(g), t) - ref::dense(w));
}

}  // namespace

TEST_CASE("nested commutators") {
  const auto g = single(2, "ZI");
  const auto r0 = nested_commutator(single(2, "ZZ"), g, 0);
  CHECK(max_coefficient_difference(r0.value, g) == 0.0);
  CHECK(r0.dropped == 0.0);
  CHECK(nested_commutator(single(2, "ZZ"), g, 1).value.empty());
  CHECK(nested_commutator(single(2, "ZZ"), g, 4).value.empty());

  // [X, [X, Z]] against the dense reference.
  const auto h = single(1, "X");
  const auto l2 = nested_commutator(h, single(1, "Z"), 2).value;
  const ref::Mat X = ref::letter('X');
  const ref::Mat Z = ref::letter('Z');
  const ref::Mat c1 = X * Z - Z * X;
  const ref::Mat c2 = X * c1 - c1 * X;
  CHECK((ref::dense(l2) - c2).norm() < 1e-14);
  CHECK(l2.coefficient(PauliString::parse("Z")) == Complex(4.0));
  CHECK_THROWS_AS(nested_commutator(h, single(2, "ZI"), 1), DimensionError);
}

TEST_CASE("nested commutator norm growth") {
  std::mt19937_64 rng(21);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 4 + inst % 3;
    const std::size_t k = 1 + inst % 3;
    const auto H = random_klocal(n, k, 1.0, 100 + inst);
    const auto g = ref::random_operator(rng, n, 2, 3);
    const auto c = structural_constants(H);
    const double lambda = 6.0 * c.g * c.k * c.k;
    const double q0 = static_cast<double>(g.locality());
    double factor = ref::opnorm(ref::dense(g));
    for (int m = 1; m <= 5; ++m) {
      factor *= lambda * (q0 + (m - 1) * static_cast<double>(c.k)) / static_cast<double>(c.k);
      const auto l = nested_commutator(H, g, m, 0.0).value;
      CHECK(l.locality() <= q0 + m * c.k);
      CHECK(ref::opnorm(ref::dense(l)) <= factor * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("hadamard truncation") {
  const auto H = single(1, "X");
  const auto g = single(1, "Z");
  auto rep = hadamard_truncate(H, g, 0.0, 3);
  CHECK(max_coefficient_difference(rep.witness, g) == 0.0);
  CHECK(witness_error(H, g, 0.0, rep.witness) == 0.0);

  rep = hadamard_truncate(H, g, 0.01, 3);
  CHECK(rep.m0 == 2);
  CHECK(rep.bound_rhs == doctest::Approx(small_time_rhs(BoundParams::make(1, 1), 1, 3, 0.01, 1.0)));
  CHECK(witness_error(H, g, 0.01, rep.witness) <= rep.bound_rhs + rep.pruning_budget);

  const auto H2 = transverse_field_ising(4, 1.0, 1.0);
  const auto g2 = single(4, "ZIII");
  rep = hadamard_truncate(H2, g2, 0.1 / 288.0, 6);
  CHECK(rep.m0 == 2);
  CHECK(rep.witness.locality() <= 6);

  CHECK_THROWS_AS(hadamard_truncate(H2, single(4, "ZZII"), 0.001, 1), InfeasibleError);
  CHECK_THROWS_AS(hadamard_truncate(H2, g2, 2.0 / 288.0, 6), DomainError);
  CHECK_THROWS_AS(hadamard_truncate(H2, g2, -2.5 / 288.0, 6), DomainError);
}

TEST_CASE("chained truncation") {
  const auto H = transverse_field_ising(4, 1.0, 1.0);
  const auto g = single(4, "ZIII");
  const double t1 = 0.7 / 288.0;
  const auto a = chained_truncate(H, g, t1, 5);
  const auto b = hadamard_truncate(H, g, t1, 5);
  REQUIRE(a.schedule);
  CHECK(a.schedule->levels == std::vector<int>{5});
  CHECK(max_coefficient_difference(a.witness, b.witness) < 1e-15);

  const auto H1 = single(1, "X");
  const auto c = chained_truncate(H1, single(1, "Z"), 0.05, 10);  // kappa = 24, n = 2
  REQUIRE(c.steps.size() == 2);
  CHECK(c.steps[0].to_q == 4);
  CHECK(c.steps[1].to_q == 10);
  CHECK(witness_error(H1, single(1, "Z"), 0.05, c.witness) <= c.bound_rhs + c.pruning_budget);

  CHECK_THROWS_AS(chained_truncate(H1, single(1, "Z"), 0.05, 3), InfeasibleError);

  const auto tfi = transverse_field_ising(6, 1.0, 1.0);
  const auto g6 = single(6, "ZIIIII");
  const double t = 2.5 / 288.0;
  const auto d = chained_truncate(tfi, g6, t, 8);
  CHECK(d.schedule->n == 3);
  CHECK(d.witness.locality() <= 8);
  CHECK(witness_error(tfi, g6, t, d.witness) <= d.bound_rhs + d.pruning_budget);
  const auto e = chained_truncate(tfi, g6, -t, 8);
  CHECK(witness_error(tfi, g6, -t, e.witness) <= e.bound_rhs + e.pruning_budget);
}

TEST_CASE("error is non-increasing in q") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto H = random_klocal(5, 2, 1.0, seed);
    const auto g = single(5, "ZIIII");
    const double t = 0.5 / (24.0 * 4.0);
    double prev = INFINITY;
    for (int q = 1; q <= 9; ++q) {
      const double err = witness_error(H, g, t, hadamard_truncate(H, g, t, q).witness);
      CHECK(err <= prev + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("series converges to exact evolution") {
  const auto H = transverse_field_ising(3, 1.0, 0.8);
  const auto g = single(3, "IXI");
  const double t = 0.9 * 2.0 / (24.0 * 2.8 * 4.0);
  double prev = INFINITY;
  for (int order : {1, 3, 6, 10, 16}) {
    const double err = witness_error(H, g, t, series_partial_sum(H, g, t, order));
    CHECK(err <= prev);
    prev = err;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("pruning budget covers the pruned part") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto H = random_klocal(5, 2, 1.0, seed);
    std::mt19937_64 rng(seed);
    const auto g = ref::random_operator(rng, 5, 2, 4);
    const double t = 0.8 / (24.0 * 4.0);
    TruncationOptions coarse;
    coarse.threshold = 2e-2;
    TruncationOptions exact;
    exact.threshold = 0.0;
    const auto a = hadamard_truncate(H, g, t, 9, coarse);
    const auto b = hadamard_truncate(H, g, t, 9, exact);
    CHECK(ref::opnorm(ref::dense(a.witness) - ref::dense(b.witness)) <= a.pruning_budget + 1e-12);
    CHECK(witness_error(H, g, t, a.witness) <= a.bound_rhs + a.pruning_budget);
  }
}

TEST_CASE("first-order sign") {
  const auto H = random_klocal(3, 2, 1.0, 77);
  const auto g = single(3, "ZXI");
  const double t = 1e-4;
  const ref::Mat plus = ref::heisenberg(ref::dense(H), ref::dense(g), t);
  const ref::Mat minus = ref::heisenberg(ref::dense(H), ref::dense(g), -t);
  const ref::Mat slope = (plus - minus) / (2.0 * t);
  const ref::Mat first = (ref::dense(series_partial_sum(H, g, 1.0, 1)) - ref::dense(g));
  CHECK(ref::opnorm(slope - first) < 1e-6);
}
