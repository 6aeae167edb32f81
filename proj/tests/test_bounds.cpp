// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "klocal/bounds.hpp"
#include "klocal/errors.hpp"

using namespace klocal;
using doctest::Approx;

TEST_CASE("parameters") {
  const auto p = BoundParams::make(3.0, 2);
  CHECK(p.lambda == 72.0);
  CHECK(p.kappa == 288.0);
  CHECK(p.xi == Approx(2.0 / std::log(2.0)));
  CHECK_THROWS_AS(BoundParams::make(-1.0, 1), DomainError);
  CHECK_THROWS_AS(BoundParams::make(1.0, 0), DomainError);
}

TEST_CASE("time grid") {
  const auto p = BoundParams::make(1.0, 1);  // kappa = 24
  CHECK(time_grid(p, 0.0).n == 1);
  CHECK(time_grid(p, 0.0).r_t == 1.0);
  CHECK(time_grid(p, 1.0 / 24.0).n == 1);
  CHECK(time_grid(p, 0.05).n == 2);
  CHECK(time_grid(p, 0.05).r_t == 3.0);
  CHECK(time_grid(p, -0.05).n == 2);
  for (double t : {0.001, 0.03, 0.2, 1.7}) {
    const auto tg = time_grid(p, t);
    CHECK(tg.dt <= 1.0 / p.kappa * (1.0 + 1e-9));
    CHECK(tg.r_t == std::pow(2.0, static_cast<double>(tg.n)) - 1.0);
  }
}

TEST_CASE("theorem1_rhs") {
  CHECK(theorem1_rhs(BoundParams::make(1, 1), 1, 1.0) == Approx(6.0));
  CHECK(theorem1_rhs(BoundParams::make(1, 1), 1, 0.0) == 0.0);
  CHECK(theorem1_rhs(BoundParams::make(1, 2), 4, 1.0) == Approx(48.0));
  for (int k = 1; k <= 4; ++k)
    for (int q = 1; q <= 6; ++q) {
      const auto p = BoundParams::make(1.3, k);
      CHECK(theorem1_rhs(p, q, 1.0) >= single_support_rhs(p, q, 1.0));
    }
}

TEST_CASE("small_time_rhs") {
  const auto p = BoundParams::make(1, 1);
  CHECK(small_time_rhs(p, 1, 3, 1.0 / 24.0, 1.0) == Approx(1.0));
  CHECK(small_time_rhs(p, 1, 1, 0.0, 1.0) == Approx(2.0));
  CHECK(small_time_rhs(BoundParams::make(1, 2), 3, 3, 0.0, 2.0) == Approx(2.0 * std::pow(2.0, 1.5)));
  CHECK_THROWS_AS(small_time_rhs(p, 1, 3, 2.0 / 24.0, 1.0), DomainError);
  CHECK_THROWS_AS(small_time_rhs(p, 2, 1, 0.01, 1.0), DomainError);
  // Independent evaluation of the closed form.
  const auto p2 = BoundParams::make(0.7, 2);
  const double t = 0.5 / p2.kappa;
  const double x = p2.kappa * t / 2.0;
  CHECK(small_time_rhs(p2, 2, 7, t, 1.5) ==
        Approx(std::pow(2.0, 1.0) * std::pow(x, 2.5) / (1.0 - x) * 1.5));
}

TEST_CASE("main_rhs and delta") {
  const auto p = BoundParams::make(1, 1);
  CHECK(main_rhs(p, 1, 30, 0.05, 1.0) == Approx(0.03125));
  CHECK(delta_value(p, 1, 30, 0.05) == Approx(0.0078125));
  // q = q0 r_t: exponent zero.
  CHECK(main_rhs(p, 2, 6, 0.05, 1.0) == Approx(16.0));
  CHECK(delta_value(p, 2, 6, 0.05) == Approx(4.0));
  // t -> 0: n = 1, r_t = 1.
  const auto p3 = BoundParams::make(2.0, 3);
  CHECK(main_rhs(p3, 2, 9, 0.0, 1.0) == Approx(8.0 * std::exp(-std::log(2.0) * 7.0 / 3.0)));
  CHECK(main_rhs(p, 1, 3, -0.05, 1.0) == main_rhs(p, 1, 3, 0.05, 1.0));
  // Overflow guards.
  CHECK(std::isinf(main_rhs(p, 5000, 1, 0.01, 1.0)));
  CHECK(main_rhs(p, 1, 100000, 0.01, 1.0) == 0.0);
  CHECK(std::isfinite(log_main_rhs(p, 5000, 1, 0.01, 1.0)));
}

TEST_CASE("main_rhs = 2 n Delta ||Gamma||") {
  for (int k = 1; k <= 3; ++k)
    for (double t : {0.0, 0.01, 0.05, 0.2})
      for (int q : {3, 8, 20, 60}) {
        const auto p = BoundParams::make(1.1, k);
        const auto n = static_cast<double>(time_grid(p, t).n);
        const double lhs = main_rhs(p, 1, q, t, 2.5);
        const double rhs = 2.0 * n * delta_value(p, 1, q, t) * 2.5;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
      }
}

TEST_CASE("amplification") {
  const auto a = amplification_check(0.0078125, 2);
  CHECK(a.amplified == Approx(0.01568603515625));
  CHECK(a.linear_bound == Approx(0.03125));
  CHECK(a.applicable);
  CHECK(a.holds);
  for (double d : {1e-6, 1e-3, 0.05, 0.2})
    for (std::int64_t n : {1, 2, 3, 5}) CHECK(amplification_check(d, n).holds);
}

TEST_CASE("monotonicity") {
  const auto p = BoundParams::make(1.0, 2);
  for (double t : {0.0, 0.01, 0.03}) {
    for (int q = 2; q < 40; ++q) CHECK(main_rhs(p, 1, q + 1, t, 1.0) <= main_rhs(p, 1, q, t, 1.0));
  }
  double prev = 0.0;
  for (double t = 0.0; t < 0.2; t += 0.003) {
    const double v = main_rhs(p, 1, 12, t, 1.0);
    CHECK(v >= prev * (1.0 - 1e-12));
    prev = v;
  }
  for (int q = 3; q < 8; ++q) {
    CHECK(small_time_rhs(p, 1, q + 1, 0.5 / p.kappa, 1.0) <= small_time_rhs(p, 1, q, 0.5 / p.kappa, 1.0));
  }
}

TEST_CASE("topo_error_rhs") {
  const auto p = BoundParams::make(1, 1);
  const double t = 1.0 / 48.0;
  CHECK(topo_error_rhs(p, 100, 10, t) == Approx(std::pow(2.0, -89)));
  CHECK(topo_error_rhs(p, 12, 4, 0.05) == Approx(4.0));  // q = q0 / r_t with r_t = 3
  CHECK(topo_error_rhs(p, 11, 10, t) == Approx(1.0));
  CHECK(topo_error_rhs(p, 36, 10, 0.05) == Approx(1.0));
  CHECK(topo_error_rhs_unit(p, 100, 10, t) == Approx(std::pow(2.0, -89) / 10.0));
}

TEST_CASE("band_rhs") {
  const auto p = BoundParams::make(1, 1);
  const double t = 1.0 / 48.0;
  CHECK(band_rhs(p, t, 4, 0) == Approx(32.0 * std::pow(2.0, 2.5)));
  CHECK(band_rhs(p, t, 4, 0) == Approx(181.019).epsilon(1e-5));
  CHECK(band_rhs(p, t, 4, 2) == Approx(band_rhs(p, t, 4, 0) / 2.0));
  CHECK(band_rhs(p, t, 4, INFINITY) == 0.0);
  CHECK(band_rhs(p, t, 4, 5000) == 0.0);
}

TEST_CASE("q_schedule") {
  auto s = q_schedule(1, 10, 2);
  CHECK(s.delta_q == 2);
  CHECK(s.levels == std::vector<int>{4, 10});
  CHECK_THROWS_AS(q_schedule(1, 3, 2), InfeasibleError);
  for (std::int64_t n = 1; n <= 5; ++n) {
    s = q_schedule(2, 2 << n, n);
    CHECK(s.delta_q == 0);
    for (std::size_t m = 0; m < s.levels.size(); ++m) CHECK(s.levels[m] == (2 << (m + 1)));
  }
  for (int q0 = 1; q0 <= 3; ++q0)
    for (std::int64_t n = 1; n <= 4; ++n)
      for (int q = q0 << n; q < (q0 << n) + 40; ++q) {
        s = q_schedule(q0, q, n);
        CHECK(s.levels.back() <= q);
        const std::int64_t two_n = std::int64_t{1} << n;
        CHECK(s.levels.back() == two_n * (q0 + s.delta_q) - s.delta_q);
        int prev = q0;
        for (int l : s.levels) {
          CHECK(l == 2 * prev + s.delta_q);
          if (s.delta_q >= 1) CHECK(l > prev);
          prev = l;
        }
      }
}
