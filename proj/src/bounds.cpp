// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "klocal/errors.hpp"

namespace klocal {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double exp_checked(double log_value) {
  if (log_value > 709.0) return std::numeric_limits<double>::infinity();
  return std::exp(log_value);
}

double log_or_ninf(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

void require_positive(int v, const char* name) {
  if (v < 1) throw DomainError(std::string(name) + " must be a positive integer", name);
}

void require_nonneg(double v, const char* name) {
  if (!(v >= 0.0)) throw DomainError(std::string(name) + " must be non-negative", name);
}

}  // namespace

BoundParams BoundParams::make(double g, int k) {
  require_nonneg(g, "g");
  require_positive(k, "k");
  BoundParams p;
  p.g = g;
  p.k = k;
  p.lambda = 6.0 * g * k * k;
  p.kappa = 4.0 * p.lambda;
  p.xi = k / kLn2;
  return p;
}

std::int64_t interval_count(double kappa, double t) {
  const double x = kappa * std::abs(t);
  if (!std::isfinite(x)) throw DomainError("kappa |t| is not finite", "t");
  const double nearest = std::round(x);
  const double snapped = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : x;
  const auto n = static_cast<std::int64_t>(std::ceil(snapped));
  return n < 1 ? 1 : n;
}

TimeGrid time_grid(const BoundParams& p, double t) {
  TimeGrid tg;
  tg.t = t;
  tg.n = interval_count(p.kappa, t);
  tg.dt = std::abs(t) / static_cast<double>(tg.n);
  tg.r_t = std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(tg.n, 4096))) - 1.0;
  return tg;
}

double theorem1_rhs(const BoundParams& p, int q, double gamma_norm) {
  require_positive(q, "q");
  require_nonneg(gamma_norm, "gamma_norm");
  return p.lambda * (static_cast<double>(q) / p.k) * gamma_norm;
}

double single_support_rhs(const BoundParams& p, int support_size, double gamma_norm) {
  return 2.0 * p.g * support_size * gamma_norm;
}

double small_time_rhs(const BoundParams& p, int q0, int q, double t, double gamma_norm) {
  require_positive(q0, "q0");
  require_positive(q, "q");
  require_nonneg(gamma_norm, "gamma_norm");
  if (q < q0) throw DomainError("q must be at least q0", "q");
  const double x = p.kappa * std::abs(t) / 2.0;
  if (!(x < 1.0)) {
    throw DomainError("small-time bound requires |t| < 2/kappa", "t");
  }
  if (gamma_norm == 0.0) return 0.0;
  const double power = static_cast<double>(q - q0) / p.k;
  // 0^0 = 1: with q = q0 the middle factor is one even at t = 0.
  const double log_mid = power == 0.0 ? 0.0 : power * log_or_ninf(x);
  const double log_val =
      (static_cast<double>(q0) / p.k) * kLn2 + log_mid - std::log1p(-x) + std::log(gamma_norm);
  return exp_checked(log_val);
}

namespace {

/// -(q/r_t - q0)/xi = -(ln 2 / k)(q/r_t - q0).
double main_exponent(const BoundParams& p, int q0, int q, double r_t) {
  return -(kLn2 / p.k) * (static_cast<double>(q) / r_t - q0);
}

}  // namespace

double log_main_rhs(const BoundParams& p, int q0, int q, double t, double gamma_norm) {
  require_positive(q0, "q0");
  require_positive(q, "q");
  require_nonneg(gamma_norm, "gamma_norm");
  const TimeGrid tg = time_grid(p, t);
  return std::log(8.0 * static_cast<double>(tg.n)) + log_or_ninf(gamma_norm) +
         main_exponent(p, q0, q, tg.r_t);
}

double main_rhs(const BoundParams& p, int q0, int q, double t, double gamma_norm) {
  return exp_checked(log_main_rhs(p, q0, q, t, gamma_norm));
}

double delta_value(const BoundParams& p, int q0, int q, double t) {
  require_positive(q0, "q0");
  require_positive(q, "q");
  const TimeGrid tg = time_grid(p, t);
  return exp_checked(std::log(4.0) + main_exponent(p, q0, q, tg.r_t));
}

Amplification amplification_check(double delta, std::int64_t n) {
  require_nonneg(delta, "delta");
  if (n < 1) throw DomainError("n must be positive", "n");
  Amplification a;
  a.delta = delta;
  a.n = n;
  const double nd = static_cast<double>(n);
  a.amplified = std::expm1(nd * std::log1p(delta));
  a.concave_bound = nd * delta * std::pow(2.0, (nd - 1.0) / nd);
  a.linear_bound = 2.0 * nd * delta;
  a.applicable = a.amplified <= 1.0;
  const double slack = 1e-12 * std::max(1.0, a.linear_bound);
  a.holds = !a.applicable ||
            (a.amplified <= a.concave_bound + slack && a.concave_bound <= a.linear_bound + slack);
  return a;
}

double topo_error_rhs(const BoundParams& p, int q0, int q, double t) {
  require_positive(q0, "q0");
  require_positive(q, "q");
  const TimeGrid tg = time_grid(p, t);
  const double exponent = -(kLn2 / p.k) * (static_cast<double>(q0) / tg.r_t - q);
  return exp_checked(std::log(2.0 * static_cast<double>(tg.n)) + exponent);
}

double topo_error_rhs_unit(const BoundParams& p, int q0, int q, double t) {
  return topo_error_rhs(p, q0, q, t) / q;
}

BandConstants band_constants(const BoundParams& p, double t, std::size_t n_sites) {
  if (n_sites < 1) throw DomainError("N must be positive", "N");
  const TimeGrid tg = time_grid(p, t);
  BandConstants c;
  c.mu = 1.0 / (2.0 * p.xi);
  c.c_v = exp_checked(std::log(8.0 * static_cast<double>(n_sites) * static_cast<double>(tg.n)) +
                      5.0 / (2.0 * p.xi));
  return c;
}

double band_rhs(const BoundParams& p, double t, std::size_t n_sites, double gap) {
  require_nonneg(gap, "gap");
  const BandConstants c = band_constants(p, t, n_sites);
  if (std::isinf(gap)) return 0.0;
  return exp_checked(std::log(c.c_v) - c.mu * gap);
}

QSchedule q_schedule(int q0, int q, std::int64_t n) {
  require_positive(q0, "q0");
  require_positive(q, "q");
  if (n < 1) throw DomainError("n must be positive", "n");
  if (n >= 62 || (std::int64_t{q0} << n) > q) {
    throw InfeasibleError("q = " + std::to_string(q) + " is below 2^n q0 with n = " +
                              std::to_string(n) + ", q0 = " + std::to_string(q0),
                          "q");
  }
  const std::int64_t two_n = std::int64_t{1} << n;
  QSchedule s;
  s.q0 = q0;
  s.q = q;
  s.n = n;
  s.delta_q = static_cast<int>((q - two_n * q0) / (two_n - 1));
  std::int64_t prev = q0;
  for (std::int64_t m = 0; m < n; ++m) {
    prev = 2 * prev + s.delta_q;
    s.levels.push_back(static_cast<int>(prev));
  }
  return s;
}

}  // namespace klocal
