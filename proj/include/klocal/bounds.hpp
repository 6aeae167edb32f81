// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bounds.hpp
 * @brief Closed-form right-hand sides of the operator-spreading inequalities
 *        for k-local, g-extensive Hamiltonians.
 *
 * Constants: lambda = 6 g k^2, kappa = 4 lambda, xi = k / ln 2.
 * For a time t the interval count is n = ceil(kappa |t|), with n = 0 mapped
 * to 1 so that t -> 0+ is continuous; dt = |t| / n and r_t = 2^n - 1.
 * Values of kappa |t| within 1e-9 (relative) of an integer are snapped to it
 * before the ceiling, so t = 1/kappa yields n = 1 despite rounding.
 *
 * Every exponential is evaluated in the log domain; results that exceed the
 * double range come back as +inf rather than wrapping.
 */

#pragma once

#include <cstdint>
#include <vector>

namespace klocal {

struct BoundParams {
  double g = 0.0;
  int k = 1;
  double lambda = 0.0;
  double kappa = 0.0;
  double xi = 0.0;

  static BoundParams make(double g, int k);
};

/// Time-dependent part of the parameters.
struct TimeGrid {
  double t = 0.0;
  std::int64_t n = 1;
  double dt = 0.0;
  double r_t = 1.0;
};

std::int64_t interval_count(double kappa, double t);
TimeGrid time_grid(const BoundParams& p, double t);

/// lambda (q/k) ||Gamma|| = 6 g k q ||Gamma||.
double theorem1_rhs(const BoundParams& p, int q, double gamma_norm);

/// The per-support estimate 2 g |Z| ||gamma_Z|| for a single-support operator.
double single_support_rhs(const BoundParams& p, int support_size, double gamma_norm);

/// 2^{q0/k} (kappa t/2)^{(q-q0)/k} / (1 - kappa t/2) ||Gamma||, valid for |t| < 2/kappa.
double small_time_rhs(const BoundParams& p, int q0, int q, double t, double gamma_norm);

/// 8 ||Gamma|| n exp[-(q/r_t - q0)/xi], using |t|.
double main_rhs(const BoundParams& p, int q0, int q, double t, double gamma_norm);
double log_main_rhs(const BoundParams& p, int q0, int q, double t, double gamma_norm);

/// Delta = 4 exp[-(q/r_t - q0)/xi].
double delta_value(const BoundParams& p, int q0, int q, double t);

struct Amplification {
  double delta = 0.0;
  std::int64_t n = 1;
  double amplified = 0.0;       // (Delta + 1)^n - 1
  double concave_bound = 0.0;   // n Delta 2^{(n-1)/n}
  double linear_bound = 0.0;    // 2 n Delta
  bool applicable = false;      // amplified <= 1
  bool holds = false;           // !applicable || amplified <= concave_bound <= linear_bound
};

Amplification amplification_check(double delta, std::int64_t n);

/// 2 n exp[-(q0/r_t - q)/xi]: q0 is the protected locality, q the probe locality.
/// This is the value for probes normalized to ||Gamma|| = q.
double topo_error_rhs(const BoundParams& p, int q0, int q, double t);
/// topo_error_rhs / q, the same bound for unit-norm probes.
double topo_error_rhs_unit(const BoundParams& p, int q0, int q, double t);

struct BandConstants {
  double c_v = 0.0;  // 8 N e^{5/(2 xi)} n
  double mu = 0.0;   // 1/(2 xi)
};

BandConstants band_constants(const BoundParams& p, double t, std::size_t n_sites);
/// C_v e^{-mu gap}.
double band_rhs(const BoundParams& p, double t, std::size_t n_sites, double gap);

struct QSchedule {
  int q0 = 1;
  int q = 1;
  std::int64_t n = 1;
  int delta_q = 0;
  std::vector<int> levels;  // q_1 ... q_n
};

/// delta_q = floor((q - 2^n q0)/(2^n - 1)), q_m = 2 q_{m-1} + delta_q.
/// Throws InfeasibleError when q < 2^n q0.
QSchedule q_schedule(int q0, int q, std::int64_t n);

}  // namespace klocal
