// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/truncator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "klocal/errors.hpp"
#include "klocal/model.hpp"

namespace klocal {

NestedCommutator nested_commutator(const KLocalOperator& H, const KLocalOperator& gamma, int m,
                                   double threshold) {
  if (H.n_sites() != gamma.n_sites()) {
    throw DimensionError("H and Gamma act on different numbers of sites");
  }
  if (m < 0) throw DomainError("nesting depth must be non-negative", "m");
  NestedCommutator out{gamma, 0.0};
  for (int level = 0; level < m && !out.value.empty(); ++level) {
    PruneResult r = prune(commutator(H, out.value), threshold);
    out.value = std::move(r.pruned);
    out.dropped += r.dropped_weight;
  }
  return out;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log |(-it)^m / m!|
double log_series_coeff(double t, int m) {
  if (m == 0) return 0.0;
  if (t == 0.0) return kNegInf;
  return m * std::log(std::abs(t)) - std::lgamma(m + 1.0);
}

/// (-it)^m / m! as a complex number.
Complex series_coeff(double t, int m) {
  const double mag = std::exp(log_series_coeff(t, m));
  // (-i sgn t)^m = i^{-m} for t > 0, i^{m} for t < 0
  return times_i_power(mag, t >= 0.0 ? -m : m);
}

struct SeriesStep {
  KLocalOperator witness;
  int m0 = 0;
  int terms_used = 0;
  double budget = 0.0;
};

SeriesStep series_step(const KLocalOperator& H, double h_upper, const KLocalOperator& gamma,
                       int from_q, int to_q, int k, double t, double threshold) {
  SeriesStep s;
  s.m0 = (to_q - from_q) / k;
  OperatorAccumulator acc(gamma.n_sites());
  acc.add(gamma);
  if (t == 0.0 || s.m0 == 0 || gamma.empty()) {
    s.witness = std::move(acc).finish();
    return s;
  }

  std::vector<double> dropped(static_cast<std::size_t>(s.m0) + 1, 0.0);
  const double cutoff = threshold * 1e-3;
  const double ad_norm = 2.0 * h_upper;
  KLocalOperator level = gamma;
  for (int m = 1; m <= s.m0; ++m) {
    PruneResult r = prune(commutator(H, level), threshold);
    level = std::move(r.pruned);
    dropped[static_cast<std::size_t>(m)] = r.dropped_weight;
    s.terms_used = m;
    if (level.empty()) break;
    acc.add(level, series_coeff(t, m));
    if (m == s.m0 || cutoff <= 0.0) continue;
    // Remaining orders m+1..m0 are bounded by a geometric tail with ratio
    // 2||H|| |t| / (j+1), decreasing in j.
    const double rho = ad_norm * std::abs(t) / (m + 1.0);
    if (rho < 0.5) {
      const double head = std::exp(log_series_coeff(t, m)) * level.norm_upper();
      const double tail = head * rho / (1.0 - rho);
      if (tail < cutoff) {
        s.budget += tail;
        break;
      }
    }
  }
  // A level pruned at order j perturbs every later order j+i by at most
  // (2||H||)^i times the dropped weight.
  const double log_ad = ad_norm > 0.0 ? std::log(ad_norm) : kNegInf;
  for (int j = 1; j <= s.terms_used; ++j) {
    const double d = dropped[static_cast<std::size_t>(j)];
    if (d == 0.0) continue;
    double weight = 0.0;
    for (int i = 0; j + i <= s.m0; ++i) {
      const double log_term = log_series_coeff(t, j + i) + (i == 0 ? 0.0 : i * log_ad);
      if (log_term == kNegInf) break;
      weight += std::exp(log_term);
    }
    s.budget += d * weight;
  }
  s.witness = std::move(acc).finish();
  return s;
}

struct HamiltonianInfo {
  BoundParams params;
  double h_upper = 0.0;
};

HamiltonianInfo describe(const KLocalOperator& H) {
  const StructuralConstants c = structural_constants(H);
  return {BoundParams::make(c.g, static_cast<int>(std::max<std::size_t>(c.k, 1))), c.norm_upper};
}

void check_witness(const KLocalOperator& w, int q) {
  if (static_cast<int>(w.locality()) > q) {
    throw std::logic_error("witness locality " + std::to_string(w.locality()) +
                           " exceeds target " + std::to_string(q));
  }
}

}  // namespace

TruncationReport hadamard_truncate(const KLocalOperator& H, const KLocalOperator& gamma,
                                   double t, int q, const TruncationOptions& options) {
  if (H.n_sites() != gamma.n_sites()) {
    throw DimensionError("H and Gamma act on different numbers of sites");
  }
  const HamiltonianInfo info = describe(H);
  const int loc = static_cast<int>(gamma.locality());
  if (q < std::max(loc, 1)) {
    throw InfeasibleError("target locality q = " + std::to_string(q) +
                              " is below the locality of Gamma (" + std::to_string(loc) + ")",
                          "q");
  }
  if (!(info.params.kappa * std::abs(t) < 2.0)) {
    throw DomainError("series truncation requires |t| < 2/kappa", "t");
  }
  TruncationReport rep;
  rep.q0 = std::max(loc, 1);
  rep.target_q = q;
  rep.t = t;
  rep.gamma_norm = options.gamma_norm.value_or(gamma.norm_upper());

  SeriesStep s = series_step(H, info.h_upper, gamma, rep.q0, q, info.params.k, t,
                             options.threshold);
  rep.witness = std::move(s.witness);
  rep.m0 = s.m0;
  rep.pruning_budget = s.budget;
  rep.bound_rhs = small_time_rhs(info.params, rep.q0, q, t, rep.gamma_norm);
  rep.steps.push_back({rep.q0, q, s.m0, s.terms_used, s.budget,
                       small_time_rhs(info.params, rep.q0, q, t, 1.0)});
  check_witness(rep.witness, q);
  return rep;
}

TruncationReport chained_truncate(const KLocalOperator& H, const KLocalOperator& gamma, double t,
                                  int q, const TruncationOptions& options) {
  if (H.n_sites() != gamma.n_sites()) {
    throw DimensionError("H and Gamma act on different numbers of sites");
  }
  const HamiltonianInfo info = describe(H);
  const TimeGrid tg = time_grid(info.params, t);
  const int q0 = std::max(static_cast<int>(gamma.locality()), 1);

  TruncationReport rep;
  rep.q0 = q0;
  rep.target_q = q;
  rep.t = t;
  rep.gamma_norm = options.gamma_norm.value_or(gamma.norm_upper());
  rep.schedule = q_schedule(q0, q, tg.n);

  const double dt = t / static_cast<double>(tg.n);
  KLocalOperator current = gamma;
  int from_q = q0;
  for (int level : rep.schedule->levels) {
    SeriesStep s = series_step(H, info.h_upper, current, from_q, level, info.params.k, dt,
                               options.threshold);
    rep.pruning_budget += s.budget;
    rep.steps.push_back({from_q, level, s.m0, s.terms_used, s.budget,
                         small_time_rhs(info.params, from_q, level, dt, 1.0)});
    rep.m0 = s.m0;
    current = std::move(s.witness);
    check_witness(current, level);
    from_q = level;
  }
  rep.witness = std::move(current);
  rep.bound_rhs = main_rhs(info.params, q0, q, t, rep.gamma_norm);
  check_witness(rep.witness, q);
  return rep;
}

KLocalOperator series_partial_sum(const KLocalOperator& H, const KLocalOperator& gamma, double t,
                                  int order) {
  OperatorAccumulator acc(gamma.n_sites());
  acc.add(gamma);
  KLocalOperator level = gamma;
  for (int m = 1; m <= order; ++m) {
    level = commutator(H, level);
    acc.add(level, series_coeff(t, m));
  }
  return std::move(acc).finish();
}

}  // namespace klocal
