// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file truncator.hpp
 * @brief Explicit q-local approximants of Gamma(t) = e^{-iHt} Gamma e^{iHt}.
 *
 * The series witness is sum_{m=0}^{m0} (-it)^m/m! L_m with L_0 = Gamma and
 * L_m = [H, L_{m-1}], truncated at m0 = floor((q - q0)/k) so the result is
 * q-local. The (-it)^m sign follows from dGamma/dt = -i[H, Gamma(t)].
 *
 * Each nested level is pruned at a coefficient threshold. The report's
 * pruning_budget is an operator-norm bound on everything that pruning and
 * early series cut-off removed, including propagation of a pruned level
 * through later commutators (||ad_H|| <= 2 norm_upper(H)).
 */

#pragma once

#include <optional>
#include <vector>

#include "klocal/bounds.hpp"
#include "klocal/pauli.hpp"

namespace klocal {

inline constexpr double kDefaultPruneThreshold = 1e-12;

struct NestedCommutator {
  KLocalOperator value;
  double dropped = 0.0;
};

/// L_m with pruning at `threshold` after each level; `dropped` sums the
/// removed |coeff| over all levels.
NestedCommutator nested_commutator(const KLocalOperator& H, const KLocalOperator& gamma,
                                   int m, double threshold = kDefaultPruneThreshold);

struct TruncationOptions {
  double threshold = kDefaultPruneThreshold;
  /// Norm of Gamma used in the analytic bound. Defaults to norm_upper(Gamma),
  /// which is never below the exact norm.
  std::optional<double> gamma_norm;
};

struct TruncationStep {
  int from_q = 0;
  int to_q = 0;
  int m0 = 0;
  int terms_used = 0;  // series orders actually summed (may stop before m0)
  double pruning_budget = 0.0;
  double step_rhs = 0.0;  // small-time bound for this step, relative to the input norm
};

struct TruncationReport {
  KLocalOperator witness;
  int q0 = 1;
  int m0 = 0;
  int target_q = 1;
  double t = 0.0;
  double pruning_budget = 0.0;
  double bound_rhs = 0.0;
  double gamma_norm = 0.0;
  std::optional<QSchedule> schedule;
  std::vector<TruncationStep> steps;
};

/// Single series truncation; requires |t| < 2/kappa and q >= locality(gamma).
TruncationReport hadamard_truncate(const KLocalOperator& H, const KLocalOperator& gamma,
                                   double t, int q, const TruncationOptions& options = {});

/// n = ceil(kappa |t|) series steps of length t/n with the doubling schedule
/// q_m = 2 q_{m-1} + delta_q; requires q >= 2^n locality(gamma).
TruncationReport chained_truncate(const KLocalOperator& H, const KLocalOperator& gamma,
                                  double t, int q, const TruncationOptions& options = {});

/// Sum of (-it)^m/m! L_m for m <= order, without truncation logic.
KLocalOperator series_partial_sum(const KLocalOperator& H, const KLocalOperator& gamma,
                                  double t, int order);

}  // namespace klocal
