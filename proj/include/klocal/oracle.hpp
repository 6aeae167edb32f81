// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file oracle.hpp
 * @brief Dense ground truth for small systems.
 *
 * Basis states are little-endian: site i is bit i of the basis index. A Pauli
 * string with masks (x, z) acts as
 *
 *     P|b> = i^{popcount(x & z)} (-1)^{popcount(z & b)} |b ^ x>.
 *
 * Size limits are hard: exceeding them raises ResourceError naming the limit.
 * Operator-norm work (norms, evolution of operators, Pauli decompositions)
 * defaults to 8 sites; state work defaults to 12.
 */

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "klocal/pauli.hpp"

namespace klocal {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct OracleLimits {
  std::size_t operator_sites = 8;
  std::size_t state_sites = 12;
};

/// Throws ResourceError if n_sites > limit.
void require_sites(std::size_t n_sites, std::size_t limit, const char* what);

class DenseOperator {
 public:
  DenseOperator() = default;
  DenseOperator(std::size_t n_sites, Matrix matrix);

  static DenseOperator zero(std::size_t n_sites);
  static DenseOperator identity(std::size_t n_sites);

  std::size_t n_sites() const noexcept { return n_sites_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const Matrix& matrix() const noexcept { return matrix_; }

  bool is_hermitian(double tol = 1e-10) const;
  /// Throws ValidationError unless Hermitian within tol (relative to the
  /// largest entry).
  void require_hermitian(const char* field, double tol = 1e-10) const;

  friend DenseOperator operator+(const DenseOperator& a, const DenseOperator& b);
  friend DenseOperator operator-(const DenseOperator& a, const DenseOperator& b);

 private:
  std::size_t n_sites_ = 0;
  Matrix matrix_;
};

DenseOperator to_dense(const KLocalOperator& op, const OracleLimits& limits = {});

/// v -> op v without forming the matrix.
Vector apply(const KLocalOperator& op, const Vector& v);

/// Orthonormal Pauli expansion, M = sum_P c_P P with c_P = Tr(P M) / 2^n.
/// Coefficients with |c_P| <= tol are omitted.
KLocalOperator pauli_decompose(const DenseOperator& op, double tol = 1e-13,
                               const OracleLimits& limits = {});

/// Largest singular value of a matrix (no size check).
double spectral_norm(const Matrix& m);

double operator_norm_exact(const DenseOperator& op, const OracleLimits& limits = {});
double operator_norm_exact(const KLocalOperator& op, const OracleLimits& limits = {});

/// Cached eigendecomposition H = V diag(E) V^dagger of a Hermitian operator.
class Propagator {
 public:
  explicit Propagator(const DenseOperator& H);

  std::size_t n_sites() const noexcept { return n_sites_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  const Matrix& eigenvectors() const noexcept { return vectors_; }

  /// e^{-iHt} gamma e^{iHt}.
  DenseOperator evolve(const DenseOperator& gamma, double t) const;
  /// e^{-iHt} psi.
  Vector evolve_state(const Vector& psi, double t) const;

 private:
  std::size_t n_sites_ = 0;
  Eigen::VectorXd energies_;
  Matrix vectors_;
};

DenseOperator heisenberg_evolve(const KLocalOperator& H, const KLocalOperator& gamma, double t,
                                const OracleLimits& limits = {});

struct WeightSpectrum {
  /// weights[q] = sum over weight-q strings of |c_P|^2, q = 0..N.
  std::vector<double> weights;
  double total() const;
  /// sum of weights[q'] for q' > q.
  double above(std::size_t q) const;
};

WeightSpectrum weight_spectrum(const DenseOperator& op, const OracleLimits& limits = {});

struct QLocalProjection {
  DenseOperator projected;
  double residual_fro = 0.0;
  double residual_opnorm = 0.0;
};

QLocalProjection q_local_project(const DenseOperator& op, std::size_t q,
                                 const OracleLimits& limits = {});

/// ||P_{>= e_hi} gamma P_{<= e_lo}|| with eigenprojectors of H. Eigenvalues
/// within 1e-10 of an edge are included, which can only increase the value.
double energy_block_norm(const Propagator& H, const DenseOperator& gamma, double e_lo,
                         double e_hi);
double energy_block_norm(const DenseOperator& H, const DenseOperator& gamma, double e_lo,
                         double e_hi, const OracleLimits& limits = {});

}  // namespace klocal
