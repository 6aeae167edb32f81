// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "klocal/errors.hpp"

namespace klocal {

namespace {

constexpr Eigen::Index kFullDecompositionDim = 1024;

std::size_t dim_of(std::size_t n_sites) { return std::size_t{1} << n_sites; }

Complex pauli_phase(std::uint64_t x, std::uint64_t z, std::uint64_t b) {
  const int power = std::popcount(x & z) + 2 * (std::popcount(z & b) & 1);
  return times_i_power(1.0, power);
}

double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Largest eigenvalue of a Hermitian positive semidefinite matrix.
double top_eigenvalue_psd(const Matrix& g) {
  if (g.rows() == 0) return 0.0;
  if (g.rows() <= kFullDecompositionDim) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues().maxCoeff());
  }
  // Power iteration from a fixed dense start vector.
  Vector v = Vector::Ones(g.rows()) / std::sqrt(static_cast<double>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i) v[i] *= 1.0 + 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Vector w = g * v;
    const double next = std::real(v.dot(w));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (std::abs(next - lambda) <= 1e-10 * std::max(1e-300, std::abs(next))) {
      return std::max(0.0, next);
    }
    lambda = next;
  }
  return std::max(0.0, lambda);
}

}  // namespace

void require_sites(std::size_t n_sites, std::size_t limit, const char* what) {
  if (n_sites > limit) {
    throw ResourceError("n_sites = " + std::to_string(n_sites) + " exceeds the " + what +
                            " limit N_max = " + std::to_string(limit),
                        "nmax");
  }
}

DenseOperator::DenseOperator(std::size_t n_sites, Matrix matrix)
    : n_sites_(n_sites), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(dim_of(n_sites));
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw DimensionError("matrix is not 2^n x 2^n for n = " + std::to_string(n_sites));
  }
}

DenseOperator DenseOperator::zero(std::size_t n_sites) {
  const auto d = static_cast<Eigen::Index>(dim_of(n_sites));
  return {n_sites, Matrix::Zero(d, d)};
}

DenseOperator DenseOperator::identity(std::size_t n_sites) {
  const auto d = static_cast<Eigen::Index>(dim_of(n_sites));
  return {n_sites, Matrix::Identity(d, d)};
}

bool DenseOperator::is_hermitian(double tol) const {
  const double scale = std::max(1.0, max_abs_entry(matrix_));
  return max_abs_entry(matrix_ - matrix_.adjoint()) <= tol * scale;
}

void DenseOperator::require_hermitian(const char* field, double tol) const {
  if (!is_hermitian(tol)) {
    throw ValidationError(std::string(field) + " is not Hermitian", field);
  }
}

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
  if (a.n_sites_ != b.n_sites_) throw DimensionError("operand site counts differ");
  return {a.n_sites_, a.matrix_ + b.matrix_};
}

DenseOperator operator-(const DenseOperator& a, const DenseOperator& b) {
  if (a.n_sites_ != b.n_sites_) throw DimensionError("operand site counts differ");
  return {a.n_sites_, a.matrix_ - b.matrix_};
}

DenseOperator to_dense(const KLocalOperator& op, const OracleLimits& limits) {
  require_sites(op.n_sites(), limits.state_sites, "dense");
  const std::size_t d = dim_of(op.n_sites());
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const Term& t : op.terms()) {
    const std::uint64_t x = t.string.x_mask();
    const std::uint64_t z = t.string.z_mask();
    for (std::uint64_t b = 0; b < d; ++b) {
      m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) +=
          t.coeff * pauli_phase(x, z, b);
    }
  }
  return {op.n_sites(), std::move(m)};
}

Vector apply(const KLocalOperator& op, const Vector& v) {
  const std::size_t d = dim_of(op.n_sites());
  if (static_cast<std::size_t>(v.size()) != d) {
    throw DimensionError("vector length does not match 2^n");
  }
  Vector out = Vector::Zero(v.size());
  for (const Term& t : op.terms()) {
    const std::uint64_t x = t.string.x_mask();
    const std::uint64_t z = t.string.z_mask();
    for (std::uint64_t b = 0; b < d; ++b) {
      out[static_cast<Eigen::Index>(b ^ x)] +=
          t.coeff * pauli_phase(x, z, b) * v[static_cast<Eigen::Index>(b)];
    }
  }
  return out;
}

KLocalOperator pauli_decompose(const DenseOperator& op, double tol, const OracleLimits& limits) {
  require_sites(op.n_sites(), limits.operator_sites, "operator");
  const std::size_t n = op.n_sites();
  const std::size_t d = dim_of(n);
  const double inv_dim = 1.0 / static_cast<double>(d);
  const Matrix& m = op.matrix();
  std::vector<Term> terms;
  std::vector<Complex> v(d);
  for (std::uint64_t x = 0; x < d; ++x) {
    for (std::uint64_t b = 0; b < d; ++b) {
      v[b] = m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b));
    }
    // Walsh-Hadamard: v[z] <- sum_b (-1)^{popcount(z & b)} v[b].
    for (std::size_t h = 1; h < d; h <<= 1) {
      for (std::size_t i = 0; i < d; i += 2 * h) {
        for (std::size_t j = i; j < i + h; ++j) {
          const Complex a = v[j];
          const Complex c = v[j + h];
          v[j] = a + c;
          v[j + h] = a - c;
        }
      }
    }
    for (std::uint64_t z = 0; z < d; ++z) {
      // Tr(P^dagger M) = conj(i^{popcount(x & z)}) * WHT(v)[z]
      const Complex c = times_i_power(v[z], -std::popcount(x & z)) * inv_dim;
      if (std::abs(c) > tol) terms.push_back({PauliString(n, x, z), c});
    }
  }
  return KLocalOperator(n, terms);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = max_abs_entry(m);
  if (scale == 0.0) return 0.0;
  if (m.rows() == m.cols()) {
    const Matrix diff = m - m.adjoint();
    if (max_abs_entry(diff) <= 1e-13 * scale) {
      if (m.rows() <= kFullDecompositionDim) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
      }
    } else if (max_abs_entry(m + m.adjoint()) <= 1e-13 * scale) {
      if (m.rows() <= kFullDecompositionDim) {
        const Matrix h = Complex(0.0, 1.0) * m;
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
      }
    }
  }
  const Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  return std::sqrt(top_eigenvalue_psd(gram));
}

double operator_norm_exact(const DenseOperator& op, const OracleLimits& limits) {
  require_sites(op.n_sites(), limits.operator_sites, "operator");
  return spectral_norm(op.matrix());
}

double operator_norm_exact(const KLocalOperator& op, const OracleLimits& limits) {
  require_sites(op.n_sites(), limits.operator_sites, "operator");
  if (op.empty()) return 0.0;
  if (op.size() == 1) return op.terms()[0].norm();
  return spectral_norm(to_dense(op, limits).matrix());
}

Propagator::Propagator(const DenseOperator& H) : n_sites_(H.n_sites()) {
  H.require_hermitian("H");
  const Matrix herm = 0.5 * (H.matrix() + H.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  if (es.info() != Eigen::Success) throw ResourceError("eigendecomposition of H failed");
  energies_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

DenseOperator Propagator::evolve(const DenseOperator& gamma, double t) const {
  if (gamma.n_sites() != n_sites_) throw DimensionError("H and Gamma act on different sites");
  if (t == 0.0) return gamma;
  Matrix g = vectors_.adjoint() * gamma.matrix() * vectors_;
  const Eigen::Index d = g.rows();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      g(a, b) *= std::polar(1.0, -(energies_[a] - energies_[b]) * t);
    }
  }
  return {n_sites_, vectors_ * g * vectors_.adjoint()};
}

Vector Propagator::evolve_state(const Vector& psi, double t) const {
  if (psi.size() != vectors_.rows()) throw DimensionError("state length does not match H");
  if (t == 0.0) return psi;
  Vector c = vectors_.adjoint() * psi;
  for (Eigen::Index a = 0; a < c.size(); ++a) c[a] *= std::polar(1.0, -energies_[a] * t);
  return vectors_ * c;
}

DenseOperator heisenberg_evolve(const KLocalOperator& H, const KLocalOperator& gamma, double t,
                                const OracleLimits& limits) {
  if (H.n_sites() != gamma.n_sites()) {
    throw DimensionError("H and Gamma act on different numbers of sites");
  }
  require_sites(H.n_sites(), limits.operator_sites, "operator");
  if (!H.is_hermitian()) throw ValidationError("H is not Hermitian", "H");
  const Propagator prop(to_dense(H, limits));
  return prop.evolve(to_dense(gamma, limits), t);
}

double WeightSpectrum::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double WeightSpectrum::above(std::size_t q) const {
  double s = 0.0;
  for (std::size_t i = q + 1; i < weights.size(); ++i) s += weights[i];
  return s;
}

WeightSpectrum weight_spectrum(const DenseOperator& op, const OracleLimits& limits) {
  const KLocalOperator coeffs = pauli_decompose(op, 0.0, limits);
  WeightSpectrum ws;
  ws.weights.assign(op.n_sites() + 1, 0.0);
  for (const Term& t : coeffs.terms()) ws.weights[t.weight()] += std::norm(t.coeff);
  return ws;
}

QLocalProjection q_local_project(const DenseOperator& op, std::size_t q,
                                 const OracleLimits& limits) {
  if (q > op.n_sites()) throw DomainError("q exceeds the number of sites", "q");
  const KLocalOperator coeffs = pauli_decompose(op, 0.0, limits);
  std::vector<Term> kept;
  for (const Term& t : coeffs.terms()) {
    if (t.weight() <= q) kept.push_back(t);
  }
  QLocalProjection out;
  out.projected = to_dense(KLocalOperator(op.n_sites(), kept), limits);
  const Matrix residual = op.matrix() - out.projected.matrix();
  out.residual_fro = residual.norm();
  out.residual_opnorm = spectral_norm(residual);
  return out;
}

double energy_block_norm(const Propagator& H, const DenseOperator& gamma, double e_lo,
                         double e_hi) {
  if (gamma.n_sites() != H.n_sites()) throw DimensionError("H and Gamma act on different sites");
  const Eigen::VectorXd& e = H.energies();
  const Matrix& v = H.eigenvectors();
  std::vector<Eigen::Index> hi;
  std::vector<Eigen::Index> lo;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (e[i] >= e_hi - 1e-10 * std::max(1.0, std::abs(e_hi))) hi.push_back(i);
    if (e[i] <= e_lo + 1e-10 * std::max(1.0, std::abs(e_lo))) lo.push_back(i);
  }
  if (hi.empty() || lo.empty()) return 0.0;
  Matrix vh(v.rows(), static_cast<Eigen::Index>(hi.size()));
  Matrix vl(v.rows(), static_cast<Eigen::Index>(lo.size()));
  for (std::size_t j = 0; j < hi.size(); ++j) vh.col(static_cast<Eigen::Index>(j)) = v.col(hi[j]);
  for (std::size_t j = 0; j < lo.size(); ++j) vl.col(static_cast<Eigen::Index>(j)) = v.col(lo[j]);
  return spectral_norm(vh.adjoint() * gamma.matrix() * vl);
}

double energy_block_norm(const DenseOperator& H, const DenseOperator& gamma, double e_lo,
                         double e_hi, const OracleLimits& limits) {
  require_sites(H.n_sites(), limits.operator_sites, "operator");
  return energy_block_norm(Propagator(H), gamma, e_lo, e_hi);
}

}  // namespace klocal
