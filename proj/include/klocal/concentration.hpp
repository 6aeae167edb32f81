// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file concentration.hpp
 * @brief Spectral concentration of extensive observables in evolved product
 *        states, block structure of the evolved parent Hamiltonian, and a
 *        sampled estimator for topological-order error.
 *
 * An extensive observable A = sum_i a_i has one unit-norm Hermitian 1-local
 * term per site, so a_i = +-sigma_i for some Pauli axis. Its eigenbasis is the
 * tensor product of the single-site eigenbases: rotated basis state |b> has
 * eigenvalue N - 2 popcount(b).
 */

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "klocal/bounds.hpp"
#include "klocal/oracle.hpp"
#include "klocal/pauli.hpp"

namespace klocal {

/// a0 |0> + a1 |1>.
struct SiteState {
  Complex a0{1.0, 0.0};
  Complex a1{0.0, 0.0};

  static SiteState zero() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static SiteState one() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  static SiteState plus();
  static SiteState minus();
  /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
  static SiteState bloch(double theta, double phi);

  /// Bloch vector (<X>, <Y>, <Z>).
  std::array<double, 3> bloch_vector() const;
};

class ProductState {
 public:
  /// Throws ValidationError if a site state is not normalized within 1e-10.
  explicit ProductState(std::vector<SiteState> sites);
  static ProductState uniform(std::size_t n, SiteState s);

  std::size_t n_sites() const noexcept { return sites_.size(); }
  const std::vector<SiteState>& sites() const noexcept { return sites_; }
  Vector to_vector(const OracleLimits& limits = {}) const;

 private:
  std::vector<SiteState> sites_;
};

/// 1-local H_p = -sum_i n_i . sigma_i whose ground state is the product
/// state, with energy -N and ||h_i|| = 1.
KLocalOperator parent_hamiltonian(const ProductState& state);

/// Throws ValidationError if |<psi|psi> - 1| > 1e-10.
void require_normalized(const Vector& psi, const char* field);

Vector evolve_product_state(const Propagator& H, const ProductState& state, double t);
Vector evolve_product_state(const KLocalOperator& H, const ProductState& state, double t,
                            const OracleLimits& limits = {});

class ExtensiveObservable {
 public:
  /// Exactly one term per site, each of weight 1 with coefficient +-1.
  ExtensiveObservable(std::size_t n_sites, std::span<const Term> site_terms);
  /// sum_i sigma^axis_i.
  static ExtensiveObservable uniform(std::size_t n_sites, Pauli axis);

  std::size_t n_sites() const noexcept { return n_sites_; }
  const std::vector<Term>& site_terms() const noexcept { return terms_; }
  KLocalOperator as_operator() const;

  static double eigenvalue(std::size_t n_sites, std::uint64_t rotated_index) {
    return static_cast<double>(n_sites) - 2.0 * std::popcount(rotated_index);
  }

  /// Coordinates of psi in the eigenbasis of A.
  Vector to_eigenbasis(const Vector& psi) const;
  /// U^dagger M U with U the eigenbasis of A.
  Matrix to_eigenbasis(const Matrix& m) const;

  /// p[w] = weight of psi on the eigenvalue N - 2w, w = 0..N.
  std::vector<double> distribution(const Vector& psi) const;
  double mean(const Vector& psi) const;

 private:
  std::size_t n_sites_;
  std::vector<Term> terms_;                 // indexed by site
  std::vector<Eigen::Matrix2cd> rotations_;  // columns: +1, -1 eigenvectors
};

struct TailSample {
  double r = 0.0;
  double tail = 0.0;  // ||P_{A >= mean + r} psi||
};

struct TailProfile {
  double mean = 0.0;
  std::vector<TailSample> samples;
};

/// Integers 0..N - ceil(mean); {0} when that range is empty.
std::vector<double> default_r_grid(std::size_t n_sites, double mean);

/// Eigenvalues within 1e-9 of the threshold count as included.
TailProfile tail_profile(const Vector& psi, const ExtensiveObservable& A,
                         std::span<const double> r_grid = {});

struct TailFit {
  double c1 = 0.0;
  double c2 = 0.0;          // from the fitted slope, scale r_t sqrt(tN)
  double decay_rate = 0.0;  // -d log(tail)/dR
  std::size_t points = 0;
};

/// Least squares of log tail against R over samples with tail > 1e-300 and
/// R > 0. Reported for inspection only. Empty when fewer than two points.
std::optional<TailFit> fit_tail_constants(const TailProfile& profile, double r_t, double t,
                                          std::size_t n_sites);

struct BandMatrix {
  double bin_width = 1.0;
  double origin = 0.0;  // -N
  /// norms(x, x') = ||P_x M P_x'||; bin x covers [origin + x w, origin + (x+1) w).
  Eigen::MatrixXd norms;
  std::vector<std::size_t> bin_sizes;
};

/// Bins are snapped by 1e-9 so eigenvalues on an edge fall in the upper bin.
BandMatrix band_matrix(const DenseOperator& op, const ExtensiveObservable& A, double bin_width);

struct TopoEstimate {
  double eps_hat = 0.0;
  double diagonal_max = 0.0;  // max |<psi|G|psi> - <psi~|G|psi~>|
  double cross_max = 0.0;     // max |<psi|G|psi~>|
  std::size_t probes = 0;
};

/// Evaluates the two defining quantities on explicit probes as given.
TopoEstimate probe_values(const Vector& psi, const Vector& psi_tilde,
                          std::span<const KLocalOperator> probes);

/// Random probes: each is a sum of N weight-q strings with +-1 coefficients,
/// rescaled to norm q (exact norm within the operator limit, norm_upper
/// otherwise, so the estimate stays a lower bound).
std::vector<KLocalOperator> random_probes(std::size_t n_sites, std::size_t q,
                                          std::size_t n_samples, std::uint64_t seed,
                                          const OracleLimits& limits = {});

TopoEstimate topo_error_estimate(const Vector& psi, const Vector& psi_tilde, std::size_t q,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const OracleLimits& limits = {});

}  // namespace klocal
