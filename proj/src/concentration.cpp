// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "klocal/errors.hpp"

namespace klocal {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

/// v <- (I x ... x G_i x ... x I) v for every site i.
void apply_site_gates(Vector& v, std::size_t n_sites, const std::vector<Eigen::Matrix2cd>& gates) {
  const std::uint64_t d = std::uint64_t{1} << n_sites;
  for (std::size_t i = 0; i < n_sites; ++i) {
    const std::uint64_t m = std::uint64_t{1} << i;
    const Eigen::Matrix2cd& g = gates[i];
    for (std::uint64_t b = 0; b < d; ++b) {
      if (b & m) continue;
      const auto i0 = static_cast<Eigen::Index>(b);
      const auto i1 = static_cast<Eigen::Index>(b | m);
      const Complex v0 = v[i0];
      const Complex v1 = v[i1];
      v[i0] = g(0, 0) * v0 + g(0, 1) * v1;
      v[i1] = g(1, 0) * v0 + g(1, 1) * v1;
    }
  }
}

}  // namespace

SiteState SiteState::plus() { return {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}}; }
SiteState SiteState::minus() { return {{kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}}; }

SiteState SiteState::bloch(double theta, double phi) {
  return {{std::cos(theta / 2.0), 0.0}, std::polar(std::sin(theta / 2.0), phi)};
}

std::array<double, 3> SiteState::bloch_vector() const {
  const Complex c = std::conj(a0) * a1;
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(a0) - std::norm(a1)};
}

ProductState::ProductState(std::vector<SiteState> sites) : sites_(std::move(sites)) {
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const double n = std::norm(sites_[i].a0) + std::norm(sites_[i].a1);
    if (std::abs(n - 1.0) > 1e-10) {
      throw ValidationError("site state " + std::to_string(i) + " is not normalized",
                            "state[" + std::to_string(i) + "]");
    }
  }
}

ProductState ProductState::uniform(std::size_t n, SiteState s) {
  return ProductState(std::vector<SiteState>(n, s));
}

Vector ProductState::to_vector(const OracleLimits& limits) const {
  require_sites(n_sites(), limits.state_sites, "state");
  const std::uint64_t d = std::uint64_t{1} << n_sites();
  Vector v(static_cast<Eigen::Index>(d));
  for (std::uint64_t b = 0; b < d; ++b) {
    Complex amp = 1.0;
    for (std::size_t i = 0; i < n_sites(); ++i) {
      amp *= ((b >> i) & 1) ? sites_[i].a1 : sites_[i].a0;
    }
    v[static_cast<Eigen::Index>(b)] = amp;
  }
  return v;
}

KLocalOperator parent_hamiltonian(const ProductState& state) {
  const std::size_t n = state.n_sites();
  OperatorAccumulator acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = state.sites()[i].bloch_vector();
    const std::uint64_t m = std::uint64_t{1} << i;
    acc.add(PauliString(n, m, 0), -r[0]);
    acc.add(PauliString(n, m, m), -r[1]);
    acc.add(PauliString(n, 0, m), -r[2]);
  }
  return std::move(acc).finish();
}

void require_normalized(const Vector& psi, const char* field) {
  if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) {
    throw ValidationError(std::string(field) + " is not normalized", field);
  }
}

Vector evolve_product_state(const Propagator& H, const ProductState& state, double t) {
  if (state.n_sites() != H.n_sites()) throw DimensionError("state and H act on different sites");
  Vector psi = H.evolve_state(state.to_vector(), t);
  psi.normalize();
  return psi;
}

Vector evolve_product_state(const KLocalOperator& H, const ProductState& state, double t,
                            const OracleLimits& limits) {
  if (state.n_sites() != H.n_sites()) throw DimensionError("state and H act on different sites");
  require_sites(H.n_sites(), limits.state_sites, "state");
  if (!H.is_hermitian()) throw ValidationError("H is not Hermitian", "H");
  const Propagator prop(to_dense(H, limits));
  return evolve_product_state(prop, state, t);
}

ExtensiveObservable::ExtensiveObservable(std::size_t n_sites, std::span<const Term> site_terms)
    : n_sites_(n_sites), terms_(n_sites), rotations_(n_sites) {
  if (n_sites == 0 || n_sites > kMaxSites) throw DomainError("bad site count", "n_sites");
  if (site_terms.size() != n_sites) {
    throw ValidationError("an extensive observable needs exactly one term per site", "A");
  }
  std::vector<bool> seen(n_sites, false);
  for (const Term& t : site_terms) {
    if (t.string.n_sites() != n_sites || t.weight() != 1) {
      throw ValidationError("observable terms must be 1-local", "A");
    }
    if (std::abs(t.coeff.imag()) > 1e-12 || std::abs(std::abs(t.coeff.real()) - 1.0) > 1e-12) {
      throw ValidationError("observable terms must have coefficient +1 or -1", "A");
    }
    const std::size_t site = t.string.support().front();
    if (seen[site]) throw ValidationError("two observable terms on one site", "A");
    seen[site] = true;
    terms_[site] = {t.string, t.coeff.real() > 0 ? 1.0 : -1.0};

    Eigen::Matrix2cd u;
    switch (t.string.at(site)) {
      case Pauli::Z:
        u << 1.0, 0.0, 0.0, 1.0;
        break;
      case Pauli::X:
        u << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
        break;
      default:  // Y
        u << kInvSqrt2, kInvSqrt2, Complex(0.0, kInvSqrt2), Complex(0.0, -kInvSqrt2);
        break;
    }
    if (t.coeff.real() < 0) u.col(0).swap(u.col(1));
    rotations_[site] = u;
  }
}

ExtensiveObservable ExtensiveObservable::uniform(std::size_t n_sites, Pauli axis) {
  if (axis == Pauli::I) throw DomainError("axis must be X, Y or Z", "axis");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < n_sites; ++i) {
    PauliString p(n_sites);
    p.set(i, axis);
    terms.push_back({p, 1.0});
  }
  return ExtensiveObservable(n_sites, terms);
}

KLocalOperator ExtensiveObservable::as_operator() const { return KLocalOperator(n_sites_, terms_); }

Vector ExtensiveObservable::to_eigenbasis(const Vector& psi) const {
  if (psi.size() != (Eigen::Index{1} << n_sites_)) {
    throw DimensionError("state length does not match the observable");
  }
  std::vector<Eigen::Matrix2cd> adj(n_sites_);
  for (std::size_t i = 0; i < n_sites_; ++i) adj[i] = rotations_[i].adjoint();
  Vector v = psi;
  apply_site_gates(v, n_sites_, adj);
  return v;
}

Matrix ExtensiveObservable::to_eigenbasis(const Matrix& m) const {
  const Eigen::Index d = Eigen::Index{1} << n_sites_;
  if (m.rows() != d || m.cols() != d) {
    throw DimensionError("matrix size does not match the observable");
  }
  std::vector<Eigen::Matrix2cd> adj(n_sites_);
  for (std::size_t i = 0; i < n_sites_; ++i) adj[i] = rotations_[i].adjoint();
  // Left factor on columns, then the right factor through the adjoint.
  Matrix left(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    Vector col = m.col(c);
    apply_site_gates(col, n_sites_, adj);
    left.col(c) = col;
  }
  Matrix left_adj = left.adjoint();
  for (Eigen::Index c = 0; c < d; ++c) {
    Vector col = left_adj.col(c);
    apply_site_gates(col, n_sites_, adj);
    left_adj.col(c) = col;
  }
  return left_adj.adjoint();
}

std::vector<double> ExtensiveObservable::distribution(const Vector& psi) const {
  const Vector v = to_eigenbasis(psi);
  std::vector<double> p(n_sites_ + 1, 0.0);
  for (Eigen::Index b = 0; b < v.size(); ++b) {
    p[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(b)))] += std::norm(v[b]);
  }
  return p;
}

double ExtensiveObservable::mean(const Vector& psi) const {
  const std::vector<double> p = distribution(psi);
  double m = 0.0;
  for (std::size_t w = 0; w < p.size(); ++w) {
    m += p[w] * (static_cast<double>(n_sites_) - 2.0 * static_cast<double>(w));
  }
  return m;
}

std::vector<double> default_r_grid(std::size_t n_sites, double mean) {
  const long long top = static_cast<long long>(n_sites) - static_cast<long long>(std::ceil(mean - 1e-9));
  std::vector<double> grid;
  for (long long r = 0; r <= std::max(0LL, top); ++r) grid.push_back(static_cast<double>(r));
  return grid;
}

TailProfile tail_profile(const Vector& psi, const ExtensiveObservable& A,
                         std::span<const double> r_grid) {
  const std::vector<double> p = A.distribution(psi);
  const double n = static_cast<double>(A.n_sites());
  TailProfile prof;
  for (std::size_t w = 0; w < p.size(); ++w) prof.mean += p[w] * (n - 2.0 * w);
  std::vector<double> grid(r_grid.begin(), r_grid.end());
  if (grid.empty()) grid = default_r_grid(A.n_sites(), prof.mean);
  for (double r : grid) {
    if (!(r >= 0.0)) throw DomainError("R must be non-negative", "R");
    const double threshold = prof.mean + r - 1e-9;
    double s = 0.0;
    for (std::size_t w = 0; w < p.size(); ++w) {
      if (n - 2.0 * w >= threshold) s += p[w];
    }
    prof.samples.push_back({r, std::sqrt(s)});
  }
  return prof;
}

std::optional<TailFit> fit_tail_constants(const TailProfile& profile, double r_t, double t,
                                          std::size_t n_sites) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const TailSample& s : profile.samples) {
    if (s.r > 0.0 && s.tail > 1e-300) {
      xs.push_back(s.r);
      ys.push_back(std::log(s.tail));
    }
  }
  if (xs.size() < 2) return std::nullopt;
  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  const double slope = sxy / sxx;
  TailFit fit;
  fit.points = xs.size();
  fit.decay_rate = -slope;
  fit.c1 = std::exp(my - slope * mx);
  const double scale = r_t * std::sqrt(std::abs(t) * static_cast<double>(n_sites));
  fit.c2 = (slope < 0.0 && scale > 0.0) ? -1.0 / (slope * scale)
                                        : std::numeric_limits<double>::infinity();
  return fit;
}

BandMatrix band_matrix(const DenseOperator& op, const ExtensiveObservable& A, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw DomainError("bin width must be positive", "bin_width");
  }
  if (op.n_sites() != A.n_sites()) throw DimensionError("operator and observable differ in size");
  const std::size_t n = A.n_sites();
  const double origin = -static_cast<double>(n);
  const auto bin_of = [&](double lambda) {
    const double x = (lambda - origin) / bin_width;
    return static_cast<std::size_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
  };
  const std::size_t n_bins = bin_of(static_cast<double>(n)) + 1;

  BandMatrix out;
  out.bin_width = bin_width;
  out.origin = origin;
  out.bin_sizes.assign(n_bins, 0);
  std::vector<std::vector<Eigen::Index>> members(n_bins);
  const Eigen::Index d = op.dim();
  for (Eigen::Index b = 0; b < d; ++b) {
    const std::size_t x = bin_of(ExtensiveObservable::eigenvalue(n, static_cast<std::uint64_t>(b)));
    members[x].push_back(b);
    ++out.bin_sizes[x];
  }
  const Matrix rotated = A.to_eigenbasis(op.matrix());
  out.norms = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_bins),
                                    static_cast<Eigen::Index>(n_bins));
  for (std::size_t x = 0; x < n_bins; ++x) {
    if (members[x].empty()) continue;
    for (std::size_t y = 0; y < n_bins; ++y) {
      if (members[y].empty()) continue;
      Matrix block(static_cast<Eigen::Index>(members[x].size()),
                   static_cast<Eigen::Index>(members[y].size()));
      for (std::size_t i = 0; i < members[x].size(); ++i) {
        for (std::size_t j = 0; j < members[y].size(); ++j) {
          block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              rotated(members[x][i], members[y][j]);
        }
      }
      out.norms(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = spectral_norm(block);
    }
  }
  return out;
}

TopoEstimate probe_values(const Vector& psi, const Vector& psi_tilde,
                          std::span<const KLocalOperator> probes) {
  require_normalized(psi, "psi");
  require_normalized(psi_tilde, "psi_tilde");
  if (psi.size() != psi_tilde.size()) throw DimensionError("states differ in dimension");
  TopoEstimate est;
  for (const KLocalOperator& g : probes) {
    const Vector g_psi = apply(g, psi);
    const Vector g_tilde = apply(g, psi_tilde);
    const Complex diag = psi.dot(g_psi) - psi_tilde.dot(g_tilde);
    const Complex cross = psi.dot(g_tilde);
    est.diagonal_max = std::max(est.diagonal_max, std::abs(diag));
    est.cross_max = std::max(est.cross_max, std::abs(cross));
    ++est.probes;
  }
  est.eps_hat = std::max(est.diagonal_max, est.cross_max);
  return est;
}

std::vector<KLocalOperator> random_probes(std::size_t n_sites, std::size_t q,
                                          std::size_t n_samples, std::uint64_t seed,
                                          const OracleLimits& limits) {
  if (q < 1 || q > n_sites) throw DomainError("q must lie in [1, N]", "q");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(1, 3);
  std::bernoulli_distribution sign(0.5);
  std::vector<std::size_t> sites(n_sites);
  std::vector<KLocalOperator> probes;
  probes.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    OperatorAccumulator acc(n_sites);
    for (std::size_t j = 0; j < n_sites; ++j) {
      std::iota(sites.begin(), sites.end(), std::size_t{0});
      std::shuffle(sites.begin(), sites.end(), rng);
      PauliString p(n_sites);
      for (std::size_t i = 0; i < q; ++i) p.set(sites[i], static_cast<Pauli>(letter(rng)));
      acc.add(p, sign(rng) ? 1.0 : -1.0);
    }
    KLocalOperator g = std::move(acc).finish();
    if (g.empty()) continue;
    const double norm = n_sites <= limits.operator_sites ? operator_norm_exact(g, limits)
                                                         : g.norm_upper();
    if (norm <= 0.0) continue;
    probes.push_back(g.scaled(static_cast<double>(q) / norm));
  }
  return probes;
}

TopoEstimate topo_error_estimate(const Vector& psi, const Vector& psi_tilde, std::size_t q,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const OracleLimits& limits) {
  const auto d = static_cast<std::uint64_t>(psi.size());
  if (d == 0 || !std::has_single_bit(d)) throw DimensionError("state length is not 2^n");
  const auto n = static_cast<std::size_t>(std::countr_zero(d));
  require_sites(n, limits.state_sites, "state");
  const std::vector<KLocalOperator> probes = random_probes(n, q, n_samples, seed, limits);
  return probe_values(psi, psi_tilde, probes);
}

}  // namespace klocal
