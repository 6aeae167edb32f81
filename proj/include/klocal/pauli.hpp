// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pauli.hpp
 * @brief Weighted Pauli-string algebra on up to 64 qubits.
 *
 * A PauliString is stored as two bitmasks (X part, Z part); a site with both
 * bits set carries Y. The single-site operator with bits (x, z) is
 * i^{xz} X^x Z^z, so Y = iXZ and every string is Hermitian and unitary.
 *
 * KLocalOperator is a canonical sum of terms: strings are unique, sorted by
 * (x_mask, z_mask), and coefficients with |c| < kZeroTolerance are removed.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace klocal {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxSites = 64;

/// Coefficients below this magnitude are dropped during canonical merge.
inline constexpr double kZeroTolerance = 1e-14;

/// Single-site letter; the enumerator value packs (x bit, z bit << 1).
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

char to_char(Pauli p) noexcept;
Pauli pauli_from_char(char c);

/// i^power for power taken mod 4, applied exactly to a complex number.
Complex times_i_power(Complex value, int power) noexcept;

class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_sites);
  PauliString(std::size_t n_sites, std::uint64_t x_mask, std::uint64_t z_mask);

  /// Letters[j] acts on sites[j]. Sites must be distinct and in range.
  static PauliString from_sites(std::size_t n_sites,
                                std::span<const std::size_t> sites,
                                std::string_view letters);
  /// Dense label, site 0 first, e.g. "XIZ". 'I' marks identity.
  static PauliString parse(std::string_view dense);

  std::size_t n_sites() const noexcept { return n_sites_; }
  std::uint64_t x_mask() const noexcept { return x_; }
  std::uint64_t z_mask() const noexcept { return z_; }
  std::uint64_t support_mask() const noexcept { return x_ | z_; }
  std::size_t weight() const noexcept;
  bool is_identity() const noexcept { return (x_ | z_) == 0; }

  Pauli at(std::size_t site) const;
  void set(std::size_t site, Pauli p);

  std::vector<std::size_t> support() const;
  /// Letters on the support, in increasing site order ("ZX" for Z0 X3).
  std::string support_letters() const;
  std::string to_string() const;

  bool commutes_with(const PauliString& other) const noexcept;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString& a, const PauliString& b) noexcept {
    if (auto c = a.x_ <=> b.x_; c != 0) return c;
    return a.z_ <=> b.z_;
  }

 private:
  std::size_t n_sites_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept;
};

/// a·b = i^phase_power · product.
struct StringProduct {
  int phase_power;  // in {0,1,2,3}
  PauliString product;

  Complex phase() const noexcept { return times_i_power(1.0, phase_power); }
};

StringProduct multiply(const PauliString& a, const PauliString& b);

struct Term {
  PauliString string;
  Complex coeff;

  std::size_t weight() const noexcept { return string.weight(); }
  double norm() const noexcept { return std::abs(coeff); }
};

class KLocalOperator {
 public:
  KLocalOperator() = default;
  explicit KLocalOperator(std::size_t n_sites) : n_sites_(n_sites) {}
  /// Merges duplicate strings and removes vanishing coefficients.
  KLocalOperator(std::size_t n_sites, std::span<const Term> terms);
  KLocalOperator(std::size_t n_sites, std::initializer_list<Term> terms)
      : KLocalOperator(n_sites, std::span<const Term>(terms.begin(), terms.size())) {}

  std::size_t n_sites() const noexcept { return n_sites_; }
  std::span<const Term> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  /// Maximum term weight; 0 for the empty operator.
  std::size_t locality() const noexcept;
  /// Sum of |coeff|, an upper bound on the operator norm.
  double norm_upper() const noexcept;
  std::uint64_t support_mask() const noexcept;
  Complex coefficient(const PauliString& p) const;
  /// True when every coefficient is real up to tol (strings are Hermitian).
  bool is_hermitian(double tol = 1e-12) const noexcept;

  KLocalOperator scaled(Complex factor) const;

  friend KLocalOperator operator+(const KLocalOperator& a, const KLocalOperator& b);
  friend KLocalOperator operator-(const KLocalOperator& a, const KLocalOperator& b);
  friend KLocalOperator operator*(Complex s, const KLocalOperator& a) { return a.scaled(s); }

 private:
  friend class OperatorAccumulator;
  std::size_t n_sites_ = 0;
  std::vector<Term> terms_;
};

/// Builds a canonical operator from contributions in arbitrary order.
/// Contributions to the same string are summed in insertion order.
class OperatorAccumulator {
 public:
  explicit OperatorAccumulator(std::size_t n_sites) : n_sites_(n_sites) {}

  void add(const PauliString& p, Complex coeff);
  void add(const KLocalOperator& op, Complex factor = 1.0);
  KLocalOperator finish() &&;

 private:
  std::size_t n_sites_;
  std::unordered_map<PauliString, Complex, PauliStringHash> acc_;
};

/// [a, b] = ab - ba.
KLocalOperator commutator(const KLocalOperator& a, const KLocalOperator& b);
/// Full product ab.
KLocalOperator product(const KLocalOperator& a, const KLocalOperator& b);

inline double norm_upper(const KLocalOperator& op) noexcept { return op.norm_upper(); }

struct PruneResult {
  KLocalOperator pruned;
  double dropped_weight = 0.0;
};

/// Keeps terms with |coeff| > threshold. dropped_weight is the sum of the
/// removed |coeff|, which bounds the operator-norm change.
PruneResult prune(const KLocalOperator& op, double threshold);

/// Largest |difference| of coefficients between two operators.
double max_coefficient_difference(const KLocalOperator& a, const KLocalOperator& b);

std::string to_string(const KLocalOperator& op);

}  // namespace klocal
