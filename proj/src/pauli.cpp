// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/pauli.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "klocal/errors.hpp"

namespace klocal {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kResource: return "resource";
  }
  return "unknown";
}

char to_char(Pauli p) noexcept {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: break;
  }
  throw ValidationError(std::string("unknown Pauli letter '") + c + "'", "paulis");
}

Complex times_i_power(Complex v, int power) noexcept {
  switch (((power % 4) + 4) % 4) {
    case 0: return v;
    case 1: return {-v.imag(), v.real()};
    case 2: return -v;
    default: return {v.imag(), -v.real()};
  }
}

namespace {

std::uint64_t site_bit(std::size_t site) { return std::uint64_t{1} << site; }

void check_sites(std::size_t n_sites) {
  if (n_sites > kMaxSites) {
    throw ResourceError("at most " + std::to_string(kMaxSites) + " sites are supported",
                        "n_sites");
  }
}

}  // namespace

PauliString::PauliString(std::size_t n_sites) : n_sites_(n_sites) { check_sites(n_sites); }

PauliString::PauliString(std::size_t n_sites, std::uint64_t x_mask, std::uint64_t z_mask)
    : n_sites_(n_sites), x_(x_mask), z_(z_mask) {
  check_sites(n_sites);
  const std::uint64_t allowed = n_sites == 64 ? ~std::uint64_t{0} : site_bit(n_sites) - 1;
  if (((x_ | z_) & ~allowed) != 0) {
    throw DimensionError("Pauli string acts outside of " + std::to_string(n_sites) + " sites");
  }
}

PauliString PauliString::from_sites(std::size_t n_sites, std::span<const std::size_t> sites,
                                    std::string_view letters) {
  if (sites.size() != letters.size()) {
    throw ValidationError("sites and paulis have different lengths", "paulis");
  }
  PauliString p(n_sites);
  std::uint64_t seen = 0;
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const std::size_t s = sites[j];
    if (s >= n_sites) {
      throw ValidationError("site " + std::to_string(s) + " out of range for " +
                                std::to_string(n_sites) + " sites",
                            "sites");
    }
    if (seen & site_bit(s)) {
      throw ValidationError("duplicate site " + std::to_string(s), "sites");
    }
    seen |= site_bit(s);
    p.set(s, pauli_from_char(letters[j]));
  }
  return p;
}

PauliString PauliString::parse(std::string_view dense) {
  PauliString p(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) p.set(i, pauli_from_char(dense[i]));
  return p;
}

std::size_t PauliString::weight() const noexcept {
  return static_cast<std::size_t>(std::popcount(x_ | z_));
}

Pauli PauliString::at(std::size_t site) const {
  if (site >= n_sites_) throw DimensionError("site index out of range");
  const unsigned bits = static_cast<unsigned>((x_ >> site) & 1U) |
                        (static_cast<unsigned>((z_ >> site) & 1U) << 1);
  return static_cast<Pauli>(bits);
}

void PauliString::set(std::size_t site, Pauli p) {
  if (site >= n_sites_) throw DimensionError("site index out of range");
  const auto bits = static_cast<unsigned>(p);
  x_ = (x_ & ~site_bit(site)) | ((bits & 1U) ? site_bit(site) : 0);
  z_ = (z_ & ~site_bit(site)) | ((bits & 2U) ? site_bit(site) : 0);
}

std::vector<std::size_t> PauliString::support() const {
  std::vector<std::size_t> out;
  for (std::uint64_t m = support_mask(); m != 0; m &= m - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  return out;
}

std::string PauliString::support_letters() const {
  std::string out;
  for (std::size_t s : support()) out.push_back(to_char(at(s)));
  return out;
}

std::string PauliString::to_string() const {
  std::string out(n_sites_, 'I');
  for (std::size_t s = 0; s < n_sites_; ++s) out[s] = to_char(at(s));
  return out;
}

bool PauliString::commutes_with(const PauliString& o) const noexcept {
  return ((std::popcount(x_ & o.z_) + std::popcount(z_ & o.x_)) & 1) == 0;
}

std::size_t PauliStringHash::operator()(const PauliString& p) const noexcept {
  std::uint64_t h = p.x_mask() * 0x9E3779B97F4A7C15ULL;
  h ^= p.z_mask() + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

StringProduct multiply(const PauliString& a, const PauliString& b) {
  if (a.n_sites() != b.n_sites()) {
    throw DimensionError("cannot multiply Pauli strings on " + std::to_string(a.n_sites()) +
                         " and " + std::to_string(b.n_sites()) + " sites");
  }
  const std::uint64_t x1 = a.x_mask(), z1 = a.z_mask(), x2 = b.x_mask(), z2 = b.z_mask();
  const std::uint64_t x = x1 ^ x2, z = z1 ^ z2;
  // i^{x1 z1} X^x1 Z^z1 · i^{x2 z2} X^x2 Z^z2, reorder Z^z1 X^x2 and re-absorb i^{-xz}.
  const int power = std::popcount(x1 & z1) + std::popcount(x2 & z2) +
                    2 * std::popcount(z1 & x2) - std::popcount(x & z);
  return {((power % 4) + 4) % 4, PauliString(a.n_sites(), x, z)};
}

// ---------------------------------------------------------------------------
// KLocalOperator
// ---------------------------------------------------------------------------

KLocalOperator::KLocalOperator(std::size_t n_sites, std::span<const Term> terms)
    : n_sites_(n_sites) {
  OperatorAccumulator acc(n_sites);
  for (const Term& t : terms) acc.add(t.string, t.coeff);
  *this = std::move(acc).finish();
}

std::size_t KLocalOperator::locality() const noexcept {
  std::size_t k = 0;
  for (const Term& t : terms_) k = std::max(k, t.weight());
  return k;
}

double KLocalOperator::norm_upper() const noexcept {
  double s = 0.0;
  for (const Term& t : terms_) s += t.norm();
  return s;
}

std::uint64_t KLocalOperator::support_mask() const noexcept {
  std::uint64_t m = 0;
  for (const Term& t : terms_) m |= t.string.support_mask();
  return m;
}

Complex KLocalOperator::coefficient(const PauliString& p) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), p,
                             [](const Term& t, const PauliString& q) { return t.string < q; });
  if (it != terms_.end() && it->string == p) return it->coeff;
  return 0.0;
}

bool KLocalOperator::is_hermitian(double tol) const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const Term& t) { return std::abs(t.coeff.imag()) <= tol; });
}

KLocalOperator KLocalOperator::scaled(Complex factor) const {
  OperatorAccumulator acc(n_sites_);
  acc.add(*this, factor);
  return std::move(acc).finish();
}

namespace {

void require_same_sites(const KLocalOperator& a, const KLocalOperator& b) {
  if (a.n_sites() != b.n_sites()) {
    throw DimensionError("operators act on " + std::to_string(a.n_sites()) + " and " +
                         std::to_string(b.n_sites()) + " sites");
  }
}

}  // namespace

KLocalOperator operator+(const KLocalOperator& a, const KLocalOperator& b) {
  require_same_sites(a, b);
  OperatorAccumulator acc(a.n_sites());
  acc.add(a);
  acc.add(b);
  return std::move(acc).finish();
}

KLocalOperator operator-(const KLocalOperator& a, const KLocalOperator& b) {
  require_same_sites(a, b);
  OperatorAccumulator acc(a.n_sites());
  acc.add(a);
  acc.add(b, -1.0);
  return std::move(acc).finish();
}

void OperatorAccumulator::add(const PauliString& p, Complex coeff) {
  if (p.n_sites() != n_sites_) {
    throw DimensionError("term acts on " + std::to_string(p.n_sites()) + " sites, expected " +
                         std::to_string(n_sites_));
  }
  acc_[p] += coeff;
}

void OperatorAccumulator::add(const KLocalOperator& op, Complex factor) {
  for (const Term& t : op.terms()) add(t.string, factor * t.coeff);
}

KLocalOperator OperatorAccumulator::finish() && {
  KLocalOperator out(n_sites_);
  out.terms_.reserve(acc_.size());
  for (const auto& [p, c] : acc_) {
    if (std::abs(c) >= kZeroTolerance) out.terms_.push_back({p, c});
  }
  std::sort(out.terms_.begin(), out.terms_.end(),
            [](const Term& a, const Term& b) { return a.string < b.string; });
  acc_.clear();
  return out;
}

KLocalOperator commutator(const KLocalOperator& a, const KLocalOperator& b) {
  require_same_sites(a, b);
  OperatorAccumulator acc(a.n_sites());
  for (const Term& ta : a.terms()) {
    const std::uint64_t sa = ta.string.support_mask();
    for (const Term& tb : b.terms()) {
      if ((sa & tb.string.support_mask()) == 0 || ta.string.commutes_with(tb.string)) continue;
      // Anticommuting strings: PaPb - PbPa = 2 PaPb.
      const StringProduct pr = multiply(ta.string, tb.string);
      acc.add(pr.product, times_i_power(2.0 * ta.coeff * tb.coeff, pr.phase_power));
    }
  }
  return std::move(acc).finish();
}

KLocalOperator product(const KLocalOperator& a, const KLocalOperator& b) {
  require_same_sites(a, b);
  OperatorAccumulator acc(a.n_sites());
  for (const Term& ta : a.terms()) {
    for (const Term& tb : b.terms()) {
      const StringProduct pr = multiply(ta.string, tb.string);
      acc.add(pr.product, times_i_power(ta.coeff * tb.coeff, pr.phase_power));
    }
  }
  return std::move(acc).finish();
}

PruneResult prune(const KLocalOperator& op, double threshold) {
  if (threshold < 0.0) throw DomainError("prune threshold must be non-negative", "threshold");
  PruneResult r;
  std::vector<Term> kept;
  kept.reserve(op.size());
  for (const Term& t : op.terms()) {
    if (t.norm() > threshold) {
      kept.push_back(t);
    } else {
      r.dropped_weight += t.norm();
    }
  }
  r.pruned = KLocalOperator(op.n_sites(), kept);
  return r;
}

double max_coefficient_difference(const KLocalOperator& a, const KLocalOperator& b) {
  const KLocalOperator d = a - b;
  double m = 0.0;
  for (const Term& t : d.terms()) m = std::max(m, t.norm());
  return m;
}

std::string to_string(const KLocalOperator& op) {
  if (op.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const Term& t : op.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << t.coeff.real() << (t.coeff.imag() < 0 ? "-" : "+") << std::abs(t.coeff.imag())
       << "i)";
    const auto sites = t.string.support();
    if (sites.empty()) os << "I";
    for (std::size_t s : sites) os << to_char(t.string.at(s)) << s;
  }
  return os.str();
}

}  // namespace klocal
