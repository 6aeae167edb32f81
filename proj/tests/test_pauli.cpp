// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "klocal/errors.hpp"
#include "klocal/pauli.hpp"
#include "reference.hpp"

using namespace klocal;

namespace {

PauliString ps(const char* s) { return PauliString::parse(s); }

KLocalOperator op(std::size_t n, std::initializer_list<std::pair<const char*, Complex>> terms) {
  std::vector<Term> v;
  for (const auto& [s, c] : terms) v.push_back({ps(s), c});
  return KLocalOperator(n, v);
}

double max_entry(const ref::Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("single-site products") {
  auto r = multiply(ps("X"), ps("Y"));
  CHECK(r.product == ps("Z"));
  CHECK(r.phase() == Complex(0, 1));

  r = multiply(ps("X"), ps("X"));
  CHECK(r.product.is_identity());
  CHECK(r.phase() == Complex(1, 0));

  r = multiply(ps("ZI"), ps("IX"));
  CHECK(r.product == ps("ZX"));
  CHECK(r.phase() == Complex(1, 0));

  CHECK(multiply(ps("Y"), ps("Z")).phase() == Complex(0, 1));
  CHECK(multiply(ps("Z"), ps("X")).phase() == Complex(0, 1));
  CHECK(multiply(ps("Z"), ps("Y")).phase() == Complex(0, -1));
}

TEST_CASE("mismatched sizes are rejected") {
  CHECK_THROWS_AS(multiply(ps("X"), ps("XI")), DimensionError);
  CHECK_THROWS_AS(commutator(op(1, {{"X", 1.0}}), op(2, {{"XI", 1.0}})), DimensionError);
}

TEST_CASE("string products match dense matrices") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> mask(0, 31);
  for (int i = 0; i < 300; ++i) {
    const PauliString a(5, mask(rng), mask(rng));
    const PauliString b(5, mask(rng), mask(rng));
    const auto r = multiply(a, b);
    const ref::Mat lhs = ref::string_matrix(a) * ref::string_matrix(b);
    const ref::Mat rhs = r.phase() * ref::string_matrix(r.product);
    CHECK(max_entry(lhs - rhs) < 1e-14);
    CHECK(r.product.weight() <= a.weight() + b.weight());
    const ref::Mat comm = lhs - ref::string_matrix(b) * ref::string_matrix(a);
    CHECK(a.commutes_with(b) == (max_entry(comm) < 1e-14));
  }
}

TEST_CASE("parse, letters and support") {
  const PauliString p = ps("XIZY");
  CHECK(p.n_sites() == 4);
  CHECK(p.weight() == 3);
  CHECK(p.at(0) == Pauli::X);
  CHECK(p.at(1) == Pauli::I);
  CHECK(p.at(3) == Pauli::Y);
  CHECK(p.to_string() == "XIZY");
  CHECK(p.support() == std::vector<std::size_t>{0, 2, 3});
  CHECK(p.support_letters() == "XZY");
  const std::vector<std::size_t> sites{3, 0};
  CHECK(PauliString::from_sites(4, sites, "YX") == ps("XIIY"));
  CHECK_THROWS(PauliString::parse("XQ"));
  const std::vector<std::size_t> bad{4};
  CHECK_THROWS(PauliString::from_sites(4, bad, "X"));
  const std::vector<std::size_t> dup{1, 1};
  CHECK_THROWS(PauliString::from_sites(4, dup, "XZ"));
  CHECK_THROWS(PauliString(65));
}

TEST_CASE("commutator examples") {
  const auto c1 = commutator(op(1, {{"Z", 1.0}}), op(1, {{"X", 1.0}}));
  REQUIRE(c1.size() == 1);
  CHECK(c1.coefficient(ps("Y")) == Complex(0, 2));

  CHECK(commutator(op(3, {{"ZZI", 1.0}}), op(3, {{"IZZ", 1.0}})).empty());

  const auto a = op(2, {{"XI", 1.0}});
  const auto b = op(2, {{"ZZ", 1.0}});
  const auto c3 = commutator(a, b);
  REQUIRE(c3.size() == 1);
  CHECK(c3.coefficient(ps("YZ")) == Complex(0, -2));
  const ref::Mat dense = ref::dense(a) * ref::dense(b) - ref::dense(b) * ref::dense(a);
  CHECK(max_entry(dense - ref::dense(c3)) < 1e-14);
}

TEST_CASE("norm_upper and canonical merge") {
  CHECK(op(2, {{"ZZ", 1.0}, {"XI", 1.0}}).norm_upper() == doctest::Approx(2.0));
  CHECK(KLocalOperator(3).norm_upper() == 0.0);
  const auto cancel = op(1, {{"Z", 0.5}, {"Z", -0.5}});
  CHECK(cancel.empty());
  CHECK(cancel.norm_upper() == 0.0);
  CHECK(KLocalOperator(3).locality() == 0);
  CHECK(op(1, {{"Z", 1e-15}}).empty());
}

TEST_CASE("prune") {
  const auto a = op(2, {{"ZI", 1.0}, {"IZ", 1e-15}});
  // 1e-15 is under the canonical zero tolerance and is gone before pruning.
  CHECK(a.size() == 1);
  CHECK(prune(a, 1e-12).dropped_weight == 0.0);

  const auto b = op(2, {{"ZI", 0.3}, {"IZ", 0.2}});
  auto r = prune(b, 0.25);
  CHECK(r.pruned.size() == 1);
  CHECK(r.pruned.coefficient(ps("ZI")) == Complex(0.3));
  CHECK(r.dropped_weight == doctest::Approx(0.2));

  r = prune(b, 0.0);
  CHECK(r.pruned.size() == 2);
  CHECK(r.dropped_weight == 0.0);

  const auto c = op(2, {{"ZI", 1.0}, {"IZ", 5e-13}});
  r = prune(c, 1e-12);
  CHECK(r.pruned.size() == 1);
  CHECK(r.dropped_weight == doctest::Approx(5e-13));

  CHECK_THROWS_AS(prune(b, -1.0), DomainError);
}

TEST_CASE("merge is order independent") {
  std::mt19937_64 rng(11);
  const auto base = ref::random_operator(rng, 5, 3, 12);
  std::vector<Term> terms(base.terms().begin(), base.terms().end());
  for (const Term& t : base.terms()) terms.push_back({t.string, 0.25 * t.coeff});
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(terms.begin(), terms.end(), rng);
    const KLocalOperator merged(5, terms);
    CHECK(max_coefficient_difference(merged, base.scaled(1.25)) < 1e-14);
  }
}

TEST_CASE("algebra properties on random operators") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto a = ref::random_operator(rng, 5, 3, 5, false);
    const auto b = ref::random_operator(rng, 5, 3, 5, false);
    const auto c = ref::random_operator(rng, 5, 3, 5, false);

    CHECK(max_coefficient_difference(commutator(a, b), commutator(b, a).scaled(-1.0)) < 1e-12);

    const auto jacobi = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                        commutator(c, commutator(a, b));
    for (const Term& t : jacobi.terms()) CHECK(t.norm() < 1e-12);

    CHECK(commutator(a, b).locality() <= a.locality() + b.locality());

    const ref::Mat d = ref::dense(a) * ref::dense(b) - ref::dense(b) * ref::dense(a);
    CHECK(max_entry(d - ref::dense(commutator(a, b))) < 1e-12);
    CHECK(max_entry(ref::dense(a) * ref::dense(b) - ref::dense(product(a, b))) < 1e-12);

    CHECK(ref::opnorm(ref::dense(a)) <= a.norm_upper() + 1e-12);
  }
}

TEST_CASE("disjoint supports commute") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    auto a = ref::random_operator(rng, 3, 3, 4);
    auto b = ref::random_operator(rng, 3, 3, 4);
    // Embed a on sites 0..2 and b on sites 3..5.
    std::vector<Term> ta;
    std::vector<Term> tb;
    for (const Term& t : a.terms()) ta.push_back({PauliString(6, t.string.x_mask(), t.string.z_mask()), t.coeff});
    for (const Term& t : b.terms()) tb.push_back({PauliString(6, t.string.x_mask() << 3, t.string.z_mask() << 3), t.coeff});
    CHECK(commutator(KLocalOperator(6, ta), KLocalOperator(6, tb)).empty());
  }
}

TEST_CASE("hermiticity and arithmetic") {
  const auto a = op(2, {{"XZ", 1.0}, {"YI", -0.5}});
  CHECK(a.is_hermitian());
  CHECK_FALSE(a.scaled(Complex(0, 1)).is_hermitian());
  CHECK((a - a).empty());
  CHECK((a + a).coefficient(ps("XZ")) == Complex(2.0));
  CHECK(a.support_mask() == 0b11);
  CHECK(to_string(op(1, {})).size() > 0);
}
