// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>

#include "klocal/errors.hpp"
#include "klocal/model.hpp"
#include "reference.hpp"

using namespace klocal;
using nlohmann::json;

TEST_CASE("load_spec basics") {
  const json doc = json::parse(R"({"n_sites": 2, "terms": [
      {"sites": [0, 1], "paulis": "ZZ", "coeff": [1.0, 0.0]},
      {"sites": [0], "paulis": "X", "coeff": [1.0, 0.0]}]})");
  const auto H = load_spec(parse_spec(doc));
  CHECK(H.size() == 2);
  CHECK(H.locality() == 2);

  const json merge = json::parse(R"({"n_sites": 2, "terms": [
      {"sites": [1], "paulis": "Z", "coeff": [0.5, 0.0]},
      {"sites": [1], "paulis": "Z", "coeff": [0.5, 0.0]}]})");
  const auto M = load_spec(parse_spec(merge));
  REQUIRE(M.size() == 1);
  CHECK(M.terms()[0].coeff == Complex(1.0));
}

TEST_CASE("load_spec errors name the entry") {
  auto expect = [](const char* text, const char* needle) {
    try {
      load_spec(parse_spec(json::parse(text)));
      FAIL("no error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect(R"({"n_sites": 4, "terms": [{"sites": [5], "paulis": "X", "coeff": [1, 0]}]})",
         "entry 0");
  expect(R"({"n_sites": 4, "terms": [{"sites": [0], "paulis": "X", "coeff": [1, 0]},
             {"sites": [1, 1], "paulis": "XX", "coeff": [1, 0]}]})",
         "entry 1");
  expect(R"({"n_sites": 4, "terms": [{"sites": [], "paulis": "", "coeff": [1, 0]}]})", "entry 0");
  expect(R"({"n_sites": 4, "terms": [{"sites": [0], "paulis": "Q", "coeff": [1, 0]}]})",
         "entry 0");
  CHECK_THROWS_AS(parse_spec(json::parse(R"({"n_sites": 2, "terms": [], "extra": 1})")),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_spec(json::parse(
          R"({"n_sites": 2, "terms": [{"sites": [0], "paulis": "X", "coeff": [1, 0], "w": 1}]})")),
      ValidationError);
  CHECK_THROWS_AS(parse_spec(json::parse(R"({"n_sites": 0, "terms": []})")), ValidationError);
}

TEST_CASE("spec round trip") {
  const auto H = transverse_field_ising(4, 1.0, 0.7);
  const auto back = load_spec(parse_spec(to_json(to_spec(H))));
  CHECK(max_coefficient_difference(H, back) == 0.0);
}

TEST_CASE("structural constants") {
  const auto tfi = transverse_field_ising(4, 1.0, 1.0);
  const auto c = structural_constants(tfi);
  CHECK(c.k == 2);
  CHECK(c.g == doctest::Approx(3.0));
  CHECK(c.n_terms == 7);

  const auto zero = structural_constants(KLocalOperator(3));
  CHECK(zero.k == 0);
  CHECK(zero.g == 0.0);

  std::vector<Term> bonds;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) {
      PauliString p(5);
      p.set(i, Pauli::Z);
      p.set(j, Pauli::Z);
      bonds.push_back({p, 0.25});
    }
  CHECK(structural_constants(KLocalOperator(5, bonds)).g == doctest::Approx(1.0));

  CHECK(structural_constants(tfi, 4.0).g == 4.0);
  CHECK_THROWS_AS(structural_constants(tfi, 2.0), ValidationError);
}

TEST_CASE("structural constants ignore term order") {
  std::mt19937_64 rng(1);
  const auto H = random_klocal(7, 3, 2.0, 9);
  std::vector<Term> terms(H.terms().begin(), H.terms().end());
  const auto c0 = structural_constants(H);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(terms.begin(), terms.end(), rng);
    const auto c = structural_constants(KLocalOperator(7, terms));
    CHECK(c.g == c0.g);
    CHECK(c.k == c0.k);
    CHECK(c.norm_upper == doctest::Approx(c0.norm_upper));
  }
}

TEST_CASE("families") {
  const auto pf = product_field(3, Pauli::Z);
  CHECK(pf.size() == 3);
  for (const Term& t : pf.terms()) CHECK(t.coeff == Complex(-1.0));
  const ref::Mat d = ref::dense(pf);
  CHECK(d(0, 0).real() == doctest::Approx(-3.0));
  Eigen::SelfAdjointEigenSolver<ref::Mat> es(d);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-3.0));

  const auto lri = long_range_ising(3, 2.0, 1.0, 0.0);
  CHECK(lri.coefficient(PauliString::parse("ZZI")) == Complex(1.0));
  CHECK(lri.coefficient(PauliString::parse("ZIZ")) == Complex(0.25));
  CHECK(lri.coefficient(PauliString::parse("IZZ")) == Complex(1.0));
  CHECK_THROWS_AS(long_range_ising(3, -1.0, 1.0, 0.0), ValidationError);

  const auto a = random_klocal(6, 3, 1.5, 42);
  const auto b = random_klocal(6, 3, 1.5, 42);
  CHECK(max_coefficient_difference(a, b) == 0.0);
  CHECK(structural_constants(a).g == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(structural_constants(a).k == 3);

  const auto dc = diagonal_commuting(6, 3, 5);
  for (const Term& s : dc.terms())
    for (const Term& t : dc.terms()) CHECK(s.string.commutes_with(t.string));
  CHECK(commutator(dc, dc).empty());

  CHECK_THROWS_AS(build_model("nope", 3, {}), ValidationError);
  CHECK_THROWS_AS(build_model("transverse_field_ising", 0, {}), ValidationError);
  CHECK(build_model("product_field", 2, {{"axis", 0}}).coefficient(PauliString::parse("XI")) ==
        Complex(-1.0));
}

TEST_CASE("exact norm never exceeds gN") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 6;
    const auto H = random_klocal(n, 1 + seed % 3, 1.0 + 0.1 * seed, seed);
    const auto c = structural_constants(H);
    CHECK(ref::opnorm(ref::dense(H)) <= c.g * n + 1e-9);
  }
  const auto tfi = transverse_field_ising(4, 1.0, 1.0);
  CHECK(ref::opnorm(ref::dense(tfi)) <= 12.0);
}
