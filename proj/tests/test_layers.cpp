// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "klocal/errors.hpp"
#include "klocal/layers.hpp"
#include "klocal/model.hpp"
#include "reference.hpp"

using namespace klocal;

namespace {

KLocalOperator from(std::size_t n, std::initializer_list<std::pair<const char*, double>> terms) {
  std::vector<Term> v;
  for (const auto& [s, c] : terms) v.push_back({PauliString::parse(s), c});
  return KLocalOperator(n, v);
}

// Brute-force per-site loads of a layer operator.
double extensiveness(const KLocalOperator& op) {
  std::vector<double> load(op.n_sites(), 0.0);
  for (const Term& t : op.terms())
    for (std::size_t s : t.string.support()) load[s] += t.norm();
  return load.empty() ? 0.0 : *std::max_element(load.begin(), load.end());
}

}  // namespace

TEST_CASE("discretize") {
  auto pool = discretize(from(1, {{"Z", 1.0}}), 0.3);
  REQUIRE(pool.units.size() == 1);
  CHECK(pool.units[0].multiplicity == 3);
  CHECK(pool.units[0].term.norm() == doctest::Approx(0.3));
  CHECK(pool.gap_upper == doctest::Approx(0.1));

  pool = discretize(from(1, {{"Z", 0.2}}), 0.3);
  CHECK(pool.units.empty());
  CHECK(pool.dropped_terms == 1);
  CHECK(pool.gap_upper == doctest::Approx(0.2));

  // 0.3 / 0.1 is 2.9999999999999996 in floating point.
  pool = discretize(from(1, {{"X", 0.3}}), 0.1);
  CHECK(pool.units[0].multiplicity == 3);

  pool = discretize(from(1, {{"X", -0.5}}), 0.25);
  CHECK(pool.units[0].term.coeff == Complex(-0.25));

  const auto H = random_klocal(5, 2, 1.0, 3, 5);
  CHECK(discretize(H, 1e-6).gap_upper <= 5e-6);
  CHECK(discretize(H, 1e-6).gap_upper <= 1e-6 * H.size() + 1e-15);
  CHECK_THROWS_AS(discretize(H, 0.0), DomainError);
  CHECK_THROWS_AS(discretize(H, -1.0), DomainError);
}

TEST_CASE("chain packing example") {
  const auto H = from(4, {{"ZZII", 1.0}, {"IZZI", 1.0}, {"IIZZ", 1.0}});
  const auto d = pack_layers(discretize(H, 1.0));
  CHECK(d.layer_count() == 2);
  CHECK(d.layer_bound() == 4);
  REQUIRE(d.layers.size() == 2);
  CHECK(d.layers[0].support == 0b1111);
  CHECK(d.layers[1].support == 0b0110);
  CHECK(certify(d).ok());
}

TEST_CASE("total overlap and empty pool") {
  const auto H = from(2, {{"ZI", 1.0}, {"XI", 1.0}, {"YI", 1.0}});
  const auto d = pack_layers(discretize(H, 0.25));
  CHECK(d.layer_count() == 12);
  CHECK(certify(d).ok());

  const auto e = pack_layers(discretize(KLocalOperator(3), 0.5));
  CHECK(e.layer_count() == 0);
  CHECK(certify(e).ok());
}

TEST_CASE("repeat compression matches an expanded replay") {
  const auto H = from(3, {{"ZZI", 1.0}, {"IIX", 0.5}});
  const auto d = pack_layers(discretize(H, 0.1));
  // Layer {ZZ, X} five times, then ZZ five times.
  CHECK(d.layers.size() == 2);
  CHECK(d.layers[0].repeat == 5);
  CHECK(d.layers[1].repeat == 5);
  CHECK(d.layer_count() == 10);
  CHECK(certify(d).ok());
}

TEST_CASE("identity terms") {
  std::vector<Term> terms{{PauliString(2), 0.7}, {PauliString::parse("ZZ"), 1.0}};
  const KLocalOperator H(2, terms);
  const auto d = pack_layers(discretize(H, 0.1));
  CHECK(certify(d).ok());
  CHECK(max_coefficient_difference(reconstruct(d), H) < 1e-12);
}

TEST_CASE("round trip and certificates on random models") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 3 + seed % 10;
    const std::size_t k = 1 + seed % 3;
    const auto H = random_klocal(n, k, 1.0 + 0.05 * seed, seed);
    const auto c = structural_constants(H);
    const double eps = c.g / (3.0 + seed % 9);
    const auto pool = discretize(H, eps);
    const auto d = pack_layers(pool);
    const auto cert = certify(d);
    CHECK(cert.ok());
    CHECK(d.maximal);
    CHECK(max_coefficient_difference(reconstruct(d), pool.discretized()) < 1e-12);
    const double nbar = static_cast<double>(d.layer_bound());
    for (std::size_t i = 0; i < d.layers.size(); ++i) {
      const auto layer = d.layer_operator(i);
      CHECK(commutator(layer, layer).empty());
      for (const Term& a : layer.terms())
        for (const Term& b : layer.terms())
          if (!(a.string == b.string)) CHECK((a.string.support_mask() & b.string.support_mask()) == 0);
      CHECK(nbar * extensiveness(layer) <= c.g * c.k * (1.0 + 1e-12));
      CHECK(layer.locality() <= c.k);
    }
  }
}

TEST_CASE("dense reconstruction error within the gap") {
  const auto H = transverse_field_ising(6, 1.0, 0.77);
  const double eps = structural_constants(H).g / 10.0;
  const auto d = pack_layers(discretize(H, eps));
  const double err = ref::opnorm(ref::dense(reconstruct(d)) - ref::dense(H));
  CHECK(err <= d.pool.gap_upper + 1e-12);
}

TEST_CASE("commutator bound on scaled layers") {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto H = random_klocal(5, 2, 1.0, seed);
    const auto c = structural_constants(H);
    const auto d = pack_layers(discretize(H, c.g / 4.0));
    const auto g = ref::random_operator(rng, 5, 2, 3);
    const double gn = ref::opnorm(ref::dense(g));
    const double q = static_cast<double>(g.locality());
    for (std::size_t i = 0; i < d.layers.size(); ++i) {
      const auto scaled = d.layer_operator(i).scaled(static_cast<double>(d.layer_bound()));
      const double lhs = ref::opnorm(ref::dense(commutator(scaled, g)));
      CHECK(lhs <= 6.0 * c.g * c.k * q * gn * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("json export") {
  const auto H = from(4, {{"ZZII", 1.0}, {"IZZI", 1.0}, {"IIZZ", 1.0}});
  const auto d = pack_layers(discretize(H, 0.5));
  const auto j = to_json(d, certify(d));
  CHECK(j["epsilon"] == 0.5);
  CHECK(j["layers"].size() == d.layers.size());
  CHECK(j["layers"][0]["units"][0]["paulis"] == "ZZ");
  CHECK(j["certificates"]["layer_bound"] == 8);
  CHECK(j["certificates"]["layer_count"] == d.layer_count());
}
