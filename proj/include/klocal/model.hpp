// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file model.hpp
 * @brief Hamiltonian specifications, built-in model families and the
 *        structural constants (locality k, extensiveness g).
 *
 * Spec documents are JSON:
 *
 *     {
 *       "n_sites": 3,
 *       "terms": [
 *         {"sites": [0, 1], "paulis": "ZZ", "coeff": [1.0, 0.0]},
 *         {"sites": [2],    "paulis": "X",  "coeff": [0.5, 0.0]}
 *       ],
 *       "g": 2.0
 *     }
 *
 * "g" is optional and may only loosen the computed extensiveness. Any other
 * key, at either level, is rejected.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "klocal/pauli.hpp"

namespace klocal {

struct TermEntry {
  std::vector<std::size_t> sites;
  std::string paulis;
  Complex coeff{1.0, 0.0};
};

struct HamiltonianSpec {
  std::size_t n_sites = 0;
  std::vector<TermEntry> terms;
  std::optional<double> declared_g;
};

HamiltonianSpec parse_spec(const nlohmann::json& doc);
HamiltonianSpec read_spec_file(const std::filesystem::path& path);
nlohmann::json to_json(const HamiltonianSpec& spec);
HamiltonianSpec to_spec(const KLocalOperator& op);

/// Validates every entry and merges identical strings.
KLocalOperator load_spec(const HamiltonianSpec& spec);

struct StructuralConstants {
  std::size_t k = 0;
  double g = 0.0;
  std::size_t n_terms = 0;
  double norm_upper = 0.0;
  /// Coefficient of the identity string, if any. It has no support and is
  /// excluded from g and norm_upper.
  double identity_offset = 0.0;
};

/// g is the tightest per-site coefficient sum. Throws if a declared g is
/// smaller than the computed one.
StructuralConstants structural_constants(const KLocalOperator& H,
                                         std::optional<double> declared_g = std::nullopt);

/// Per-site sums of |coeff| over terms containing the site.
std::vector<double> site_loads(const KLocalOperator& H);

// Built-in families --------------------------------------------------------

/// sum_{i<j} J/|i-j|^alpha Z_i Z_j + h sum_i X_i, open chain.
KLocalOperator long_range_ising(std::size_t n, double alpha, double J, double h);
/// sum_i J Z_i Z_{i+1} + h sum_i X_i, open chain.
KLocalOperator transverse_field_ising(std::size_t n, double J, double h);
/// -sum_i sigma^axis_i; its ground state is the product of +1 eigenstates.
KLocalOperator product_field(std::size_t n, Pauli axis);
/// Random Pauli strings of weight 1..k (at least one of weight min(k, n)),
/// real coefficients, rescaled so the computed g equals g_target.
KLocalOperator random_klocal(std::size_t n, std::size_t k, double g_target, std::uint64_t seed,
                             std::size_t n_terms = 0);
/// Same as random_klocal with Z-strings only; all terms commute.
KLocalOperator diagonal_commuting(std::size_t n, std::size_t k, std::uint64_t seed,
                                  double g_target = 1.0, std::size_t n_terms = 0);

using ModelParams = std::map<std::string, double, std::less<>>;

/// Dispatches on family name: long_range_ising (alpha, J, h), transverse_field_ising
/// (J, h), product_field (axis: 0=x 1=y 2=z), random_klocal (k, g, seed, terms),
/// diagonal_commuting (k, g, seed, terms).
KLocalOperator build_model(std::string_view family, std::size_t n, const ModelParams& params);

}  // namespace klocal
