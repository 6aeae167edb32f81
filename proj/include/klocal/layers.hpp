// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file layers.hpp
 * @brief Splitting a k-local g-extensive Hamiltonian into commuting layers.
 *
 * Every term h_X is replaced by N_X = floor(||h_X||/eps) copies of the unit
 * eps h_X/||h_X||. Copies are packed greedily into layers whose supports are
 * pairwise disjoint. A layer is closed only when no remaining copy fits, which
 * is the property that caps the layer count at k floor(g/eps).
 *
 * Copies are never expanded: a layer stores (unit, count) pairs and a repeat
 * factor for identical consecutive layers.
 *
 * The packing is maximal, not maximum; a minimum layer count is NP-hard in
 * general and is not attempted.
 */

#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "klocal/pauli.hpp"

namespace klocal {

struct Unit {
  Term term;                    // |coeff| == epsilon
  std::size_t multiplicity = 0;  // N_X
  double source_norm = 0.0;      // ||h_X||
};

struct UnitPool {
  double epsilon = 0.0;
  std::size_t n_sites = 0;
  std::size_t k = 0;
  double g = 0.0;
  std::vector<Unit> units;  // only terms with N_X >= 1
  std::size_t dropped_terms = 0;
  /// sum_X | ||h_X|| - N_X eps |, bounds ||H' - H||.
  double gap_upper = 0.0;

  /// floor(g/eps), the per-site cap on unit copies.
  std::size_t site_cap() const;
  KLocalOperator discretized() const;
};

/// Floor with 1e-9 relative snapping, so 0.3/0.1 counts as 3.
std::size_t snapped_floor(double x);

UnitPool discretize(const KLocalOperator& H, double epsilon);

struct LayerEntry {
  std::size_t unit = 0;
  std::size_t count = 1;
};

struct Layer {
  std::vector<LayerEntry> entries;
  std::uint64_t support = 0;
  std::size_t repeat = 1;
};

struct LayerDecomposition {
  UnitPool pool;
  std::vector<Layer> layers;
  double reconstruction_error_upper = 0.0;
  bool maximal = true;  // checked while packing

  std::size_t layer_count() const;
  /// k floor(g/eps).
  std::size_t layer_bound() const;
  /// One copy of layer i as an operator.
  KLocalOperator layer_operator(std::size_t i) const;
};

LayerDecomposition pack_layers(const UnitPool& pool);

/// Sum over layers of repeat times the layer operator, i.e. H'.
KLocalOperator reconstruct(const LayerDecomposition& d);

struct DecompositionCertificate {
  std::size_t layer_count = 0;
  std::size_t layer_bound = 0;
  bool within_bound = false;
  bool disjoint = false;
  bool commuting = false;
  bool maximal = false;
  bool all_assigned = false;
  std::size_t max_site_multiplicity = 0;
  std::size_t site_cap = 0;
  /// max over layers of the extensiveness of layer_bound * H_m.
  double max_scaled_extensiveness = 0.0;
  double gk = 0.0;
  double gap_upper = 0.0;

  bool ok() const;
};

/// Independent re-check of a decomposition (replays the assignment).
DecompositionCertificate certify(const LayerDecomposition& d);

nlohmann::json to_json(const LayerDecomposition& d, const DecompositionCertificate& cert);

}  // namespace klocal
