// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/layers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "klocal/errors.hpp"
#include "klocal/model.hpp"

namespace klocal {

std::size_t snapped_floor(double x) {
  if (!(x >= 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
}

std::size_t UnitPool::site_cap() const { return snapped_floor(g / epsilon); }

KLocalOperator UnitPool::discretized() const {
  OperatorAccumulator acc(n_sites);
  for (const Unit& u : units) {
    acc.add(u.term.string, static_cast<double>(u.multiplicity) * u.term.coeff);
  }
  return std::move(acc).finish();
}

UnitPool discretize(const KLocalOperator& H, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be positive", "epsilon");
  }
  const StructuralConstants c = structural_constants(H);
  UnitPool pool;
  pool.epsilon = epsilon;
  pool.n_sites = H.n_sites();
  pool.k = c.k;
  pool.g = c.g;
  for (const Term& t : H.terms()) {
    const double norm = t.norm();
    const std::size_t mult = snapped_floor(norm / epsilon);
    pool.gap_upper += std::abs(norm - static_cast<double>(mult) * epsilon);
    if (mult == 0) {
      ++pool.dropped_terms;
      continue;
    }
    pool.units.push_back({{t.string, epsilon * t.coeff / norm}, mult, norm});
  }
  return pool;
}

std::size_t LayerDecomposition::layer_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.repeat;
  return n;
}

std::size_t LayerDecomposition::layer_bound() const { return pool.k * pool.site_cap(); }

KLocalOperator LayerDecomposition::layer_operator(std::size_t i) const {
  OperatorAccumulator acc(pool.n_sites);
  for (const LayerEntry& e : layers.at(i).entries) {
    const Term& t = pool.units[e.unit].term;
    acc.add(t.string, static_cast<double>(e.count) * t.coeff);
  }
  return std::move(acc).finish();
}

LayerDecomposition pack_layers(const UnitPool& pool) {
  LayerDecomposition d;
  d.pool = pool;
  d.reconstruction_error_upper = pool.gap_upper;

  std::vector<std::size_t> order(pool.units.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pool.units[a].term.weight() > pool.units[b].term.weight();
  });

  std::vector<std::size_t> remaining(pool.units.size());
  std::size_t left = 0;
  for (std::size_t u = 0; u < pool.units.size(); ++u) {
    remaining[u] = pool.units[u].multiplicity;
    left += remaining[u];
  }

  while (left > 0) {
    Layer layer;
    bool has_identity = false;
    for (std::size_t u : order) {
      const std::uint64_t s = pool.units[u].term.string.support_mask();
      if (remaining[u] == 0 || (s & layer.support) != 0) continue;
      const std::size_t take = s == 0 ? remaining[u] : 1;
      has_identity = has_identity || s == 0;
      layer.entries.push_back({u, take});
      layer.support |= s;
    }
    // The greedy scan reproduces the same layer while every member still has
    // copies left, so identical layers are emitted as one with a repeat count.
    std::size_t repeat = std::numeric_limits<std::size_t>::max();
    for (const LayerEntry& e : layer.entries) repeat = std::min(repeat, remaining[e.unit]);
    if (has_identity) repeat = 1;
    layer.repeat = repeat;
    for (const LayerEntry& e : layer.entries) {
      remaining[e.unit] -= e.count * repeat;
      left -= e.count * repeat;
    }
    for (std::size_t u = 0; u < pool.units.size(); ++u) {
      if (remaining[u] > 0 && (pool.units[u].term.string.support_mask() & layer.support) == 0) {
        d.maximal = false;
      }
    }
    d.layers.push_back(std::move(layer));
  }
  return d;
}

KLocalOperator reconstruct(const LayerDecomposition& d) {
  std::vector<std::size_t> copies(d.pool.units.size(), 0);
  for (const Layer& l : d.layers) {
    for (const LayerEntry& e : l.entries) copies[e.unit] += e.count * l.repeat;
  }
  OperatorAccumulator acc(d.pool.n_sites);
  for (std::size_t u = 0; u < copies.size(); ++u) {
    const Term& t = d.pool.units[u].term;
    acc.add(t.string, static_cast<double>(copies[u]) * t.coeff);
  }
  return std::move(acc).finish();
}

bool DecompositionCertificate::ok() const {
  return within_bound && disjoint && commuting && maximal && all_assigned &&
         max_site_multiplicity <= site_cap &&
         max_scaled_extensiveness <= gk * (1.0 + 1e-12) + 1e-15;
}

DecompositionCertificate certify(const LayerDecomposition& d) {
  const UnitPool& pool = d.pool;
  DecompositionCertificate c;
  c.layer_count = d.layer_count();
  c.layer_bound = d.layer_bound();
  c.within_bound = c.layer_count <= c.layer_bound;
  c.site_cap = pool.site_cap();
  c.gk = pool.g * static_cast<double>(pool.k);
  c.gap_upper = pool.gap_upper;
  c.disjoint = true;
  c.commuting = true;
  c.maximal = true;

  std::vector<std::size_t> site_mult(pool.n_sites, 0);
  for (const Unit& u : pool.units) {
    for (std::size_t s : u.term.string.support()) site_mult[s] += u.multiplicity;
  }
  c.max_site_multiplicity =
      site_mult.empty() ? 0 : *std::max_element(site_mult.begin(), site_mult.end());

  std::vector<long long> remaining(pool.units.size());
  for (std::size_t u = 0; u < pool.units.size(); ++u) {
    remaining[u] = static_cast<long long>(pool.units[u].multiplicity);
  }
  auto check_maximal = [&](std::uint64_t support) {
    for (std::size_t u = 0; u < pool.units.size(); ++u) {
      if (remaining[u] > 0 && (pool.units[u].term.string.support_mask() & support) == 0) {
        c.maximal = false;
      }
    }
  };

  const double scale = static_cast<double>(c.layer_bound) * pool.epsilon;
  for (const Layer& layer : d.layers) {
    std::uint64_t seen = 0;
    KLocalOperator partial(pool.n_sites);
    std::vector<std::size_t> per_site(pool.n_sites, 0);
    for (const LayerEntry& e : layer.entries) {
      const Term& t = pool.units[e.unit].term;
      const std::uint64_t s = t.string.support_mask();
      if ((seen & s) != 0) c.disjoint = false;
      seen |= s;
      const KLocalOperator single(pool.n_sites, {t});
      if (!commutator(partial, single).empty()) c.commuting = false;
      partial = partial + single;
      for (std::size_t site : t.string.support()) per_site[site] += e.count;
    }
    if (seen != layer.support) c.disjoint = false;
    for (std::size_t n : per_site) {
      c.max_scaled_extensiveness = std::max(c.max_scaled_extensiveness, scale * n);
    }
    for (std::size_t r = 0; r < layer.repeat; ++r) {
      for (const LayerEntry& e : layer.entries) remaining[e.unit] -= e.count;
      // Between the first and last copy the set of units with copies left is
      // unchanged, so those two checks cover every copy.
      if (r == 0 || r + 1 == layer.repeat) check_maximal(layer.support);
      if (r == 0 && layer.repeat > 2) {
        for (const LayerEntry& e : layer.entries) {
          remaining[e.unit] -= e.count * (layer.repeat - 2);
        }
        r = layer.repeat - 2;
      }
    }
  }
  c.all_assigned = std::all_of(remaining.begin(), remaining.end(),
                               [](long long v) { return v == 0; });
  return c;
}

nlohmann::json to_json(const LayerDecomposition& d, const DecompositionCertificate& cert) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : d.layers) {
    nlohmann::json units = nlohmann::json::array();
    for (const LayerEntry& e : l.entries) {
      const Term& t = d.pool.units[e.unit].term;
      units.push_back({{"sites", t.string.support()},
                       {"paulis", t.string.support_letters()},
                       {"coeff", {t.coeff.real(), t.coeff.imag()}},
                       {"count", e.count}});
    }
    layers.push_back({{"repeat", l.repeat}, {"units", units}});
  }
  return {
      {"epsilon", d.pool.epsilon},
      {"g", d.pool.g},
      {"k", d.pool.k},
      {"layers", layers},
      {"certificates",
       {{"layer_count", cert.layer_count},
        {"layer_bound", cert.layer_bound},
        {"within_bound", cert.within_bound},
        {"disjoint", cert.disjoint},
        {"commuting", cert.commuting},
        {"maximal", cert.maximal},
        {"all_assigned", cert.all_assigned},
        {"max_site_multiplicity", cert.max_site_multiplicity},
        {"site_cap", cert.site_cap},
        {"max_scaled_extensiveness", cert.max_scaled_extensiveness},
        {"gk", cert.gk},
        {"gap_upper", cert.gap_upper},
        {"dropped_terms", d.pool.dropped_terms}}},
  };
}

}  // namespace klocal
