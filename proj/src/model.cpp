// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "klocal/errors.hpp"

namespace klocal {

namespace {

std::string entry_field(std::size_t index, std::string_view key) {
  return "terms[" + std::to_string(index) + "]." + std::string(key);
}

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ValidationError("unknown field '" + key + "' in " + where,
                            where.empty() ? key : where + "." + key);
    }
  }
}

}  // namespace

HamiltonianSpec parse_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("spec document must be a JSON object");
  reject_unknown_keys(doc, {"n_sites", "terms", "g"}, "");
  if (!doc.contains("n_sites") || !doc["n_sites"].is_number_integer()) {
    throw ValidationError("n_sites must be an integer", "n_sites");
  }
  const auto n = doc["n_sites"].get<std::int64_t>();
  if (n <= 0) throw ValidationError("n_sites must be positive", "n_sites");

  HamiltonianSpec spec;
  spec.n_sites = static_cast<std::size_t>(n);
  if (doc.contains("g")) {
    if (!doc["g"].is_number() || doc["g"].get<double>() < 0.0) {
      throw ValidationError("g must be a non-negative number", "g");
    }
    spec.declared_g = doc["g"].get<double>();
  }
  if (!doc.contains("terms") || !doc["terms"].is_array()) {
    throw ValidationError("terms must be an array", "terms");
  }
  std::size_t index = 0;
  for (const auto& entry : doc["terms"]) {
    const std::string where = "terms[" + std::to_string(index) + "]";
    if (!entry.is_object()) throw ValidationError(where + " must be an object", where);
    reject_unknown_keys(entry, {"sites", "paulis", "coeff"}, where);
    TermEntry t;
    if (!entry.contains("sites") || !entry["sites"].is_array()) {
      throw ValidationError(where + ".sites must be an array", entry_field(index, "sites"));
    }
    for (const auto& s : entry["sites"]) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
        throw ValidationError(where + ".sites must hold non-negative integers",
                              entry_field(index, "sites"));
      }
      t.sites.push_back(s.get<std::size_t>());
    }
    if (!entry.contains("paulis") || !entry["paulis"].is_string()) {
      throw ValidationError(where + ".paulis must be a string", entry_field(index, "paulis"));
    }
    t.paulis = entry["paulis"].get<std::string>();
    if (entry.contains("coeff")) {
      const auto& c = entry["coeff"];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
        throw ValidationError(where + ".coeff must be [re, im]", entry_field(index, "coeff"));
      }
      t.coeff = {c[0].get<double>(), c[1].get<double>()};
    }
    spec.terms.push_back(std::move(t));
    ++index;
  }
  return spec;
}

HamiltonianSpec read_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file " + path.string(), "spec");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), "spec");
  }
  return parse_spec(doc);
}

nlohmann::json to_json(const HamiltonianSpec& spec) {
  nlohmann::json terms = nlohmann::json::array();
  for (const TermEntry& t : spec.terms) {
    terms.push_back({{"sites", t.sites},
                     {"paulis", t.paulis},
                     {"coeff", {t.coeff.real(), t.coeff.imag()}}});
  }
  nlohmann::json doc = {{"n_sites", spec.n_sites}, {"terms", terms}};
  if (spec.declared_g) doc["g"] = *spec.declared_g;
  return doc;
}

HamiltonianSpec to_spec(const KLocalOperator& op) {
  HamiltonianSpec spec;
  spec.n_sites = op.n_sites();
  for (const Term& t : op.terms()) {
    if (t.string.is_identity()) continue;
    spec.terms.push_back({t.string.support(), t.string.support_letters(), t.coeff});
  }
  return spec;
}

KLocalOperator load_spec(const HamiltonianSpec& spec) {
  if (spec.n_sites == 0) throw ValidationError("n_sites must be positive", "n_sites");
  if (spec.n_sites > kMaxSites) {
    throw ResourceError("at most " + std::to_string(kMaxSites) + " sites are supported",
                        "n_sites");
  }
  std::vector<Term> terms;
  terms.reserve(spec.terms.size());
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    const TermEntry& e = spec.terms[i];
    if (e.paulis.empty()) {
      throw ValidationError("entry " + std::to_string(i) + ": empty Pauli letters",
                            entry_field(i, "paulis"));
    }
    for (char c : e.paulis) {
      if (c != 'X' && c != 'Y' && c != 'Z') {
        throw ValidationError("entry " + std::to_string(i) + ": letter '" + c +
                                  "' is not one of X, Y, Z",
                              entry_field(i, "paulis"));
      }
    }
    try {
      terms.push_back({PauliString::from_sites(spec.n_sites, e.sites, e.paulis), e.coeff});
    } catch (const ValidationError& err) {
      throw ValidationError("entry " + std::to_string(i) + ": " + err.what(),
                            entry_field(i, err.field()));
    }
  }
  return KLocalOperator(spec.n_sites, terms);
}

std::vector<double> site_loads(const KLocalOperator& H) {
  std::vector<double> load(H.n_sites(), 0.0);
  for (const Term& t : H.terms()) {
    for (std::size_t s : t.string.support()) load[s] += t.norm();
  }
  return load;
}

StructuralConstants structural_constants(const KLocalOperator& H,
                                         std::optional<double> declared_g) {
  StructuralConstants c;
  c.k = H.locality();
  for (const Term& t : H.terms()) {
    if (t.string.is_identity()) {
      c.identity_offset = t.coeff.real();
      continue;
    }
    ++c.n_terms;
    c.norm_upper += t.norm();
  }
  const auto loads = site_loads(H);
  c.g = loads.empty() ? 0.0 : *std::max_element(loads.begin(), loads.end());
  if (declared_g) {
    if (*declared_g + 1e-12 * std::max(1.0, c.g) < c.g) {
      std::ostringstream os;
      os << "declared g = " << *declared_g << " is below the computed extensiveness " << c.g;
      throw ValidationError(os.str(), "g");
    }
    c.g = *declared_g;
  }
  // sum_X ||h_X|| <= sum_i sum_{X ni i} ||h_X|| <= gN
  const double gN = c.g * static_cast<double>(H.n_sites());
  if (c.norm_upper > gN * (1.0 + 1e-12) + 1e-300) {
    throw std::logic_error("norm_upper exceeds g*N");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

namespace {

void require_sites(std::size_t n) {
  if (n == 0) throw ValidationError("number of sites must be positive", "n");
  if (n > kMaxSites) {
    throw ResourceError("at most " + std::to_string(kMaxSites) + " sites are supported", "n");
  }
}

PauliString single(std::size_t n, std::size_t site, Pauli p) {
  PauliString s(n);
  s.set(site, p);
  return s;
}

PauliString pair(std::size_t n, std::size_t i, std::size_t j, Pauli p) {
  PauliString s(n);
  s.set(i, p);
  s.set(j, p);
  return s;
}

KLocalOperator random_strings(std::size_t n, std::size_t k, double g_target, std::uint64_t seed,
                              std::size_t n_terms, bool z_only) {
  require_sites(n);
  if (k == 0) throw ValidationError("k must be positive", "k");
  if (g_target < 0.0) throw ValidationError("g must be non-negative", "g");
  const std::size_t kmax = std::min(k, n);
  if (n_terms == 0) n_terms = 2 * n;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> weight_dist(1, kmax);
  std::uniform_int_distribution<int> letter_dist(0, 2);
  std::uniform_real_distribution<double> coeff_dist(-1.0, 1.0);
  std::vector<std::size_t> sites(n);

  std::vector<Term> terms;
  for (std::size_t j = 0; j < n_terms; ++j) {
    const std::size_t w = j == 0 ? kmax : weight_dist(rng);
    std::iota(sites.begin(), sites.end(), std::size_t{0});
    for (std::size_t a = 0; a < w; ++a) {  // partial Fisher-Yates
      std::uniform_int_distribution<std::size_t> pick(a, n - 1);
      std::swap(sites[a], sites[pick(rng)]);
    }
    PauliString p(n);
    for (std::size_t a = 0; a < w; ++a) {
      static constexpr Pauli kLetters[] = {Pauli::X, Pauli::Y, Pauli::Z};
      p.set(sites[a], z_only ? Pauli::Z : kLetters[letter_dist(rng)]);
    }
    double c = coeff_dist(rng);
    if (std::abs(c) < 1e-3) c = std::copysign(1e-3, c);
    terms.push_back({p, c});
  }
  KLocalOperator H(n, terms);
  const double g = structural_constants(H).g;
  if (g == 0.0 || g_target == 0.0) return KLocalOperator(n);
  return H.scaled(g_target / g);
}

}  // namespace

KLocalOperator long_range_ising(std::size_t n, double alpha, double J, double h) {
  require_sites(n);
  if (alpha < 0.0) throw ValidationError("alpha must be non-negative", "alpha");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = static_cast<double>(j - i);
      terms.push_back({pair(n, i, j, Pauli::Z), J / std::pow(dist, alpha)});
    }
    terms.push_back({single(n, i, Pauli::X), h});
  }
  return KLocalOperator(n, terms);
}

KLocalOperator transverse_field_ising(std::size_t n, double J, double h) {
  require_sites(n);
  std::vector<Term> terms;
  for (std::size_t i = 0; i + 1 < n; ++i) terms.push_back({pair(n, i, i + 1, Pauli::Z), J});
  for (std::size_t i = 0; i < n; ++i) terms.push_back({single(n, i, Pauli::X), h});
  return KLocalOperator(n, terms);
}

KLocalOperator product_field(std::size_t n, Pauli axis) {
  require_sites(n);
  if (axis == Pauli::I) throw ValidationError("product_field axis must be x, y or z", "axis");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < n; ++i) terms.push_back({single(n, i, axis), -1.0});
  return KLocalOperator(n, terms);
}

KLocalOperator random_klocal(std::size_t n, std::size_t k, double g_target, std::uint64_t seed,
                             std::size_t n_terms) {
  return random_strings(n, k, g_target, seed, n_terms, false);
}

KLocalOperator diagonal_commuting(std::size_t n, std::size_t k, std::uint64_t seed,
                                  double g_target, std::size_t n_terms) {
  return random_strings(n, k, g_target, seed, n_terms, true);
}

namespace {

double param(const ModelParams& p, std::string_view key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::size_t count_param(const ModelParams& p, std::string_view key, double fallback) {
  const double v = param(p, key, fallback);
  if (v < 0.0 || v != std::floor(v)) {
    throw ValidationError(std::string(key) + " must be a non-negative integer", std::string(key));
  }
  return static_cast<std::size_t>(v);
}

Pauli axis_param(const ModelParams& p) {
  switch (count_param(p, "axis", 2)) {
    case 0: return Pauli::X;
    case 1: return Pauli::Y;
    case 2: return Pauli::Z;
    default: throw ValidationError("axis must be 0 (x), 1 (y) or 2 (z)", "axis");
  }
}

}  // namespace

KLocalOperator build_model(std::string_view family, std::size_t n, const ModelParams& params) {
  if (family == "long_range_ising") {
    return long_range_ising(n, param(params, "alpha", 1.0), param(params, "J", 1.0),
                            param(params, "h", 0.0));
  }
  if (family == "transverse_field_ising") {
    return transverse_field_ising(n, param(params, "J", 1.0), param(params, "h", 1.0));
  }
  if (family == "product_field") return product_field(n, axis_param(params));
  if (family == "random_klocal") {
    return random_klocal(n, count_param(params, "k", 2), param(params, "g", 1.0),
                         count_param(params, "seed", 0), count_param(params, "terms", 0));
  }
  if (family == "diagonal_commuting") {
    return diagonal_commuting(n, count_param(params, "k", 2), count_param(params, "seed", 0),
                              param(params, "g", 1.0), count_param(params, "terms", 0));
  }
  throw ValidationError("unknown model family '" + std::string(family) + "'", "family");
}

}  // namespace klocal
