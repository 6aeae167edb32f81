// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#include "klocal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "klocal/bounds.hpp"
#include "klocal/concentration.hpp"
#include "klocal/errors.hpp"
#include "klocal/layers.hpp"
#include "klocal/model.hpp"
#include "klocal/oracle.hpp"
#include "klocal/truncator.hpp"

namespace klocal {

using nlohmann::json;

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json operator_json(const KLocalOperator& op) {
  json terms = json::array();
  for (const Term& t : op.terms()) {
    terms.push_back({{"sites", t.string.support()},
                     {"paulis", t.string.support_letters()},
                     {"coeff", {t.coeff.real(), t.coeff.imag()}}});
  }
  return {{"n_sites", op.n_sites()}, {"terms", terms}};
}

struct Check {
  Check(std::string n, double l, double r) : name(std::move(n)), lhs(l), rhs(r) {}

  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool asserted = true;
  std::string note;

  bool holds() const { return lhs <= rhs * (1.0 + 1e-12) + 1e-300; }
};

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const Check& c : checks) {
    json j = {{"name", c.name},
              {"lhs", num(c.lhs)},
              {"rhs", num(c.rhs)},
              {"margin", num(c.rhs - c.lhs)},
              {"holds", c.holds()},
              {"asserted", c.asserted}};
    if (!c.note.empty()) j["note"] = c.note;
    out.push_back(std::move(j));
  }
  return out;
}

bool all_hold(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return !c.asserted || c.holds(); });
}

struct Instance {
  KLocalOperator H;
  std::optional<double> declared_g;
  KLocalOperator gamma;
};

Instance load_instance(const RunConfig& cfg) {
  Instance in;
  if (cfg.spec_path) {
    const HamiltonianSpec spec = read_spec_file(*cfg.spec_path);
    in.H = load_spec(spec);
    in.declared_g = spec.declared_g;
  } else if (!cfg.model.empty()) {
    in.H = build_model(cfg.model, cfg.model_sites, cfg.model_params);
  } else {
    throw ValidationError("either --spec or --model is required", "spec");
  }
  const std::size_t n = in.H.n_sites();
  if (cfg.gamma_path) {
    const HamiltonianSpec g = read_spec_file(*cfg.gamma_path);
    if (g.n_sites != n) {
      throw DimensionError("Gamma has " + std::to_string(g.n_sites) + " sites, H has " +
                               std::to_string(n),
                           "gamma");
    }
    in.gamma = load_spec(g);
  } else {
    PauliString z0(n);
    z0.set(0, Pauli::Z);
    in.gamma = KLocalOperator(n, {Term{z0, 1.0}});
  }
  return in;
}

double best_norm(const KLocalOperator& op, const OracleLimits& limits) {
  return op.n_sites() <= limits.operator_sites ? operator_norm_exact(op, limits) : op.norm_upper();
}

int default_q0(const RunConfig& cfg, const KLocalOperator& gamma) {
  return cfg.q0.value_or(std::max(static_cast<int>(gamma.locality()), 1));
}

double single_t(const RunConfig& cfg) {
  if (cfg.t.size() != 1) throw ValidationError("exactly one --t value is required", "t");
  return cfg.t.front();
}

int single_q(const RunConfig& cfg) {
  if (cfg.q.size() != 1) throw ValidationError("exactly one --q value is required", "q");
  return cfg.q.front();
}

double default_epsilon(const RunConfig& cfg, double g) {
  const double eps = cfg.epsilon.value_or(g > 0.0 ? g / 10.0 : 1.0);
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ValidationError("epsilon must be positive", "epsilon");
  }
  return eps;
}

BoundParams params_for(const StructuralConstants& c) {
  return BoundParams::make(c.g, static_cast<int>(std::max<std::size_t>(c.k, 1)));
}

void validate(const RunConfig& cfg) {
  static const std::set<std::string> subs = {"constants", "bound",  "truncate",
                                             "decompose", "verify", "concentrate"};
  if (!subs.count(cfg.subcommand)) {
    throw ValidationError("unknown subcommand '" + cfg.subcommand + "'", "subcommand");
  }
  if (cfg.format != "json" && cfg.format != "csv") {
    throw ValidationError("format must be json or csv", "format");
  }
  for (double t : cfg.t) {
    if (!std::isfinite(t)) throw ValidationError("t must be finite", "t");
  }
  for (int q : cfg.q) {
    if (q < 1) throw ValidationError("q must be a positive integer", "q");
  }
  if (cfg.q0 && *cfg.q0 < 1) throw ValidationError("q0 must be a positive integer", "q0");
  if (cfg.samples < 1) throw ValidationError("samples must be positive", "samples");
  if (!(cfg.threshold >= 0.0)) throw ValidationError("threshold must be non-negative", "threshold");
  if (cfg.limits.operator_sites < 1 || cfg.limits.state_sites < 1) {
    throw ValidationError("nmax must be positive", "nmax");
  }
  if (cfg.bin_width && !(*cfg.bin_width > 0.0)) {
    throw ValidationError("bin width must be positive", "bin_width");
  }
  const bool needs_t = cfg.subcommand == "truncate" || cfg.subcommand == "verify" ||
                       cfg.subcommand == "concentrate";
  if (needs_t) single_t(cfg);
  if (cfg.subcommand == "truncate" || cfg.subcommand == "verify") single_q(cfg);
  if (cfg.subcommand == "truncate" && cfg.method != "chained" && cfg.method != "series") {
    throw ValidationError("method must be chained or series", "method");
  }
  if (cfg.subcommand == "bound") {
    static const std::set<std::string> kinds = {"all",  "theorem1", "small_time", "main",
                                                "delta", "topo",    "topo_unit",  "band",
                                                "schedule"};
    if (!kinds.count(cfg.kind)) throw ValidationError("unknown bound kind", "kind");
  }
}

struct Report {
  json body;
  bool pass = true;
  // Flat tables for CSV; when empty the JSON leaves are flattened.
  std::vector<std::pair<std::vector<std::string>, std::vector<std::vector<json>>>> tables;
};

Report run_constants(const RunConfig& cfg, const Instance& in) {
  const StructuralConstants c = structural_constants(in.H, in.declared_g);
  const BoundParams p = params_for(c);
  Report r;
  r.body = {{"n_sites", in.H.n_sites()}, {"k", c.k},           {"g", c.g},
            {"n_terms", c.n_terms},      {"norm_upper", c.norm_upper},
            {"identity_offset", c.identity_offset},
            {"lambda", p.lambda},        {"kappa", p.kappa},   {"xi", p.xi}};
  json grids = json::array();
  for (double t : cfg.t) {
    const TimeGrid tg = time_grid(p, t);
    grids.push_back({{"t", t}, {"n", tg.n}, {"dt", tg.dt}, {"r_t", num(tg.r_t)}});
  }
  if (!grids.empty()) r.body["time_grid"] = grids;
  return r;
}

Report run_bound(const RunConfig& cfg, const Instance& in) {
  const StructuralConstants c = structural_constants(in.H, in.declared_g);
  const BoundParams p = params_for(c);
  const double gnorm = best_norm(in.gamma, cfg.limits);
  const int q0 = default_q0(cfg, in.gamma);
  const std::vector<double> ts = cfg.t.empty() ? std::vector<double>{0.0} : cfg.t;
  std::vector<int> qs = cfg.q;
  if (qs.empty()) qs.push_back(q0);

  std::vector<std::string> kinds;
  if (cfg.kind == "all") {
    kinds = {"theorem1", "small_time", "main", "delta", "topo", "topo_unit"};
  } else {
    kinds = {cfg.kind};
  }

  json rows = json::array();
  std::vector<std::vector<json>> table;
  auto emit = [&](const std::string& kind, double t, int q, const std::function<double()>& f) {
    json row = {{"kind", kind}, {"t", t}, {"q", q}, {"q0", q0}};
    try {
      row["value"] = num(f());
    } catch (const Error& e) {
      row["value"] = nullptr;
      row["note"] = e.what();
    }
    table.push_back({row["kind"], row["t"], row["q"], row["q0"], row["value"]});
    rows.push_back(std::move(row));
  };

  json schedules = json::array();
  for (const std::string& kind : kinds) {
    for (double t : ts) {
      if (kind == "band") {
        for (int gap = 0; gap <= static_cast<int>(2 * in.H.n_sites()); ++gap) {
          emit(kind, t, gap, [&] { return band_rhs(p, t, in.H.n_sites(), gap); });
        }
        continue;
      }
      for (int q : qs) {
        if (kind == "theorem1") {
          emit(kind, t, q, [&] { return theorem1_rhs(p, q, gnorm); });
        } else if (kind == "small_time") {
          emit(kind, t, q, [&] { return small_time_rhs(p, q0, q, t, gnorm); });
        } else if (kind == "main") {
          emit(kind, t, q, [&] { return main_rhs(p, q0, q, t, gnorm); });
        } else if (kind == "delta") {
          emit(kind, t, q, [&] { return delta_value(p, q0, q, t); });
        } else if (kind == "topo") {
          emit(kind, t, q, [&] { return topo_error_rhs(p, q0, q, t); });
        } else if (kind == "topo_unit") {
          emit(kind, t, q, [&] { return topo_error_rhs_unit(p, q0, q, t); });
        } else if (kind == "schedule") {
          json s = {{"t", t}, {"q", q}, {"q0", q0}};
          try {
            const QSchedule qs_ = q_schedule(q0, q, time_grid(p, t).n);
            s["n"] = qs_.n;
            s["delta_q"] = qs_.delta_q;
            s["levels"] = qs_.levels;
          } catch (const Error& e) {
            s["note"] = e.what();
          }
          schedules.push_back(std::move(s));
        }
      }
    }
  }
  Report r;
  r.body = {{"g", c.g}, {"k", c.k}, {"kappa", p.kappa}, {"gamma_norm", gnorm}, {"rows", rows}};
  if (!schedules.empty()) r.body["schedules"] = schedules;
  r.tables.push_back({{"kind", "t", "q", "q0", "value"}, std::move(table)});
  return r;
}

json truncation_json(const TruncationReport& rep) {
  json steps = json::array();
  for (const TruncationStep& s : rep.steps) {
    steps.push_back({{"from_q", s.from_q},
                     {"to_q", s.to_q},
                     {"m0", s.m0},
                     {"terms_used", s.terms_used},
                     {"pruning_budget", num(s.pruning_budget)},
                     {"step_rhs", num(s.step_rhs)}});
  }
  json j = {{"q0", rep.q0},
            {"m0", rep.m0},
            {"target_q", rep.target_q},
            {"t", rep.t},
            {"pruning_budget", num(rep.pruning_budget)},
            {"bound_rhs", num(rep.bound_rhs)},
            {"gamma_norm", rep.gamma_norm},
            {"witness_locality", rep.witness.locality()},
            {"witness_terms", rep.witness.size()},
            {"steps", steps},
            {"witness", operator_json(rep.witness)}};
  if (rep.schedule) {
    j["schedule"] = {{"n", rep.schedule->n},
                     {"delta_q", rep.schedule->delta_q},
                     {"levels", rep.schedule->levels}};
  }
  return j;
}

double witness_error(const KLocalOperator& H, const KLocalOperator& gamma, double t,
                     const KLocalOperator& witness, const OracleLimits& limits) {
  const DenseOperator exact = heisenberg_evolve(H, gamma, t, limits);
  return operator_norm_exact(exact - to_dense(witness, limits), limits);
}

Report run_truncate(const RunConfig& cfg, const Instance& in) {
  const double t = single_t(cfg);
  const int q = single_q(cfg);
  TruncationOptions opt;
  opt.threshold = cfg.threshold;
  opt.gamma_norm = best_norm(in.gamma, cfg.limits);
  const TruncationReport rep = cfg.method == "series"
                                   ? hadamard_truncate(in.H, in.gamma, t, q, opt)
                                   : chained_truncate(in.H, in.gamma, t, q, opt);
  Report r;
  r.body = truncation_json(rep);
  r.body["method"] = cfg.method;
  std::vector<Check> checks;
  if (in.H.n_sites() <= cfg.limits.operator_sites) {
    const double err = witness_error(in.H, in.gamma, t, rep.witness, cfg.limits);
    checks.push_back({"witness_error", err, rep.bound_rhs + rep.pruning_budget});
    r.body["oracle_error"] = err;
  } else {
    r.body["oracle_error"] = nullptr;
  }
  r.body["checks"] = checks_json(checks);
  r.pass = all_hold(checks);
  return r;
}

std::vector<Check> layer_checks(const KLocalOperator& H, const LayerDecomposition& d,
                                const DecompositionCertificate& cert, const OracleLimits& limits) {
  std::vector<Check> checks;
  checks.push_back({"layer_count", static_cast<double>(cert.layer_count),
                    static_cast<double>(cert.layer_bound)});
  checks.push_back({"site_multiplicity", static_cast<double>(cert.max_site_multiplicity),
                    static_cast<double>(cert.site_cap)});
  checks.push_back({"scaled_layer_extensiveness", cert.max_scaled_extensiveness, cert.gk});
  checks.push_back({"disjoint_violations", cert.disjoint ? 0.0 : 1.0, 0.0});
  checks.push_back({"commuting_violations", cert.commuting ? 0.0 : 1.0, 0.0});
  checks.push_back({"maximality_violations", cert.maximal ? 0.0 : 1.0, 0.0});
  checks.push_back({"unassigned_units", cert.all_assigned ? 0.0 : 1.0, 0.0});
  if (H.n_sites() <= limits.operator_sites) {
    const double err = operator_norm_exact(reconstruct(d) - H, limits);
    checks.push_back({"reconstruction_error", err, d.pool.gap_upper + 1e-12});
  }
  return checks;
}

Report run_decompose(const RunConfig& cfg, const Instance& in) {
  const StructuralConstants c = structural_constants(in.H);
  const double eps = default_epsilon(cfg, c.g);
  const LayerDecomposition d = pack_layers(discretize(in.H, eps));
  const DecompositionCertificate cert = certify(d);
  const std::vector<Check> checks = layer_checks(in.H, d, cert, cfg.limits);
  Report r;
  r.body = to_json(d, cert);
  r.body["checks"] = checks_json(checks);
  r.pass = cert.ok() && all_hold(checks);
  return r;
}

bool is_commuting(const KLocalOperator& H) {
  const auto terms = H.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (!terms[i].string.commutes_with(terms[j].string)) return false;
    }
  }
  return true;
}

/// max over sampled thresholds E of ||P_{>= E + 2gq + delta} Gamma P_{<= E}||.
Check energy_block_check(const std::string& name, const KLocalOperator& H,
                         const KLocalOperator& gamma, const OracleLimits& limits) {
  const StructuralConstants c = structural_constants(H);
  const int q = std::max(static_cast<int>(gamma.locality()), 1);
  const Propagator prop(to_dense(H, limits));
  const DenseOperator g = to_dense(gamma, limits);
  const Eigen::VectorXd& e = prop.energies();
  const double width = 2.0 * c.g * q;
  const double delta = 1e-9 * std::max(1.0, width);
  std::vector<double> levels(e.data(), e.data() + e.size());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               levels.end());
  const std::size_t stride = std::max<std::size_t>(1, levels.size() / 16);
  double worst = 0.0;
  for (std::size_t i = 0; i < levels.size(); i += stride) {
    worst = std::max(worst, energy_block_norm(prop, g, levels[i], levels[i] + width + delta));
  }
  return Check(name, worst, 1e-10);
}

Report run_verify(const RunConfig& cfg, const Instance& in) {
  const double t = single_t(cfg);
  const int q = single_q(cfg);
  const std::size_t n = in.H.n_sites();
  require_sites(n, cfg.limits.operator_sites, "operator");
  const StructuralConstants c = structural_constants(in.H);
  const BoundParams p = params_for(c);
  const int q0 = std::max(static_cast<int>(in.gamma.locality()), 1);
  const double gnorm = operator_norm_exact(in.gamma, cfg.limits);

  std::vector<Check> checks;
  json notes = json::array();
  checks.push_back({"commutator_norm", operator_norm_exact(commutator(in.H, in.gamma), cfg.limits),
                    theorem1_rhs(p, q0, gnorm)});

  TruncationOptions opt;
  opt.threshold = cfg.threshold;
  opt.gamma_norm = gnorm;
  std::optional<double> chained_error;
  try {
    const TruncationReport rep = chained_truncate(in.H, in.gamma, t, q, opt);
    chained_error = witness_error(in.H, in.gamma, t, rep.witness, cfg.limits);
    checks.push_back({"chained_witness_error", *chained_error, rep.bound_rhs + rep.pruning_budget});
    const double main = main_rhs(p, q0, q, t, gnorm);
    const double via_delta =
        2.0 * static_cast<double>(time_grid(p, t).n) * delta_value(p, q0, q, t) * gnorm;
    checks.push_back({"main_delta_identity", std::abs(main - via_delta), 1e-12 * main});
  } catch (const InfeasibleError& e) {
    notes.push_back(std::string("chained witness skipped: ") + e.what());
  }
  if (p.kappa * std::abs(t) < 2.0) {
    const TruncationReport rep = hadamard_truncate(in.H, in.gamma, t, q, opt);
    checks.push_back({"series_witness_error",
                      witness_error(in.H, in.gamma, t, rep.witness, cfg.limits),
                      rep.bound_rhs + rep.pruning_budget});
  } else {
    notes.push_back("series witness skipped: kappa |t| >= 2");
  }
  if (q <= static_cast<int>(n)) {
    const QLocalProjection proj =
        q_local_project(heisenberg_evolve(in.H, in.gamma, t, cfg.limits),
                        static_cast<std::size_t>(q), cfg.limits);
    Check pc{"projection_residual", proj.residual_opnorm, main_rhs(p, q0, q, t, gnorm)};
    // Asserted only where it improves on the chained witness.
    pc.asserted = chained_error && proj.residual_opnorm <= *chained_error;
    checks.push_back(pc);
  }

  const double eps = default_epsilon(cfg, c.g);
  const LayerDecomposition d = pack_layers(discretize(in.H, eps));
  const DecompositionCertificate cert = certify(d);
  for (Check& lc : layer_checks(in.H, d, cert, cfg.limits)) checks.push_back(std::move(lc));
  if (!d.layers.empty()) {
    checks.push_back(energy_block_check("energy_block_first_layer", d.layer_operator(0),
                                        in.gamma, cfg.limits));
  }
  if (is_commuting(in.H)) {
    checks.push_back(energy_block_check("energy_block_hamiltonian", in.H, in.gamma, cfg.limits));
  }

  Report r;
  r.body = {{"t", t}, {"q", q}, {"q0", q0}, {"g", c.g}, {"k", c.k}, {"kappa", p.kappa},
            {"epsilon", eps}, {"gamma_norm", gnorm}, {"checks", checks_json(checks)}};
  if (!notes.empty()) r.body["notes"] = notes;
  r.pass = all_hold(checks);
  return r;
}

SiteState site_state(const std::string& name) {
  if (name == "plus") return SiteState::plus();
  if (name == "minus") return SiteState::minus();
  if (name == "zero") return SiteState::zero();
  if (name == "one") return SiteState::one();
  throw ValidationError("state must be plus, minus, zero or one", "state");
}

std::string orthogonal_state(const std::string& name) {
  if (name == "plus") return "minus";
  if (name == "minus") return "plus";
  return name == "zero" ? "one" : "zero";
}

Pauli axis(const std::string& name) {
  if (name == "x") return Pauli::X;
  if (name == "y") return Pauli::Y;
  if (name == "z") return Pauli::Z;
  throw ValidationError("observable must be x, y or z", "observable");
}

Report run_concentrate(const RunConfig& cfg, const Instance& in) {
  const double t = single_t(cfg);
  const std::size_t n = in.H.n_sites();
  require_sites(n, cfg.limits.state_sites, "state");
  const StructuralConstants c = structural_constants(in.H, in.declared_g);
  const BoundParams p = params_for(c);
  const TimeGrid tg = time_grid(p, t);
  const ProductState state = ProductState::uniform(n, site_state(cfg.state));
  const ExtensiveObservable A = ExtensiveObservable::uniform(n, axis(cfg.observable));

  OracleLimits dense_limits = cfg.limits;
  dense_limits.operator_sites = cfg.limits.state_sites;
  const Propagator prop(to_dense(in.H, dense_limits));
  const Vector psi = evolve_product_state(prop, state, t);
  const TailProfile prof = tail_profile(psi, A);
  const std::optional<TailFit> fit = fit_tail_constants(prof, tg.r_t, t, n);

  std::vector<Check> checks;
  double rise = 0.0;
  double beyond = 0.0;
  json tail = json::array();
  std::vector<std::vector<json>> tail_rows;
  for (std::size_t i = 0; i < prof.samples.size(); ++i) {
    const TailSample& s = prof.samples[i];
    if (i > 0) rise = std::max(rise, s.tail - prof.samples[i - 1].tail);
    if (prof.mean + s.r > static_cast<double>(n) + 1e-9) beyond = std::max(beyond, s.tail);
    json f = fit ? num(fit->c1 * std::exp(-fit->decay_rate * s.r)) : json(nullptr);
    tail.push_back({{"R", s.r}, {"tail", s.tail}, {"fit", f}});
    tail_rows.push_back({s.r, s.tail, f});
  }
  checks.push_back({"tail_monotonicity_rise", rise, 1e-12});
  checks.push_back({"tail_beyond_spectrum", beyond, 1e-12});

  const DenseOperator hp_t = prop.evolve(to_dense(parent_hamiltonian(state), dense_limits), t);
  const double width = cfg.bin_width.value_or(tg.r_t);
  const BandMatrix band = band_matrix(hp_t, A, width);
  json entries = json::array();
  std::vector<std::vector<json>> band_rows;
  double worst_ratio = 0.0;
  double zero_block = 0.0;
  const auto nb = static_cast<std::size_t>(band.norms.rows());
  for (std::size_t x = 0; x < nb; ++x) {
    if (band.bin_sizes[x] == 0) continue;
    for (std::size_t y = 0; y < nb; ++y) {
      if (band.bin_sizes[y] == 0) continue;
      const double norm = band.norms(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      const double dist = std::abs(static_cast<double>(x) - static_cast<double>(y));
      const double bound = band_rhs(p, t, n, dist);
      worst_ratio = std::max(worst_ratio, bound > 0.0 ? norm / bound : (norm > 0.0 ? 1e300 : 0.0));
      if (width * (dist - 1.0) / 2.0 >= static_cast<double>(n)) {
        zero_block = std::max(zero_block, norm);
      }
      entries.push_back({{"x", x}, {"x_prime", y}, {"norm", norm}, {"bound", num(bound)}});
      band_rows.push_back({x, y, norm, num(bound)});
    }
  }
  checks.push_back({"band_entry_over_bound", worst_ratio, 1.0});
  checks.push_back({"zero_block_norm", zero_block, 1e-12});

  const BandConstants bc = band_constants(p, t, n);
  Report r;
  r.body = {{"t", t},
            {"n", tg.n},
            {"r_t", num(tg.r_t)},
            {"state", cfg.state},
            {"observable", cfg.observable},
            {"mean", prof.mean},
            {"tail", tail},
            {"band",
             {{"bin_width", width},
              {"origin", band.origin},
              {"c_v", num(bc.c_v)},
              {"mu", bc.mu},
              {"entries", entries}}},
            {"checks", checks_json(checks)}};
  r.body["fit"] = fit ? json{{"c1", num(fit->c1)},
                             {"c2", num(fit->c2)},
                             {"decay_rate", num(fit->decay_rate)},
                             {"points", fit->points}}
                      : json(nullptr);
  // Sampled topological-error estimate against the orthogonal product state.
  if (!cfg.q.empty()) {
    const int q = single_q(cfg);
    const ProductState other =
        ProductState::uniform(n, site_state(orthogonal_state(cfg.state)));
    const TopoEstimate est =
        topo_error_estimate(psi, evolve_product_state(prop, other, t),
                            static_cast<std::size_t>(q), cfg.samples, cfg.seed, dense_limits);
    r.body["topo_estimate"] = {{"q", q},
                               {"reference_state", orthogonal_state(cfg.state)},
                               {"eps_hat", est.eps_hat},
                               {"diagonal_max", est.diagonal_max},
                               {"cross_max", est.cross_max},
                               {"probes", est.probes}};
  }
  r.tables.push_back({{"R", "tail", "fit"}, std::move(tail_rows)});
  r.tables.push_back({{"x", "x_prime", "norm", "bound"}, std::move(band_rows)});
  r.pass = all_hold(checks);
  return r;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void flatten(const json& j, const std::string& path, std::vector<std::vector<json>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), rows);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], path + "[" + std::to_string(i) + "]", rows);
    }
  } else {
    rows.push_back({path, j});
  }
}

void write_csv(std::ostream& os, const Report& r, const json& header) {
  std::vector<std::pair<std::vector<std::string>, std::vector<std::vector<json>>>> tables =
      r.tables;
  if (tables.empty()) {
    std::vector<std::vector<json>> rows;
    flatten(header, "", rows);
    flatten(r.body, "", rows);
    tables.push_back({{"key", "value"}, std::move(rows)});
  }
  bool first = true;
  for (const auto& [cols, rows] : tables) {
    if (!first) os << "\n";
    first = false;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << "\n";
    }
  }
}

json canonical_input(const RunConfig& cfg, const Instance& in) {
  json j = {{"subcommand", cfg.subcommand},
            {"hamiltonian", operator_json(in.H)},
            {"gamma", operator_json(in.gamma)},
            {"t", cfg.t},
            {"q", cfg.q},
            {"seed", cfg.seed},
            {"samples", cfg.samples},
            {"threshold", cfg.threshold},
            {"nmax", cfg.limits.operator_sites},
            {"nmax_state", cfg.limits.state_sites},
            {"kind", cfg.kind},
            {"method", cfg.method},
            {"state", cfg.state},
            {"observable", cfg.observable}};
  j["declared_g"] = in.declared_g ? json(*in.declared_g) : json(nullptr);
  j["q0"] = cfg.q0 ? json(*cfg.q0) : json(nullptr);
  j["epsilon"] = cfg.epsilon ? json(*cfg.epsilon) : json(nullptr);
  j["bin_width"] = cfg.bin_width ? json(*cfg.bin_width) : json(nullptr);
  return j;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::kResource ? kExitResource : kExitValidation;
}

void write_error(std::ostream& os, const std::string& code, const std::string& message,
                 const std::string& field) {
  json e = {{"error", {{"code", code}, {"message", message}, {"field", field}}}};
  os << e.dump(2) << "\n";
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  std::ofstream file;
  if (cfg.out_path) {
    file.open(*cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw ValidationError("cannot write " + cfg.out_path->string(), "out");
  }
  std::ostream& os = cfg.out_path ? static_cast<std::ostream&>(file) : out;

  const Instance in = load_instance(cfg);
  Report r;
  if (cfg.subcommand == "constants") r = run_constants(cfg, in);
  else if (cfg.subcommand == "bound") r = run_bound(cfg, in);
  else if (cfg.subcommand == "truncate") r = run_truncate(cfg, in);
  else if (cfg.subcommand == "decompose") r = run_decompose(cfg, in);
  else if (cfg.subcommand == "verify") r = run_verify(cfg, in);
  else r = run_concentrate(cfg, in);

  const json header = {{"tool", "klocal"},
                       {"version", kVersion},
                       {"subcommand", cfg.subcommand},
                       {"input_hash", fnv1a_hex(canonical_input(cfg, in).dump())},
                       {"seed", cfg.seed},
                       {"status", r.pass ? "pass" : "fail"}};
  if (cfg.format == "csv") {
    write_csv(os, r, header);
  } else {
    json doc = header;
    doc["report"] = r.body;
    os << doc.dump(2) << "\n";
  }
  os.flush();
  return r.pass ? kExitPass : kExitViolation;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator-spreading bounds and certificates for k-local Hamiltonians", "klocal"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string spec;
  std::string gamma;
  std::string out_path;
  std::vector<std::string> params;
  std::optional<double> epsilon;
  std::optional<int> q0;
  std::optional<double> bin_width;

  const std::vector<std::pair<const char*, const char*>> subs = {
      {"constants", "structural constants and bound parameters"},
      {"bound", "evaluate bound right-hand sides over a (t, q) grid"},
      {"truncate", "build a q-local approximant of Gamma(t)"},
      {"decompose", "split H into commuting layers"},
      {"verify", "run every certificate on one small instance"},
      {"concentrate", "spectral tails and band structure in an evolved product state"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--spec", spec, "Hamiltonian spec (JSON)");
    s->add_option("--model", cfg.model, "built-in model family instead of --spec");
    s->add_option("--n", cfg.model_sites, "site count for --model");
    s->add_option("--param", params, "model parameter key=value")->delimiter(',');
    s->add_option("--gamma", gamma, "observable spec (JSON); default Z on site 0");
    s->add_option("--out", out_path, "report path; stdout when absent");
    s->add_option("--format", cfg.format, "json or csv");
    s->add_option("--t", cfg.t, "evolution time(s)")->delimiter(',');
    s->add_option("--q", cfg.q, "target locality (or localities)")->delimiter(',');
    s->add_option("--q0", q0, "locality of Gamma");
    s->add_option("--epsilon", epsilon, "unit size for the layer decomposition");
    s->add_option("--seed", cfg.seed, "random seed");
    s->add_option("--samples", cfg.samples, "number of random samples");
    s->add_option("--threshold", cfg.threshold, "coefficient pruning threshold");
    s->add_option("--nmax", cfg.limits.operator_sites, "site limit for dense operator work");
    s->add_option("--nmax-state", cfg.limits.state_sites, "site limit for dense state work");
    s->add_option("--kind", cfg.kind, "bound kind");
    s->add_option("--method", cfg.method, "chained or series");
    s->add_option("--state", cfg.state, "product state: plus, minus, zero or one");
    s->add_option("--observable", cfg.observable, "observable axis: x, y or z");
    s->add_option("--bin-width", bin_width, "bin width (default r_t)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    write_error(out, "validation", e.what(), "");
    return kExitValidation;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (!spec.empty()) cfg.spec_path = spec;
  if (!gamma.empty()) cfg.gamma_path = gamma;
  if (!out_path.empty()) cfg.out_path = out_path;
  cfg.epsilon = epsilon;
  cfg.q0 = q0;
  cfg.bin_width = bin_width;

  try {
    for (const std::string& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("--param expects key=value", "param");
      std::size_t used = 0;
      const std::string value = kv.substr(eq + 1);
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) {
        throw ValidationError("--param value must be a number", kv.substr(0, eq));
      }
      cfg.model_params[kv.substr(0, eq)] = v;
    }
    return run(cfg, out);
  } catch (const Error& e) {
    write_error(out, to_string(e.kind()), e.what(), e.field());
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    write_error(out, "resource", "out of memory", "");
    return kExitResource;
  } catch (const std::logic_error& e) {
    write_error(out, "assertion", e.what(), "");
    return kExitViolation;
  } catch (const std::exception& e) {
    err << "klocal: " << e.what() << "\n";
    write_error(out, "internal", e.what(), "");
    return kExitValidation;
  }
}

}  // namespace klocal
