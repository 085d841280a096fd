#include "pcf/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "pcf/definition.hpp"
#include "pcf/error.hpp"
#include "pcf/fredholm.hpp"
#include "pcf/functions.hpp"
#include "pcf/io.hpp"

namespace pcf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  const RunConfig& cfg;
  FractalDefinition def;
  json effective;
  std::ostream& log;
  std::chrono::steady_clock::time_point start;
  fs::path out;

  const SelfSimilarStructure& s() const { return def.structure; }
  const HarmonicStructure& hs() const { return def.require_harmonic(); }
  const MeasureWeights& mw() const { return def.require_measure(); }

  void write(const std::string& name, const std::string& content) const {
    io::write_atomic(out / name, content);
    log << "wrote " << (out / name).string() << "\n";
  }

  // Adds `checks` and `meta`, writes the report and returns whether every check passed.
  bool report(const std::string& name, json doc, const std::map<std::string, bool>& checks) const {
    bool all = true;
    json c = json::object();
    for (const auto& [k, v] : checks) {
      c[k] = v;
      all = all && v;
      log << (v ? "PASS " : "FAIL ") << k << "\n";
    }
    doc["checks"] = c;
    doc["pass"] = all;
    double wall = -1.0;
    if (cfg.timing) wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    doc["meta"] = io::meta(effective, cfg.seed, wall);
    write(name, io::dump(doc));
    return all;
  }
};

Context make_context(const RunConfig& cfg, std::ostream& log) {
  if (cfg.preset.empty() == cfg.definition_path.empty()) throw InputError("give exactly one of --preset or --def");
  FractalDefinition def = cfg.preset.empty() ? load_definition(cfg.definition_path) : load_preset(cfg.preset);
  json effective = def.source;
  if (cfg.mu) {
    MeasureWeights mw{*cfg.mu};
    validate(mw, def.structure, def.require_harmonic());
    def.measure = mw;
    effective["measure"] = {{"mu", *cfg.mu}};
  }
  if (cfg.level < 0 || cfg.level > cfg.max_level)
    throw InputError("--level must lie in 0.." + std::to_string(cfg.max_level));
  fs::create_directories(cfg.out_dir);
  return Context{cfg, std::move(def), std::move(effective), log, std::chrono::steady_clock::now(), fs::path(cfg.out_dir)};
}

FunctionSpec function_spec(const RunConfig& cfg, int level) {
  if (cfg.function.empty()) {
    FunctionSpec spec;
    spec.kind = FunctionSpec::Kind::RandomHarmonic;
    spec.level = std::min(2, level);
    spec.seed = cfg.seed;
    return spec;
  }
  json doc;
  const auto first = cfg.function.find_first_not_of(" \t\n");
  if (first != std::string::npos && cfg.function[first] == '{') {
    try {
      doc = json::parse(cfg.function);
    } catch (const json::exception& e) {
      throw InputError(std::string("--fn is not valid JSON: ") + e.what());
    }
  } else {
    std::ifstream in(cfg.function);
    if (!in) throw InputError("cannot open function spec file '" + cfg.function + "'");
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError("function spec file '" + cfg.function + "' is not valid JSON: " + e.what());
    }
  }
  return parse_function_spec(doc);
}

SpectralData solve(const Context& ctx, const EnergyForm& ef, BoundaryCondition bc) {
  const auto mass = mass_vector(ef.complex, ctx.mw(), tent_integrals(ctx.s(), ctx.hs(), ctx.mw()));
  return eigensolve(ef, mass, bc);
}

bool cmd_describe(const Context& ctx) {
  const auto& s = ctx.s();
  json doc;
  doc["structure"] = to_json(s);
  json counts = json::array();
  for (int m = 0; m <= std::min(ctx.cfg.level, 6); ++m) {
    const auto lc = build_level(s, m);
    counts.push_back({{"level", m}, {"vertices", lc.num_vertices()}, {"cells", lc.num_cells()}});
  }
  doc["levels"] = counts;
  std::map<std::string, bool> checks;
  if (ctx.def.harmonic) {
    const auto rep = verify_harmonic(s, *ctx.def.harmonic, ctx.cfg.tol.value_or(1e-9));
    doc["harmonic"] = to_json(*ctx.def.harmonic);
    doc["verification"] = rep.to_json();
    checks["harmonic_verification"] = rep.pass;
    ctx.log << "schur deviation " << rep.deviation << "\n";
    if (ctx.def.measure && rep.pass) {
      const auto se = solve_spectral_exponent(*ctx.def.harmonic, *ctx.def.measure);
      const auto nu = kl_weights(se);
      double nu_sum = 0.0;
      for (double v : nu) nu_sum += v;
      doc["measure"] = {{"mu", ctx.def.measure->mu}};
      doc["spectral_exponent"] = se.to_json();
      doc["d_S"] = se.d_S;
      doc["lattice"] = se.lattice;
      doc["nu"] = nu;
      doc["tent_integrals"] = tent_integrals(s, *ctx.def.harmonic, *ctx.def.measure);
      checks["d_S_residual"] = se.residual <= 1e-12;
      checks["nu_sum"] = std::abs(nu_sum - 1.0) <= 1e-12;
      ctx.log << "d_S " << se.d_S << " lattice " << (se.lattice ? "true" : "false") << "\n";
    }
  }
  return ctx.report("describe.json", doc, checks);
}

bool cmd_spectrum(const Context& ctx) {
  const auto bc = parse_boundary_condition(ctx.cfg.bc);
  const auto ef = assemble_energy(ctx.s(), ctx.hs(), ctx.cfg.level);
  const auto sd = solve(ctx, ef, bc);
  const auto res = eigen_residuals(ef, sd);

  std::vector<double> index, value, rank;
  for (Eigen::Index k = 0; k < sd.size(); ++k) {
    const double lam = sd.eigenvalues(k);
    const bool same = k > 0 && lam - sd.eigenvalues(k - 1) <= 1e-8 * std::abs(lam);
    index.push_back(static_cast<double>(k + 1));
    value.push_back(lam);
    rank.push_back(same ? rank.back() + 1.0 : 1.0);
  }
  ctx.write("spectrum.csv", io::csv({"index", "eigenvalue", "multiplicity_rank"}, {index, value, rank}));

  const double mass_total = sd.mass.sum();
  json doc = {{"level", sd.level},
              {"bc", to_string(bc)},
              {"count", sd.size()},
              {"mass_total", mass_total},
              {"orthonormality_deviation", res.orthonormality},
              {"relative_residual", res.residual}};
  if (sd.size() > 0) {
    doc["lambda1"] = sd.eigenvalues(0);
    doc["lambda_max"] = sd.eigenvalues(sd.size() - 1);
  }
  return ctx.report("spectrum.json", doc,
                    {{"mass_total", std::abs(mass_total - 1.0) <= 1e-12},
                     {"mass_orthonormality", res.orthonormality <= 1e-10},
                     {"eigen_residual", res.residual <= 1e-8}});
}

bool cmd_weyl(const Context& ctx) {
  const auto bc = parse_boundary_condition(ctx.cfg.bc);
  const auto se = solve_spectral_exponent(ctx.hs(), ctx.mw());
  const auto ef = assemble_energy(ctx.s(), ctx.hs(), ctx.cfg.level);
  const auto sd = solve(ctx, ef, bc);
  const auto fit = weyl_fit(sd, se, ctx.cfg.tol.value_or(0.05));

  std::vector<double> xs, rho, ratio;
  for (Eigen::Index k = 0; k < sd.size(); ++k) {
    const double x = sd.eigenvalues(k);
    if (x <= 0.0 || (k + 1 < sd.size() && sd.eigenvalues(k + 1) - x <= 1e-8 * x)) continue;
    xs.push_back(x);
    rho.push_back(static_cast<double>(counting_function(sd, x)));
    ratio.push_back(rho.back() / std::pow(x, 0.5 * se.d_S));
  }
  ctx.write("counting.csv", io::csv({"x", "rho", "ratio"}, {xs, rho, ratio}));

  json doc = fit.to_json();
  doc["level"] = sd.level;
  doc["bc"] = to_string(bc);
  doc["d_S"] = se.d_S;
  doc["lattice"] = se.lattice;
  if (se.lattice || bc != BoundaryCondition::Dirichlet) {
    doc["spectral_volume"] = {{"refused", se.lattice ? "lattice case: ln gamma_i are commensurable"
                                                     : "spectral volume uses the Dirichlet spectrum"}};
  } else {
    doc["spectral_volume"] = spectral_volume_estimate(sd, se).to_json();
  }
  return ctx.report("weyl.json", doc, {{"weyl_fit", fit.pass}});
}

bool cmd_kernels(const Context& ctx) {
  const auto se = solve_spectral_exponent(ctx.hs(), ctx.mw());
  const auto ef = assemble_energy(ctx.s(), ctx.hs(), ctx.cfg.level);
  const auto sd = solve(ctx, ef, BoundaryCondition::Dirichlet);
  if (sd.size() == 0) throw PreconditionError("kernels: no interior vertices at level " + std::to_string(ctx.cfg.level));

  const Eigen::VectorXd g = green_diagonal(sd);
  std::vector<double> vertex, gv;
  for (Eigen::Index x = 0; x < g.size(); ++x) {
    vertex.push_back(static_cast<double>(x));
    gv.push_back(g(x));
  }
  ctx.write("green_diagonal.csv", io::csv({"vertex", "g"}, {vertex, gv}));

  Eigen::Index argmax = 0;
  const double sup_g = g.maxCoeff(&argmax);
  const double min_interior = g.tail(sd.size()).minCoeff();
  const auto c1 = c1_estimate(sd, se.d_S);
  const auto heat = heat_bound_check(sd, se.d_S, c1);
  json doc = {{"level", sd.level},
              {"bc", "dirichlet"},
              {"d_S", se.d_S},
              {"lambda1", sd.eigenvalues(0)},
              {"green", {{"sup", sup_g}, {"argmax_vertex", argmax}, {"min_interior", min_interior}}},
              {"c1", c1.to_json()},
              {"heat_bound", heat.to_json()}};
  std::map<std::string, bool> checks = {{"green_positive", min_interior > 0.0}, {"heat_bound", heat.pass}};
  if (ctx.cfg.p > se.d_S && ctx.cfg.p <= 2.0) {
    const auto pot = potential_kernel(sd, ctx.cfg.p, se.d_S, c1.c1);
    doc["potential"] = pot.to_json();
    checks["potential_bound"] = pot.pass;
  } else {
    doc["potential"] = {{"skipped", "p must satisfy d_S < p <= 2"}, {"p", ctx.cfg.p}};
  }
  return ctx.report("kernels.json", doc, checks);
}

bool cmd_commutator(const Context& ctx) {
  const int m = ctx.cfg.level;
  const auto se = solve_spectral_exponent(ctx.hs(), ctx.mw());
  const auto spec = function_spec(ctx.cfg, m);
  const auto a = materialize(spec, ctx.s(), ctx.hs(), m);
  auto ef = assemble_energy(ctx.s(), ctx.hs(), m);
  const auto sd = solve(ctx, ef, BoundaryCondition::Dirichlet);
  const auto em = build_module(std::move(ef));
  const auto cs = commutator(em, a, se.d_S, spec.id());

  std::vector<double> rank, sigma;
  for (std::size_t k = 0; k < cs.svals.size(); ++k) {
    rank.push_back(static_cast<double>(k + 1));
    sigma.push_back(cs.svals[k]);
  }
  ctx.write("svals.csv", io::csv({"rank", "sigma"}, {rank, sigma}));

  const double hs_dev =
      std::abs(cs.hs_full - cs.hs_from_T) / std::max(std::abs(cs.hs_full), std::numeric_limits<double>::min());
  std::map<std::string, bool> checks = {{"hs_identity", cs.hs_full == 0.0 ? cs.hs_from_T == 0.0 : hs_dev <= 1e-10}};
  json doc;
  const auto c1 = sd.size() > 0 ? c1_estimate(sd, se.d_S) : C1Estimate{};
  if (ctx.cfg.p > se.d_S && ctx.cfg.p <= 2.0 && sd.size() > 0) {
    const auto sch = schatten_report(cs, sd, ctx.cfg.p, c1.c1);
    doc = sch.to_json();
    checks["schatten_bound"] = sch.pass;
  } else {
    doc["schatten_skipped"] = "p must satisfy d_S < p <= 2";
  }
  doc["function"] = spec.to_json();
  doc["commutator"] = cs.to_json();
  doc["commutator"]["hs_relative_deviation"] = hs_dev;
  doc["log_averaged"] = log_averaged_sums(cs, se.d_S).to_json();
  if (sd.size() >= 2) {
    const auto efn = energy_functional(cs, sd, c1.c1);
    doc["energy_functional"] = efn.to_json();
    checks["energy_functional_bound"] = efn.pass;
    const auto hg = hs_green_bound(em, sd, a);
    doc["hs_green_bound"] = hg.to_json();
    checks["per_vector_inequality"] = hg.per_vector_pass;
    checks["green_chain"] = hg.chain_pass;
  }
  return ctx.report("summability.json", doc, checks);
}

bool cmd_invariance(const Context& ctx) {
  const int m = ctx.cfg.level;
  if (m + 2 > ctx.cfg.max_level) throw InputError("invariance needs level + 2 <= " + std::to_string(ctx.cfg.max_level));
  const auto se = solve_spectral_exponent(ctx.hs(), ctx.mw());
  const auto spec = function_spec(ctx.cfg, m);

  std::vector<EdgeModule> modules;
  std::vector<SpectralData> spectra;
  for (int l = m; l <= m + 2; ++l) {
    auto ef = assemble_energy(ctx.s(), ctx.hs(), l);
    if (l <= m + 1) spectra.push_back(solve(ctx, ef, BoundaryCondition::Dirichlet));
    modules.push_back(build_module(std::move(ef)));
  }
  json runs = json::array();
  std::map<std::string, bool> checks;
  std::vector<double> gaps;
  for (int j = 0; j < 2; ++j) {
    const auto a = materialize(spec, ctx.s(), ctx.hs(), m + j + 1);
    const auto c1 = c1_estimate(spectra[j], se.d_S);
    const auto rep = invariance_check(ctx.hs(), modules[j + 1], modules[j], spectra[j], c1.c1, se, a);
    runs.push_back(rep.to_json());
    gaps.push_back(rep.gap);
    const std::string tag = "m" + std::to_string(m + j);
    checks["bound_" + tag] = rep.bound_holds;
    checks["holder_" + tag] = rep.holder_holds;
    checks["decomposition_" + tag] = rep.decomposition_holds;
  }
  json doc = {{"function", spec.to_json()},
              {"d_S", se.d_S},
              {"runs", runs},
              {"trend", {{"gaps", gaps}, {"gap_nonincreasing", gaps[1] <= gaps[0]}}}};
  return ctx.report("invariance.json", doc, checks);
}

const std::map<std::string, std::function<bool(const Context&)>>& commands() {
  static const std::map<std::string, std::function<bool(const Context&)>> table = {
      {"describe", cmd_describe},     {"spectrum", cmd_spectrum},     {"weyl", cmd_weyl},
      {"kernels", cmd_kernels},       {"commutator", cmd_commutator}, {"invariance", cmd_invariance}};
  return table;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : commands()) names.push_back(k);
  return names;
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    const auto it = commands().find(cfg.command);
    if (it == commands().end()) throw InputError("unknown command '" + cfg.command + "'");
    const Context ctx = make_context(cfg, log);
    return it->second(ctx) ? kExitOk : kExitCheckFailed;
  } catch (const SolveError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolveError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace pcf
