#include "pcf/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "pcf/error.hpp"
#include "pcf/kernels.hpp"

namespace pcf {

namespace {

std::vector<double> descending_block_values(const Eigen::MatrixXd& B, Eigen::Index num_edges) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(num_edges));
  if (B.rows() > 0 && B.cols() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      out.push_back(2.0 * svd.singularValues()(k));
      out.push_back(2.0 * svd.singularValues()(k));
    }
  }
  out.resize(static_cast<std::size_t>(num_edges), 0.0);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double sum_pow(std::span<const double> v, double p) {
  double s = 0.0;
  for (double x : v)
    if (x > 0.0) s += std::pow(x, p);
  return s;
}

}  // namespace

Eigen::VectorXd EdgeModule::derive(std::span<const double> a) const {
  if (static_cast<Eigen::Index>(a.size()) != num_vertices()) throw PreconditionError("derive: function size mismatch");
  return derivation * Eigen::Map<const Eigen::VectorXd>(a.data(), num_vertices());
}

Eigen::VectorXd EdgeModule::midpoint(std::span<const double> b) const {
  if (static_cast<Eigen::Index>(b.size()) != num_vertices()) throw PreconditionError("midpoint: function size mismatch");
  Eigen::VectorXd out(num_edges());
  for (Eigen::Index k = 0; k < num_edges(); ++k) {
    const auto& e = form.edges[static_cast<std::size_t>(k)];
    out(k) = 0.5 * (b[e.head] + b[e.tail]);
  }
  return out;
}

Eigen::MatrixXd EdgeModule::projection() const { return range_basis * range_basis.transpose(); }

EdgeModule build_module(EnergyForm ef) {
  EdgeModule em;
  em.form = std::move(ef);
  const auto ne = static_cast<Eigen::Index>(em.form.edges.size());
  const auto nv = static_cast<Eigen::Index>(em.form.num_vertices());
  em.derivation = Eigen::MatrixXd::Zero(ne, nv);
  for (Eigen::Index k = 0; k < ne; ++k) {
    const auto& e = em.form.edges[static_cast<std::size_t>(k)];
    const double s = std::sqrt(e.conductance);
    em.derivation(k, e.head) = s;
    em.derivation(k, e.tail) = -s;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(em.derivation);
  em.rank = qr.rank();
  if (em.rank != nv - 1)
    throw SolveError("rank of the derivation is " + std::to_string(em.rank) + ", expected |V| - 1 = " +
                     std::to_string(nv - 1));
  const Eigen::MatrixXd Q = qr.householderQ();
  em.range_basis = Q.leftCols(em.rank);
  em.complement_basis = Q.rightCols(ne - em.rank);
  em.phase = 2.0 * em.projection() - Eigen::MatrixXd::Identity(ne, ne);
  return em;
}

Eigen::MatrixXd commutator_matrix(const EdgeModule& em, std::span<const double> a) {
  return kernels::omp::commutator_matrix(em.phase, em.midpoint(a));
}

nlohmann::json CommutatorSpectrum::to_json() const {
  nlohmann::json j = {{"level", level},       {"function_id", function_id}, {"d_S", d_S},
                      {"num_svals", svals.size()}, {"zero_count", zero_count},   {"energy", energy},
                      {"hs_full", hs_full},   {"hs_from_T", hs_from_T}};
  if (pairing_deviation >= 0.0) j["pairing_deviation"] = pairing_deviation;
  return j;
}

CommutatorSpectrum commutator(const EdgeModule& em, std::span<const double> a, double d_S,
                              const std::string& function_id, bool dense_check) {
  CommutatorSpectrum cs;
  cs.level = em.level();
  cs.function_id = function_id;
  cs.d_S = d_S;
  cs.energy = em.form.energy(a);

  // [F, M_{a+c}] = [F, M_a]; centring keeps constants exactly zero.
  Eigen::VectorXd abar = em.midpoint(a);
  if (abar.size() > 0) abar.array() -= abar(0);
  const Eigen::MatrixXd B = em.complement_basis.transpose() * abar.asDiagonal() * em.range_basis;
  cs.hs_from_T = 8.0 * B.squaredNorm();
  cs.svals = descending_block_values(B, em.num_edges());

  const Eigen::MatrixXd C = kernels::omp::commutator_matrix(em.phase, abar);
  cs.hs_full = C.squaredNorm();
  if (dense_check) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(C);
    const auto& full = svd.singularValues();
    cs.pairing_deviation = 0.0;
    for (Eigen::Index k = 0; k < full.size(); ++k)
      cs.pairing_deviation = std::max(cs.pairing_deviation, std::abs(full(k) - cs.svals[static_cast<std::size_t>(k)]));
  }

  const double top = cs.svals.empty() ? 0.0 : cs.svals.front();
  for (double& s : cs.svals) {
    if (s <= 1e-12 * top || top == 0.0) {
      s = 0.0;
      ++cs.zero_count;
    }
  }
  return cs;
}

EnergyMeasure energy_measure(const EdgeModule& em, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || static_cast<Eigen::Index>(a.size()) != em.num_vertices())
    throw PreconditionError("energy_measure: function size mismatch");
  EnergyMeasure out;
  out.edge_sum = kernels::omp::edge_measure(em.form.edges, a, b);
  std::vector<double> ab(a.size()), a2(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab[i] = a[i] * b[i];
    a2[i] = a[i] * a[i];
  }
  out.bilinear = em.form.bilinear(a, ab) - 0.5 * em.form.bilinear(b, a2);
  return out;
}

nlohmann::json HSGreenBound::to_json() const {
  return {{"per_vector_worst", per_vector_worst},
          {"per_vector_pass", per_vector_pass},
          {"partial_sum", partial_sum},
          {"midpoint_kernel_sum", midpoint_kernel_sum},
          {"green_integral", green_integral},
          {"sup_g", sup_g},
          {"energy", energy},
          {"hs_full", hs_full},
          {"full_ratio", full_ratio},
          {"chain_pass", chain_pass}};
}

HSGreenBound hs_green_bound(const EdgeModule& em, const SpectralData& sd, std::span<const double> a) {
  if (sd.level != em.level()) throw PreconditionError("hs_green_bound: spectral data and module are at different levels");
  if (sd.bc != BoundaryCondition::Dirichlet) throw PreconditionError("hs_green_bound needs Dirichlet spectral data");
  HSGreenBound rep;
  const Eigen::VectorXd abar = em.midpoint(a);
  const Eigen::VectorXd da = em.derive(a);

  const Eigen::MatrixXd dA = em.derivation * sd.eigenvectors;  // columns d a_k
  Eigen::MatrixXd X = abar.asDiagonal() * dA;
  X -= em.range_basis * (em.range_basis.transpose() * X);  // P^perp M_a d a_k

  rep.per_vector_worst = -std::numeric_limits<double>::infinity();
  double tol_scale = 0.0;
  for (Eigen::Index k = 0; k < sd.size(); ++k) {
    const auto& ak = sd.eigenvectors.col(k);
    Eigen::VectorXd rhs(em.num_edges());
    for (Eigen::Index e = 0; e < em.num_edges(); ++e) {
      const auto& edge = em.form.edges[static_cast<std::size_t>(e)];
      rhs(e) = da(e) * 0.5 * (ak(edge.head) + ak(edge.tail));
    }
    const double lhs_norm = X.col(k).norm();
    const double rhs_norm = rhs.norm();
    rep.per_vector_worst = std::max(rep.per_vector_worst, lhs_norm - rhs_norm);
    tol_scale = std::max(tol_scale, rhs_norm);
    rep.partial_sum += X.col(k).squaredNorm() / sd.eigenvalues(k);
    rep.midpoint_kernel_sum += rhs.squaredNorm() / sd.eigenvalues(k);
  }
  rep.per_vector_pass = rep.per_vector_worst <= kPerVectorSlack * std::max(1.0, tol_scale);

  const Eigen::VectorXd g = green_diagonal(sd);
  rep.sup_g = g.maxCoeff();
  rep.green_integral = kernels::omp::edge_measure(em.form.edges, a, {g.data(), static_cast<std::size_t>(g.size())});
  rep.energy = em.form.energy(a);
  rep.hs_full = kernels::omp::commutator_matrix(em.phase, abar).squaredNorm();
  const double denom = 8.0 * rep.sup_g * rep.energy;
  rep.full_ratio = denom > 0.0 ? rep.hs_full / denom : 0.0;
  const double slack = 1e-10 * std::max(1.0, rep.sup_g * rep.energy);
  rep.chain_pass = rep.partial_sum <= rep.midpoint_kernel_sum + slack &&
                   rep.midpoint_kernel_sum <= rep.green_integral + slack &&
                   rep.green_integral <= rep.sup_g * rep.energy + slack;
  return rep;
}

nlohmann::json SchattenReport::to_json() const {
  return {{"p", p},
          {"lhs", lhs},
          {"rhs", rhs},
          {"ratio", ratio},
          {"pass", pass},
          {"trace", trace},
          {"constants", {{"c1", c1}, {"c2", c2}, {"lambda1", lambda1}, {"dS", d_S}}}};
}

SchattenReport schatten_report(const CommutatorSpectrum& cs, const SpectralData& sd, double p, double c1) {
  if (sd.bc != BoundaryCondition::Dirichlet) throw PreconditionError("schatten_report needs Dirichlet spectral data");
  if (!(p > cs.d_S && p <= 2.0))
    throw PreconditionError("schatten_report needs d_S < p <= 2, got p = " + std::to_string(p));
  SchattenReport rep;
  rep.p = p;
  rep.d_S = cs.d_S;
  rep.c1 = c1;
  rep.lambda1 = sd.eigenvalues(0);
  rep.c2 = 16.0 * c1 * (1.0 / rep.lambda1 + 2.0 / (p - cs.d_S)) / std::tgamma(0.5 * p);
  rep.trace = sd.eigenvalues.array().pow(-0.5 * p).sum();
  rep.lhs = sum_pow(cs.svals, p);
  rep.rhs = std::pow(rep.c2, 0.5 * p) * std::pow(cs.energy, 0.5 * p) * std::pow(rep.trace, 1.0 - 0.5 * p);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.pass = rep.lhs <= rep.rhs;
  return rep;
}

nlohmann::json LogAveragedSums::to_json() const {
  return {{"max", max}, {"at_full", at_full}, {"at_half", at_half}, {"total", total}};
}

LogAveragedSums log_averaged_sums(const CommutatorSpectrum& cs, double d_S) {
  LogAveragedSums out;
  const std::size_t n = cs.svals.size();
  double partial = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (cs.svals[k] > 0.0) partial += std::pow(cs.svals[k], d_S);
    const std::size_t N = k + 1;
    if (N >= 2) out.values.push_back(partial / std::log(static_cast<double>(N)));
  }
  out.total = partial;
  if (!out.values.empty()) {
    out.max = *std::max_element(out.values.begin(), out.values.end());
    out.at_full = out.values.back();
    const std::size_t half = std::max<std::size_t>(n / 2, 2);
    out.at_half = out.values[half - 2];
  }
  return out;
}

nlohmann::json EnergyFunctional::to_json() const {
  return {{"phi", phi},       {"phi_half", phi_half}, {"bound", bound}, {"ratio", ratio},
          {"c2", c2},         {"trace_surrogate", trace_surrogate}, {"pass", pass}};
}

double trace_surrogate(const SpectralData& sd, double d_S) {
  if (sd.size() < 2) throw PreconditionError("trace surrogate needs at least two eigenvalues");
  return sd.eigenvalues.array().pow(-0.5 * d_S).sum() / std::log(static_cast<double>(sd.size()));
}

double energy_functional_value(const CommutatorSpectrum& cs, double d_S) {
  if (cs.svals.size() < 2) return 0.0;
  return sum_pow(cs.svals, d_S) / std::log(static_cast<double>(cs.svals.size()));
}

EnergyFunctional energy_functional(const CommutatorSpectrum& cs, const SpectralData& sd, double c1) {
  if (sd.bc != BoundaryCondition::Dirichlet) throw PreconditionError("energy_functional needs Dirichlet spectral data");
  const double d = cs.d_S;
  EnergyFunctional ef;
  const auto sums = log_averaged_sums(cs, d);
  ef.phi = sums.at_full;
  ef.phi_half = sums.at_half;
  ef.c2 = 32.0 * c1 / std::tgamma(0.5 * d);
  ef.trace_surrogate = trace_surrogate(sd, d);
  ef.bound = std::pow(ef.c2, 0.5 * d) * std::pow(cs.energy, 0.5 * d) * std::pow(ef.trace_surrogate, 1.0 - 0.5 * d);
  ef.ratio = ef.bound > 0.0 ? ef.phi / ef.bound : 0.0;
  ef.pass = ef.phi <= ef.bound;
  return ef;
}

nlohmann::json InvarianceReport::to_json() const {
  nlohmann::json j = {{"level", level},
                      {"phi_fine", phi_fine},
                      {"phi_cells", phi_cells},
                      {"phi_sum", phi_sum},
                      {"gap", gap},
                      {"bound",
                       {{"constant", bound_constant}, {"energy", energy}, {"value", bound}, {"holds", bound_holds}}},
                      {"holder",
                       {{"lhs", holder_lhs},
                        {"rhs", holder_rhs},
                        {"exponent", holder_exponent},
                        {"d_H", d_H},
                        {"sum_r_exponent", sum_r_q},
                        {"holds", holder_holds}}},
                      {"decomposition_holds", decomposition_holds}};
  if (decomposition_deviation >= 0.0) j["decomposition_deviation"] = decomposition_deviation;
  return j;
}

InvarianceReport invariance_check(const HarmonicStructure& hs, const EdgeModule& fine, const EdgeModule& coarse,
                                  const SpectralData& coarse_sd, double c1, const SpectralExponent& se,
                                  std::span<const double> a) {
  const int m = coarse.level();
  if (fine.level() != m + 1) throw PreconditionError("invariance_check: modules must be at levels m and m + 1");
  if (coarse_sd.level != m) throw PreconditionError("invariance_check: spectral data must be at the coarse level");
  if (static_cast<Eigen::Index>(a.size()) != fine.num_vertices())
    throw PreconditionError("invariance_check: function must be given on V_{m+1}");

  const double d = se.d_S;
  const int N = fine.form.complex.N;
  InvarianceReport rep;
  rep.level = m;
  rep.phi_fine = energy_functional_value(commutator(fine, a, d, "fine"), d);
  rep.energy = fine.form.energy(a);

  const std::size_t coarse_edges = coarse.form.edges.size();
  const bool aligned = !fine.form.merged_edges && !coarse.form.merged_edges &&
                       fine.form.edges.size() == coarse_edges * static_cast<std::size_t>(N);
  rep.decomposition_deviation = aligned ? 0.0 : -1.0;
  const Eigen::VectorXd da = fine.derive(a);

  std::vector<double> cell_energy;
  for (int i = 0; i < N; ++i) {
    const auto sub = pullback(fine.form.complex, coarse.form.complex, i, a);
    rep.phi_cells.push_back(energy_functional_value(commutator(coarse, sub, d, "cell"), d));
    cell_energy.push_back(coarse.form.energy(sub));
    if (aligned) {
      // Edges are stored cell by cell, so cell i's block lines up with the coarse edges.
      const Eigen::VectorXd dsub = coarse.derive(sub);
      const double scale = 1.0 / std::sqrt(hs.r[i]);
      for (std::size_t k = 0; k < coarse_edges; ++k) {
        const std::size_t fk = i * coarse_edges + k;
        const auto& fe = fine.form.edges[fk];
        const auto& ce = coarse.form.edges[k];
        const double fs = fe.label_tail < fe.label_head ? 1.0 : -1.0;
        const double cs = ce.label_tail < ce.label_head ? 1.0 : -1.0;
        const double dev = std::abs(fs * da(static_cast<Eigen::Index>(fk)) - scale * cs * dsub(static_cast<Eigen::Index>(k)));
        rep.decomposition_deviation = std::max(rep.decomposition_deviation, dev);
      }
    }
  }
  rep.phi_sum = 0.0;
  for (double v : rep.phi_cells) rep.phi_sum += v;
  rep.gap = rep.phi_fine > 0.0 ? std::abs(rep.phi_fine - rep.phi_sum) / rep.phi_fine : 0.0;
  if (aligned) {
    const double da_scale = std::max(1.0, da.cwiseAbs().maxCoeff());
    rep.decomposition_holds = rep.decomposition_deviation <= kDecompositionTol * da_scale;
  }

  rep.holder_exponent = d / (2.0 - d);
  rep.d_H = resistance_dimension(hs.r);
  rep.sum_r_q = 0.0;
  for (double r : hs.r) rep.sum_r_q += std::pow(r, rep.holder_exponent);
  const double holder_factor = std::pow(rep.sum_r_q, 0.5 * (2.0 - d));
  rep.holder_lhs = 0.0;
  for (double e : cell_energy) rep.holder_lhs += std::pow(e, 0.5 * d);
  rep.holder_rhs = holder_factor * std::pow(rep.energy, 0.5 * d);
  rep.holder_holds = rep.holder_lhs <= rep.holder_rhs * (1.0 + 1e-12);

  const double c2 = 32.0 * c1 / std::tgamma(0.5 * d);
  rep.bound_constant = std::pow(c2, 0.5 * d) * std::pow(trace_surrogate(coarse_sd, d), 1.0 - 0.5 * d);
  rep.bound = rep.bound_constant * rep.holder_rhs;
  rep.bound_holds = rep.phi_sum <= rep.bound;
  return rep;
}

}  // namespace pcf
