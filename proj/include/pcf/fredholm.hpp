#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pcf/harmonic.hpp"
#include "pcf/spectra.hpp"

namespace pcf {

/// Edge space of a level complex with the derivation (da)(e) = sqrt(c_e)(a(head) - a(tail)),
/// the midpoint module action and the phase F = 2P - I.
struct EdgeModule {
  EnergyForm form;
  Eigen::MatrixXd derivation;        // |E| x |V|
  Eigen::MatrixXd range_basis;       // orthonormal basis of Im d, |E| x rank
  Eigen::MatrixXd complement_basis;  // orthonormal basis of (Im d)^perp
  Eigen::MatrixXd phase;             // F
  Eigen::Index rank = 0;

  int level() const { return form.level(); }
  Eigen::Index num_edges() const { return derivation.rows(); }
  Eigen::Index num_vertices() const { return derivation.cols(); }

  Eigen::VectorXd derive(std::span<const double> a) const;
  /// bbar(e) = (b(head) + b(tail)) / 2
  Eigen::VectorXd midpoint(std::span<const double> b) const;
  Eigen::MatrixXd projection() const;
};

/// Throws SolveError if rank P differs from |V| - 1.
EdgeModule build_module(EnergyForm ef);

/// Dense [F, M_a] on edge space.
Eigen::MatrixXd commutator_matrix(const EdgeModule& em, std::span<const double> a);

struct CommutatorSpectrum {
  std::vector<double> svals;  // descending, length |E|
  int level = 0;
  std::string function_id;
  double d_S = 0.0;
  std::size_t zero_count = 0;
  double energy = 0.0;          // E^(m)[a]
  double hs_full = 0.0;         // ||[F, M_a]||_HS^2 from the dense commutator
  double hs_from_T = 0.0;       // 8 ||P^perp M_a P||_HS^2
  double pairing_deviation = -1.0;  // max |svd([F,a]) - paired block values|, -1 if not computed

  nlohmann::json to_json() const;
};

/// Singular values of [F, M_a] through the block T = P^perp M_a P: each
/// singular value of 2T appears twice. With `dense_check` the full commutator
/// is also decomposed and the pairing deviation recorded.
CommutatorSpectrum commutator(const EdgeModule& em, std::span<const double> a, double d_S,
                              const std::string& function_id, bool dense_check = false);

struct EnergyMeasure {
  double edge_sum = 0.0;  // sum_e c_e bbar(e) (a(head) - a(tail))^2
  double bilinear = 0.0;  // E(a, ab) - E(b, a^2) / 2
};

EnergyMeasure energy_measure(const EdgeModule& em, std::span<const double> a, std::span<const double> b);

struct HSGreenBound {
  double per_vector_worst = 0.0;  // max_k ||P^perp(abar . d a_k)|| - ||(d a) . abar_k||
  bool per_vector_pass = false;
  double partial_sum = 0.0;       // sum_k lambda_k^{-1} ||P^perp M_a d a_k||^2
  double midpoint_kernel_sum = 0.0;
  double green_integral = 0.0;    // int g dGamma(a)
  double sup_g = 0.0;
  double energy = 0.0;
  double hs_full = 0.0;
  double full_ratio = 0.0;        // ||[F,a]||^2 / (8 sup g E[a])
  bool chain_pass = false;

  nlohmann::json to_json() const;
};

inline constexpr double kPerVectorSlack = 1e-12;

HSGreenBound hs_green_bound(const EdgeModule& em, const SpectralData& sd, std::span<const double> a);

struct SchattenReport {
  double p = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double lambda1 = 0.0;
  double d_S = 0.0;
  double trace = 0.0;  // sum_k lambda_k^{-p/2}
  bool pass = false;

  nlohmann::json to_json() const;
};

/// sum mu_k^p against c2(p)^{p/2} E[a]^{p/2} Tr(H_D^{-p/2})^{1-p/2},
/// c2(p) = 16 c1 (1/lambda_1 + 2/(p - d_S)) / Gamma(p/2).
SchattenReport schatten_report(const CommutatorSpectrum& cs, const SpectralData& sd, double p, double c1);

struct LogAveragedSums {
  std::vector<double> values;  // values[i] at N = i + 2
  double max = 0.0;
  double at_full = 0.0;
  double at_half = 0.0;
  double total = 0.0;          // sum_k mu_k^{d_S}

  nlohmann::json to_json() const;
};

LogAveragedSums log_averaged_sums(const CommutatorSpectrum& cs, double d_S);

struct EnergyFunctional {
  double phi = 0.0;      // (1/ln N) sum_{k <= N} mu_k^{d_S}, N = |E|
  double phi_half = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  double c2 = 0.0;       // 32 c1 / Gamma(d_S/2)
  double trace_surrogate = 0.0;  // (1/ln K) sum_k lambda_k^{-d_S/2}
  bool pass = false;

  nlohmann::json to_json() const;
};

double trace_surrogate(const SpectralData& sd, double d_S);
double energy_functional_value(const CommutatorSpectrum& cs, double d_S);
EnergyFunctional energy_functional(const CommutatorSpectrum& cs, const SpectralData& sd, double c1);

struct InvarianceReport {
  int level = 0;  // m: fine module at m + 1, cell modules at m
  double phi_fine = 0.0;
  std::vector<double> phi_cells;
  double phi_sum = 0.0;
  double gap = 0.0;  // |phi_fine - phi_sum| / phi_fine
  double bound_constant = 0.0;  // c2(d_S)^{d_S/2} trace_surrogate^{1 - d_S/2}
  double energy = 0.0;          // E^(m+1)[a]
  double bound = 0.0;           // c (sum r_i^q)^{(2-d_S)/2} E[a]^{d_S/2}
  bool bound_holds = false;
  double holder_lhs = 0.0;      // sum_i E^(m)[a o F_i]^{d_S/2}
  double holder_rhs = 0.0;      // (sum r_i^q)^{(2-d_S)/2} E[a]^{d_S/2}
  double holder_exponent = 0.0; // q = d_S / (2 - d_S)
  double d_H = 0.0;             // sum r_i^{d_H} = 1
  double sum_r_q = 0.0;
  bool holder_holds = false;
  double decomposition_deviation = -1.0;  // -1 when edges were merged
  bool decomposition_holds = false;

  nlohmann::json to_json() const;
};

inline constexpr double kDecompositionTol = 1e-12;

/// Compares the level-(m+1) functional of `a` with the sum of level-m functionals
/// of the restrictions a o F_i. `coarse_sd` (Dirichlet, level m) and `c1` fix the
/// constant of the bound.
InvarianceReport invariance_check(const HarmonicStructure& hs, const EdgeModule& fine, const EdgeModule& coarse,
                                  const SpectralData& coarse_sd, double c1, const SpectralExponent& se,
                                  std::span<const double> a);

}  // namespace pcf
