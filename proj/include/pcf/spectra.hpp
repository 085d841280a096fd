#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pcf/harmonic.hpp"
#include "pcf/structure.hpp"

namespace pcf {

/// Self-similar measure weights mu_i.
struct MeasureWeights {
  std::vector<double> mu;
};

/// mu_i > 0, sum = 1 (to 1e-12) and mu_i r_i < 1.
void validate(const MeasureWeights& mw, const SelfSimilarStructure& s, const HarmonicStructure& hs);
MeasureWeights parse_measure(const nlohmann::json& block, const SelfSimilarStructure& s, const HarmonicStructure& hs);

struct SpectralExponent {
  double d_S = 0.0;
  std::vector<double> gamma;  // sqrt(r_i mu_i)
  bool lattice = false;
  double residual = 0.0;      // |sum gamma_i^d_S - 1|

  nlohmann::json to_json() const;
};

/// Root of sum_i gamma_i^d = 1. Throws PreconditionError if some gamma_i >= 1.
SpectralExponent solve_spectral_exponent(const HarmonicStructure& hs, const MeasureWeights& mw);

/// True when every ln(gamma_i)/ln(gamma_1) is within `tol` of a fraction with
/// denominator <= max_den.
bool is_lattice(std::span<const double> gamma, int max_den = 64, double tol = 1e-9);

/// nu_i = gamma_i^d_S.
std::vector<double> kl_weights(const SpectralExponent& se);

/// Root of sum_i r_i^d = 1 (the similarity dimension of the resistance weights).
double resistance_dimension(std::span<const double> r);

/// Integrals of the harmonic tents: fixed point of sum_i mu_i A_i^T, normalised to sum 1.
std::vector<double> tent_integrals(std::span<const Eigen::MatrixXd> A, const MeasureWeights& mw);
std::vector<double> tent_integrals(const SelfSimilarStructure& s, const HarmonicStructure& hs, const MeasureWeights& mw);

/// Lumped mass m_p = sum over incidences (w, q) of vertex p of mu_w I_q.
std::vector<double> mass_vector(const LevelComplex& lc, const MeasureWeights& mw, std::span<const double> tents);
std::vector<double> mass_vector(const SelfSimilarStructure& s, const HarmonicStructure& hs, const MeasureWeights& mw,
                                int m);

enum class BoundaryCondition { Neumann, Dirichlet };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& text);

/// Generalized eigenpairs of (H, diag(mass)). Eigenvectors are stored on the
/// full vertex set (rows = vertices); under Dirichlet the V_0 rows are zero.
struct SpectralData {
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int level = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd mass;

  Eigen::Index size() const { return eigenvalues.size(); }
};

inline constexpr Eigen::Index kDenseEigenLimit = 4000;

SpectralData eigensolve(const EnergyForm& ef, std::span<const double> mass, BoundaryCondition bc);

struct EigenResiduals {
  double orthonormality = 0.0;  // max |A^T M A - I|
  double residual = 0.0;        // max_k |H a_k - lambda_k M a_k|_inf / (|H|_inf |a_k|_inf) on free rows
};

EigenResiduals eigen_residuals(const EnergyForm& ef, const SpectralData& sd);

/// rho(x) = #{k : lambda_k <= x}.
std::size_t counting_function(const SpectralData& sd, double x);

struct WeylFit {
  double slope = 0.0;
  double intercept = 0.0;
  double target = 0.0;  // d_S / 2
  double tol = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
  bool pass = false;

  nlohmann::json to_json() const;
};

inline constexpr double kWeylMaxBandRatio = 4.0;

/// Least-squares slope of ln rho against ln x over the middle decade
/// [c/sqrt(10), c sqrt(10)], c = sqrt(lambda_first * lambda_max), sampled at
/// distinct eigenvalues. Throws PreconditionError below 50 eigenvalues.
WeylFit weyl_fit(const SpectralData& sd, const SpectralExponent& se, double tol = 0.05);

/// g(x) = sum_k a_k(x)^2 / lambda_k on all vertices (0 on V_0). Dirichlet only.
Eigen::VectorXd green_diagonal(const SpectralData& sd);

double heat_kernel(const SpectralData& sd, double t, Eigen::Index x, Eigen::Index y);
Eigen::VectorXd heat_diagonal(const SpectralData& sd, double t);

struct C1Estimate {
  double c1 = 0.0;             // sup over t in [t_min, 1] of t^{d_S/2} max_x p(t,x,x), and max_x p(1,x,x)
  double c1_unit_time = 0.0;   // max_{x,y} p(1,x,y)
  double t_argmax = 0.0;
  double t_min = 0.0;

  nlohmann::json to_json() const;
};

C1Estimate c1_estimate(const SpectralData& sd, double d_S);

struct HeatBoundReport {
  bool pass = false;
  double worst_small_t = 0.0;  // max of p(t,x,x) / (c1 t^{-d_S/2}), t in [t_min, 1]
  double worst_large_t = 0.0;  // max of p(t,x,x) / (c1 e^{-(t-1) lambda_1}), t in [1, 10]

  nlohmann::json to_json() const;
};

HeatBoundReport heat_bound_check(const SpectralData& sd, double d_S, const C1Estimate& c1);

struct PotentialReport {
  double p = 0.0;
  double max_diagonal = 0.0;
  double rhs = 0.0;
  bool pass = false;
  Eigen::VectorXd diagonal;

  nlohmann::json to_json() const;
};

/// g_p(x,x) = Gamma(p/2) sum_k lambda_k^{-p/2} a_k(x)^2 against c1 (1/lambda_1 + 2/(p - d_S)).
PotentialReport potential_kernel(const SpectralData& sd, double p, double d_S, double c1);

struct SpectralVolume {
  double estimate = 0.0;
  double band = 0.0;
  double cutoff = 0.0;
  double ratio_mean = 0.0;  // mean of rho(x) / x^{d_S/2} over the Weyl window

  nlohmann::json to_json() const;
};

/// Non-lattice spectral volume from the renewal integral of U(t) = e^{-d_S t} R(e^{2t}).
SpectralVolume spectral_volume_estimate(const SpectralData& sd, const SpectralExponent& se);

}  // namespace pcf
