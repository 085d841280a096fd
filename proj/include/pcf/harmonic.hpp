#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include "pcf/structure.hpp"

namespace pcf {

/// Boundary Laplacian D on V_0 and resistance weights r.
struct HarmonicStructure {
  Eigen::MatrixXd D;
  std::vector<double> r;
};

/// Throws ValidationError naming the first failing condition: D symmetric with
/// non-positive off-diagonals, zero row sums, PSD with kernel = constants, and
/// regularity 0 < r_i < 1.
void validate(const HarmonicStructure& hs, const SelfSimilarStructure& s);

/// Reads the `harmonic` block ({"D": n0 x n0 row-major, "r": N-array}).
HarmonicStructure parse_harmonic(const nlohmann::json& block, const SelfSimilarStructure& s);
nlohmann::json to_json(const HarmonicStructure& hs);

/// Edge of a level complex. `tail` < `head` (canonical orientation), and the
/// edge remembers the cell and the boundary labels it came from.
struct Edge {
  int tail = 0;
  int head = 0;
  double conductance = 0.0;
  std::int64_t cell = 0;
  int label_tail = 0;
  int label_head = 0;
};

/// Level-m energy E^(m)[u] = sum_w r_w^{-1} E_D[u o F_w] as a sparse operator.
struct EnergyForm {
  LevelComplex complex;
  Eigen::SparseMatrix<double> H;
  std::vector<Edge> edges;
  std::vector<double> cell_scales;  // r_w per word
  bool merged_edges = false;        // some vertex pair appears in more than one cell

  int level() const { return complex.level; }
  std::size_t num_vertices() const { return complex.num_vertices(); }

  double energy(std::span<const double> u) const;
  double bilinear(std::span<const double> u, std::span<const double> v) const;
};

EnergyForm assemble_energy(const SelfSimilarStructure& s, const HarmonicStructure& hs, int m);

struct HarmonicReport {
  bool pass = false;
  double deviation = 0.0;
  double tol = 0.0;
  std::string message;
  Eigen::MatrixXd schur;

  nlohmann::json to_json() const;
};

/// Schur complement of H_1 onto V_0 compared with D in max-norm.
HarmonicReport verify_harmonic(const SelfSimilarStructure& s, const HarmonicStructure& hs, double tol = 1e-9);

/// Minimiser of E^(m+1) among extensions of `coarse` (given on V_m, the first
/// entries of the fine vertex order). Throws SolveError if the interior block
/// cannot be factorised.
std::vector<double> harmonic_extension(const EnergyForm& fine, std::span<const double> coarse);

std::vector<double> harmonic_extension(const SelfSimilarStructure& s, const HarmonicStructure& hs, int m,
                                       std::span<const double> u);

/// A_i with (A_i)_{qp} = value at the q-th boundary point of cell i of the
/// harmonic extension of the p-th boundary indicator.
std::vector<Eigen::MatrixXd> extension_matrices(const SelfSimilarStructure& s, const HarmonicStructure& hs);

/// Harmonic continuation of `u` from complex `from` to the deeper complex `to`
/// cell by cell through the extension matrices. Agrees with repeated
/// harmonic_extension but never solves a global system.
std::vector<double> harmonic_lift(std::span<const Eigen::MatrixXd> A, const LevelComplex& from,
                                  std::span<const double> u, const LevelComplex& to);

}  // namespace pcf
