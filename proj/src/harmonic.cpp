#include "pcf/harmonic.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "pcf/error.hpp"

namespace pcf {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> u) {
  return {u.data(), static_cast<Eigen::Index>(u.size())};
}

// Solves the level-1 interior system: columns are interior values of the
// harmonic extension of each boundary indicator. Throws SolveError on a
// singular interior block.
Eigen::MatrixXd level1_interior_response(const EnergyForm& level1) {
  const Eigen::MatrixXd H = Eigen::MatrixXd(level1.H);
  const Eigen::Index nb = level1.complex.n0;
  const Eigen::Index ni = H.rows() - nb;
  if (ni == 0) return Eigen::MatrixXd(0, nb);
  Eigen::LLT<Eigen::MatrixXd> llt(H.bottomRightCorner(ni, ni));
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13)
    throw SolveError("singular interior block at level 1 (disconnected interior)");
  return -llt.solve(H.bottomLeftCorner(ni, nb));
}

}  // namespace

void validate(const HarmonicStructure& hs, const SelfSimilarStructure& s) {
  if (hs.D.rows() != s.n0 || hs.D.cols() != s.n0)
    throw ValidationError("D must be " + std::to_string(s.n0) + "x" + std::to_string(s.n0));
  if (static_cast<int>(hs.r.size()) != s.N) throw ValidationError("r must have N = " + std::to_string(s.N) + " entries");

  const double scale = std::max(1.0, hs.D.cwiseAbs().maxCoeff());
  const double asym = (hs.D - hs.D.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) throw ValidationError("D is not symmetric: max |D - D^T| = " + fmt(asym));
  for (int p = 0; p < s.n0; ++p) {
    for (int q = 0; q < s.n0; ++q) {
      if (p != q && hs.D(p, q) > 0.0)
        throw ValidationError("D off-diagonal entry (" + std::to_string(p + 1) + "," + std::to_string(q + 1) +
                              ") = " + fmt(hs.D(p, q)) + " > 0");
    }
    const double row = hs.D.row(p).sum();
    if (std::abs(row) > 1e-12 * scale)
      throw ValidationError("D row " + std::to_string(p + 1) + " sums to " + fmt(row) + " != 0");
  }
  if (s.n0 >= 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs.D, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (ev(0) < -1e-10 * scale) throw ValidationError("D is not positive semidefinite: eigenvalue " + fmt(ev(0)));
    if (ev(1) <= 1e-10 * scale)
      throw ValidationError("kernel of D is larger than the constants: second eigenvalue " + fmt(ev(1)));
  }
  for (int i = 0; i < s.N; ++i) {
    if (!(hs.r[i] > 0.0 && hs.r[i] < 1.0))
      throw ValidationError("harmonic structure not regular: r_" + std::to_string(i + 1) + " = " + fmt(hs.r[i]) +
                            " outside (0, 1)");
  }
}

HarmonicStructure parse_harmonic(const nlohmann::json& block, const SelfSimilarStructure& s) {
  HarmonicStructure hs;
  try {
    const auto& d = block.at("D");
    if (!d.is_array() || static_cast<int>(d.size()) != s.n0) throw InputError("harmonic.D must have n0 rows");
    hs.D.resize(s.n0, s.n0);
    for (int p = 0; p < s.n0; ++p) {
      if (!d[p].is_array() || static_cast<int>(d[p].size()) != s.n0) throw InputError("harmonic.D rows must have n0 entries");
      for (int q = 0; q < s.n0; ++q) hs.D(p, q) = d[p][q].get<double>();
    }
    hs.r = block.at("r").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed harmonic block: ") + e.what());
  }
  validate(hs, s);
  return hs;
}

nlohmann::json to_json(const HarmonicStructure& hs) {
  nlohmann::json d = nlohmann::json::array();
  for (Eigen::Index p = 0; p < hs.D.rows(); ++p) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index q = 0; q < hs.D.cols(); ++q) row.push_back(hs.D(p, q));
    d.push_back(row);
  }
  return {{"D", d}, {"r", hs.r}};
}

double EnergyForm::energy(std::span<const double> u) const { return bilinear(u, u); }

double EnergyForm::bilinear(std::span<const double> u, std::span<const double> v) const {
  if (u.size() != num_vertices() || v.size() != num_vertices())
    throw PreconditionError("energy: function size does not match the level complex");
  // H 1 = 0, so centring changes nothing but the rounding in H v.
  const Eigen::VectorXd uc = as_vector(u).array() - as_vector(u).mean();
  const Eigen::VectorXd vc = as_vector(v).array() - as_vector(v).mean();
  return uc.dot(H * vc);
}

EnergyForm assemble_energy(const SelfSimilarStructure& s, const HarmonicStructure& hs, int m) {
  validate(hs, s);
  EnergyForm ef;
  ef.complex = build_level(s, m);

  ef.cell_scales = {1.0};
  for (int level = 0; level < m; ++level) {
    std::vector<double> next(ef.cell_scales.size() * s.N);
    for (std::size_t w = 0; w < ef.cell_scales.size(); ++w)
      for (int i = 0; i < s.N; ++i) next[w * s.N + i] = ef.cell_scales[w] * hs.r[i];
    ef.cell_scales = std::move(next);
  }

  const auto nv = static_cast<std::int64_t>(ef.num_vertices());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(ef.cell_scales.size() * s.n0 * s.n0);
  std::unordered_map<std::int64_t, std::size_t> edge_index;
  for (std::int64_t w = 0; w < ef.complex.num_cells(); ++w) {
    const auto c = ef.complex.cell(w);
    const double inv = 1.0 / ef.cell_scales[w];
    for (int a = 0; a < s.n0; ++a) {
      for (int b = 0; b < s.n0; ++b) {
        if (hs.D(a, b) != 0.0) triplets.emplace_back(c[a], c[b], hs.D(a, b) * inv);
      }
    }
    for (int a = 0; a < s.n0; ++a) {
      for (int b = a + 1; b < s.n0; ++b) {
        if (hs.D(a, b) >= 0.0) continue;
        Edge e{c[a], c[b], -hs.D(a, b) * inv, w, a, b};
        if (e.tail > e.head) {
          std::swap(e.tail, e.head);
          std::swap(e.label_tail, e.label_head);
        }
        const std::int64_t key = e.tail * nv + e.head;
        if (auto it = edge_index.find(key); it != edge_index.end()) {
          ef.edges[it->second].conductance += e.conductance;
          ef.merged_edges = true;
        } else {
          edge_index.emplace(key, ef.edges.size());
          ef.edges.push_back(e);
        }
      }
    }
  }
  ef.H.resize(nv, nv);
  ef.H.setFromTriplets(triplets.begin(), triplets.end());
  ef.H.makeCompressed();
  return ef;
}

nlohmann::json HarmonicReport::to_json() const {
  nlohmann::json j = {{"pass", pass}, {"deviation", deviation}, {"tol", tol}};
  if (!message.empty()) j["message"] = message;
  return j;
}

HarmonicReport verify_harmonic(const SelfSimilarStructure& s, const HarmonicStructure& hs, double tol) {
  HarmonicReport rep;
  rep.tol = tol;
  const EnergyForm level1 = assemble_energy(s, hs, 1);
  const Eigen::MatrixXd H = Eigen::MatrixXd(level1.H);
  const Eigen::Index nb = s.n0;
  Eigen::MatrixXd response;
  try {
    response = level1_interior_response(level1);
  } catch (const SolveError& e) {
    rep.pass = false;
    rep.deviation = std::numeric_limits<double>::infinity();
    rep.message = e.what();
    return rep;
  }
  rep.schur = H.topLeftCorner(nb, nb);
  if (response.rows() > 0) rep.schur += H.topRightCorner(nb, response.rows()) * response;
  rep.deviation = (rep.schur - hs.D).cwiseAbs().maxCoeff();
  rep.pass = rep.deviation <= tol;
  if (!rep.pass) rep.message = "Schur complement of H_1 deviates from D by " + fmt(rep.deviation);
  return rep;
}

std::vector<double> harmonic_extension(const EnergyForm& fine, std::span<const double> coarse) {
  const auto& sizes = fine.complex.nested_sizes;
  if (fine.level() < 1) throw PreconditionError("harmonic_extension needs a fine level >= 1");
  const auto nc = static_cast<Eigen::Index>(sizes[sizes.size() - 2]);
  if (static_cast<Eigen::Index>(coarse.size()) != nc)
    throw PreconditionError("harmonic_extension: values must be given on V_m (" + std::to_string(nc) + " vertices)");
  const auto n = static_cast<Eigen::Index>(fine.num_vertices());
  const Eigen::Index ni = n - nc;

  std::vector<double> out(coarse.begin(), coarse.end());
  out.resize(static_cast<std::size_t>(n), 0.0);
  if (ni == 0) return out;

  const Eigen::SparseMatrix<double> Hii = fine.H.bottomRightCorner(ni, ni);
  const Eigen::SparseMatrix<double> Hib = fine.H.bottomLeftCorner(ni, nc);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hii);
  if (ldlt.info() != Eigen::Success) throw SolveError("harmonic_extension: interior factorisation failed");
  const Eigen::VectorXd rhs = -(Hib * as_vector(coarse));
  const Eigen::VectorXd x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) throw SolveError("harmonic_extension: interior solve failed");
  for (Eigen::Index k = 0; k < ni; ++k) out[static_cast<std::size_t>(nc + k)] = x(k);
  return out;
}

std::vector<double> harmonic_extension(const SelfSimilarStructure& s, const HarmonicStructure& hs, int m,
                                       std::span<const double> u) {
  return harmonic_extension(assemble_energy(s, hs, m + 1), u);
}

std::vector<Eigen::MatrixXd> extension_matrices(const SelfSimilarStructure& s, const HarmonicStructure& hs) {
  const EnergyForm level1 = assemble_energy(s, hs, 1);
  const Eigen::MatrixXd response = level1_interior_response(level1);
  Eigen::MatrixXd values(level1.num_vertices(), s.n0);
  values.topRows(s.n0).setIdentity();
  values.bottomRows(response.rows()) = response;

  std::vector<Eigen::MatrixXd> A(static_cast<std::size_t>(s.N), Eigen::MatrixXd(s.n0, s.n0));
  for (int i = 0; i < s.N; ++i) {
    const auto c = level1.complex.cell(i);
    for (int q = 0; q < s.n0; ++q) A[i].row(q) = values.row(c[q]);
  }
  return A;
}

std::vector<double> harmonic_lift(std::span<const Eigen::MatrixXd> A, const LevelComplex& from,
                                  std::span<const double> u, const LevelComplex& to) {
  if (to.N != from.N || to.n0 != from.n0 || to.level < from.level)
    throw PreconditionError("harmonic_lift: target must be a deeper level of the same structure");
  if (u.size() != from.num_vertices()) throw PreconditionError("harmonic_lift: function size does not match source level");
  if (static_cast<int>(A.size()) != to.N) throw PreconditionError("harmonic_lift: need one extension matrix per cell");

  const int depth = to.level - from.level;
  const std::int64_t block = word_count(to.N, depth);
  std::vector<double> out(to.num_vertices(), 0.0);
  Eigen::VectorXd b(to.n0);
  for (std::int64_t w = 0; w < to.num_cells(); ++w) {
    const auto src = from.cell(w / block);
    for (int p = 0; p < to.n0; ++p) b(p) = u[src[p]];
    std::int64_t div = block;
    for (int j = 0; j < depth; ++j) {
      div /= to.N;
      b = A[static_cast<std::size_t>((w / div) % to.N)] * b;
    }
    const auto dst = to.cell(w);
    for (int p = 0; p < to.n0; ++p) out[dst[p]] = b(p);
  }
  return out;
}

}  // namespace pcf
