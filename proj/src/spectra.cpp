#include "pcf/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "pcf/error.hpp"
#include "pcf/kernels.hpp"

namespace pcf {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(8);
  os << x;
  return os.str();
}

// Root of sum_i w_i^d = 1 for weights in (0, 1): bisection then Newton.
double similarity_root(std::span<const double> w) {
  auto f = [&](double d) {
    double s = -1.0;
    for (double x : w) s += std::pow(x, d);
    return s;
  };
  auto df = [&](double d) {
    double s = 0.0;
    for (double x : w) s += std::pow(x, d) * std::log(x);
    return s;
  };
  double lo = 1e-12;
  double hi = 2.0;
  while (f(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  double d = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    const double step = f(d) / df(d);
    d -= step;
    if (std::abs(step) <= 1e-16 * d) break;
  }
  return d;
}

// Clusters of numerically equal eigenvalues as [begin, end) index ranges.
std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters(const Eigen::VectorXd& lam, Eigen::Index first) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index k = first;
  while (k < lam.size()) {
    Eigen::Index e = k + 1;
    while (e < lam.size() && lam(e) - lam(k) <= 1e-8 * lam(e)) ++e;
    out.emplace_back(k, e);
    k = e;
  }
  return out;
}

Eigen::Index first_positive(const SpectralData& sd) {
  Eigen::Index k = 0;
  while (k < sd.size() && sd.eigenvalues(k) <= 0.0) ++k;
  if (k == sd.size()) throw PreconditionError("spectrum has no positive eigenvalue");
  return k;
}

struct Window {
  double lo;
  double hi;
  double centre;
};

Window middle_decade(const SpectralData& sd) {
  const double l1 = sd.eigenvalues(first_positive(sd));
  const double lmax = sd.eigenvalues(sd.size() - 1);
  const double c = std::sqrt(l1 * lmax);
  return {c / std::sqrt(10.0), c * std::sqrt(10.0), c};
}

void require_dirichlet(const SpectralData& sd, const char* what) {
  if (sd.bc != BoundaryCondition::Dirichlet) throw PreconditionError(std::string(what) + " needs Dirichlet spectral data");
}

}  // namespace

void validate(const MeasureWeights& mw, const SelfSimilarStructure& s, const HarmonicStructure& hs) {
  if (static_cast<int>(mw.mu.size()) != s.N) throw ValidationError("mu must have N = " + std::to_string(s.N) + " entries");
  double total = 0.0;
  for (int i = 0; i < s.N; ++i) {
    if (!(mw.mu[i] > 0.0)) throw ValidationError("mu_" + std::to_string(i + 1) + " = " + fmt(mw.mu[i]) + " is not positive");
    if (!(mw.mu[i] * hs.r[i] < 1.0))
      throw ValidationError("mu_" + std::to_string(i + 1) + " r_" + std::to_string(i + 1) + " = " +
                            fmt(mw.mu[i] * hs.r[i]) + " >= 1");
    total += mw.mu[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("mu sums to " + fmt(total) + " != 1");
}

MeasureWeights parse_measure(const nlohmann::json& block, const SelfSimilarStructure& s, const HarmonicStructure& hs) {
  MeasureWeights mw;
  try {
    mw.mu = block.at("mu").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed measure block: ") + e.what());
  }
  validate(mw, s, hs);
  return mw;
}

nlohmann::json SpectralExponent::to_json() const {
  return {{"d_S", d_S}, {"gamma", gamma}, {"lattice", lattice}, {"residual", residual}};
}

SpectralExponent solve_spectral_exponent(const HarmonicStructure& hs, const MeasureWeights& mw) {
  if (hs.r.size() != mw.mu.size()) throw PreconditionError("r and mu must have the same length");
  SpectralExponent se;
  for (std::size_t i = 0; i < hs.r.size(); ++i) {
    const double g = std::sqrt(hs.r[i] * mw.mu[i]);
    if (!(g > 0.0 && g < 1.0))
      throw PreconditionError("gamma_" + std::to_string(i + 1) + " = " + fmt(g) + " outside (0, 1)");
    se.gamma.push_back(g);
  }
  se.d_S = similarity_root(se.gamma);
  double s = -1.0;
  for (double g : se.gamma) s += std::pow(g, se.d_S);
  se.residual = std::abs(s);
  se.lattice = is_lattice(se.gamma);
  return se;
}

bool is_lattice(std::span<const double> gamma, int max_den, double tol) {
  if (gamma.empty()) return true;
  const double base = std::log(gamma[0]);
  for (double g : gamma) {
    const double ratio = std::log(g) / base;
    bool rational = false;
    for (int q = 1; q <= max_den && !rational; ++q) rational = std::abs(ratio - std::round(ratio * q) / q) <= tol;
    if (!rational) return false;
  }
  return true;
}

std::vector<double> kl_weights(const SpectralExponent& se) {
  std::vector<double> nu;
  for (double g : se.gamma) nu.push_back(std::pow(g, se.d_S));
  return nu;
}

double resistance_dimension(std::span<const double> r) {
  for (double x : r)
    if (!(x > 0.0 && x < 1.0)) throw PreconditionError("resistance weights must lie in (0, 1)");
  return similarity_root(r);
}

std::vector<double> tent_integrals(std::span<const Eigen::MatrixXd> A, const MeasureWeights& mw) {
  if (A.size() != mw.mu.size()) throw PreconditionError("tent_integrals: one extension matrix per weight");
  const Eigen::Index n0 = A[0].rows();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n0, n0);
  for (std::size_t i = 0; i < A.size(); ++i) M += mw.mu[i] * A[i].transpose();
  const Eigen::MatrixXd L = M - Eigen::MatrixXd::Identity(n0, n0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (n0 >= 2 && sv(n0 - 2) <= 1e-10) throw SolveError("tent integrals: fixed point is not unique");
  Eigen::VectorXd v = svd.matrixV().col(n0 - 1);
  v /= v.sum();
  if ((v.array() <= 0.0).any() || !v.allFinite()) throw SolveError("tent integrals: fixed point is not positive");
  return {v.data(), v.data() + v.size()};
}

std::vector<double> tent_integrals(const SelfSimilarStructure& s, const HarmonicStructure& hs, const MeasureWeights& mw) {
  return tent_integrals(extension_matrices(s, hs), mw);
}

std::vector<double> mass_vector(const LevelComplex& lc, const MeasureWeights& mw, std::span<const double> tents) {
  std::vector<double> cell_mass = {1.0};
  for (int level = 0; level < lc.level; ++level) {
    std::vector<double> next(cell_mass.size() * lc.N);
    for (std::size_t w = 0; w < cell_mass.size(); ++w)
      for (int i = 0; i < lc.N; ++i) next[w * lc.N + i] = cell_mass[w] * mw.mu[i];
    cell_mass = std::move(next);
  }
  std::vector<double> m(lc.num_vertices(), 0.0);
  for (std::int64_t w = 0; w < lc.num_cells(); ++w) {
    const auto c = lc.cell(w);
    for (int q = 0; q < lc.n0; ++q) m[c[q]] += cell_mass[w] * tents[q];
  }
  return m;
}

std::vector<double> mass_vector(const SelfSimilarStructure& s, const HarmonicStructure& hs, const MeasureWeights& mw,
                                int m) {
  return mass_vector(build_level(s, m), mw, tent_integrals(s, hs, mw));
}

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann"; }

BoundaryCondition parse_boundary_condition(const std::string& text) {
  if (text == "dirichlet") return BoundaryCondition::Dirichlet;
  if (text == "neumann") return BoundaryCondition::Neumann;
  throw InputError("boundary condition must be 'dirichlet' or 'neumann', got '" + text + "'");
}

SpectralData eigensolve(const EnergyForm& ef, std::span<const double> mass, BoundaryCondition bc) {
  const auto n = static_cast<Eigen::Index>(ef.num_vertices());
  if (static_cast<Eigen::Index>(mass.size()) != n) throw PreconditionError("eigensolve: mass size does not match the complex");
  for (double x : mass)
    if (!(x > 0.0)) throw PreconditionError("eigensolve: mass must be strictly positive");

  const Eigen::Index off = bc == BoundaryCondition::Dirichlet ? ef.complex.n0 : 0;
  const Eigen::Index k = n - off;
  if (k > kDenseEigenLimit)
    throw PreconditionError("eigensolve: " + std::to_string(k) + " unknowns exceed the dense limit of " +
                            std::to_string(kDenseEigenLimit));

  SpectralData sd;
  sd.bc = bc;
  sd.level = ef.level();
  sd.mass = Eigen::Map<const Eigen::VectorXd>(mass.data(), n);
  sd.eigenvectors = Eigen::MatrixXd::Zero(n, k);
  if (k == 0) {
    sd.eigenvalues.resize(0);
    return sd;
  }

  const Eigen::VectorXd isq = sd.mass.tail(k).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd Hk = Eigen::MatrixXd(ef.H).bottomRightCorner(k, k);
  const Eigen::MatrixXd S = isq.asDiagonal() * Hk * isq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw SolveError("eigensolver did not converge at level " + std::to_string(sd.level) + " (size " +
                     std::to_string(k) + ")");

  sd.eigenvalues = es.eigenvalues();
  const double snap = 1e-12 * std::abs(sd.eigenvalues(k - 1));
  for (Eigen::Index j = 0; j < k; ++j)
    if (std::abs(sd.eigenvalues(j)) <= snap) sd.eigenvalues(j) = 0.0;

  Eigen::MatrixXd V = isq.asDiagonal() * es.eigenvectors();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double peak = V.col(j).cwiseAbs().maxCoeff();
    Eigen::Index i = 0;
    while (std::abs(V(i, j)) < 1e-8 * peak) ++i;
    if (V(i, j) < 0.0) V.col(j) *= -1.0;
  }
  sd.eigenvectors.bottomRows(k) = V;
  return sd;
}

EigenResiduals eigen_residuals(const EnergyForm& ef, const SpectralData& sd) {
  EigenResiduals out;
  const Eigen::Index k = sd.size();
  if (k == 0) return out;
  const Eigen::MatrixXd& A = sd.eigenvectors;
  const Eigen::MatrixXd G = A.transpose() * sd.mass.asDiagonal() * A;
  out.orthonormality = (G - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd HA = ef.H * A;
  double hnorm = 0.0;
  for (Eigen::Index c = 0; c < ef.H.outerSize(); ++c) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(ef.H, c); it; ++it) col += std::abs(it.value());
    hnorm = std::max(hnorm, col);
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::VectorXd r =
        (HA.col(j) - sd.eigenvalues(j) * sd.mass.cwiseProduct(A.col(j))).tail(k);
    out.residual = std::max(out.residual, r.cwiseAbs().maxCoeff() / (hnorm * A.col(j).cwiseAbs().maxCoeff()));
  }
  return out;
}

std::size_t counting_function(const SpectralData& sd, double x) {
  if (x < 0.0) return 0;
  const auto* b = sd.eigenvalues.data();
  return static_cast<std::size_t>(std::upper_bound(b, b + sd.size(), x) - b);
}

nlohmann::json WeylFit::to_json() const {
  return {{"slope", slope},
          {"intercept", intercept},
          {"target", target},
          {"tol", tol},
          {"ratio_band", {ratio_min, ratio_max}},
          {"window", {window_lo, window_hi}},
          {"points", points},
          {"pass", pass}};
}

WeylFit weyl_fit(const SpectralData& sd, const SpectralExponent& se, double tol) {
  if (sd.size() < 50)
    throw PreconditionError("weyl_fit needs at least 50 eigenvalues, got " + std::to_string(sd.size()));
  WeylFit fit;
  fit.target = 0.5 * se.d_S;
  fit.tol = tol;
  const Window win = middle_decade(sd);
  fit.window_lo = win.lo;
  fit.window_hi = win.hi;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  fit.ratio_min = std::numeric_limits<double>::infinity();
  fit.ratio_max = 0.0;
  for (const auto& [b, e] : clusters(sd.eigenvalues, first_positive(sd))) {
    const double x = sd.eigenvalues(b);
    if (x < win.lo || x > win.hi) continue;
    const double lx = std::log(x);
    const double ly = std::log(static_cast<double>(e));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.points;
    const double scale = std::pow(x, fit.target);
    fit.ratio_min = std::min(fit.ratio_min, static_cast<double>(b) / scale);
    fit.ratio_max = std::max(fit.ratio_max, static_cast<double>(e) / scale);
  }
  if (fit.points < 2) throw PreconditionError("weyl_fit: fewer than two distinct eigenvalues in the middle decade");
  const double n = static_cast<double>(fit.points);
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.pass = std::abs(fit.slope - fit.target) <= tol && fit.ratio_min > 0.0 && std::isfinite(fit.ratio_max) &&
             fit.ratio_max <= kWeylMaxBandRatio * fit.ratio_min;
  return fit;
}

Eigen::VectorXd green_diagonal(const SpectralData& sd) {
  require_dirichlet(sd, "green_diagonal");
  return kernels::omp::spectral_diagonal(sd.eigenvectors, sd.eigenvalues.cwiseInverse());
}

double heat_kernel(const SpectralData& sd, double t, Eigen::Index x, Eigen::Index y) {
  if (!(t > 0.0)) throw PreconditionError("heat_kernel needs t > 0");
  double s = 0.0;
  for (Eigen::Index k = 0; k < sd.size(); ++k)
    s += std::exp(-sd.eigenvalues(k) * t) * sd.eigenvectors(x, k) * sd.eigenvectors(y, k);
  return s;
}

Eigen::VectorXd heat_diagonal(const SpectralData& sd, double t) {
  if (!(t > 0.0)) throw PreconditionError("heat_diagonal needs t > 0");
  return kernels::omp::spectral_diagonal(sd.eigenvectors, (-t * sd.eigenvalues.array()).exp().matrix());
}

nlohmann::json C1Estimate::to_json() const {
  return {{"c1", c1}, {"c1_unit_time", c1_unit_time}, {"t_argmax", t_argmax}, {"t_min", t_min}};
}

C1Estimate c1_estimate(const SpectralData& sd, double d_S) {
  require_dirichlet(sd, "c1_estimate");
  C1Estimate est;
  const double lmax = sd.eigenvalues(sd.size() - 1);
  est.t_min = std::min(1.0, 1.0 / lmax);
  est.c1_unit_time = heat_diagonal(sd, 1.0).maxCoeff();

  constexpr int kGrid = 257;
  const double a = std::log(est.t_min);
  std::vector<double> times(kGrid);
  for (int i = 0; i < kGrid; ++i) times[i] = std::exp(a * (1.0 - static_cast<double>(i) / (kGrid - 1)));
  const Eigen::VectorXd sweep = kernels::omp::heat_sup_sweep(sd.eigenvectors, sd.eigenvalues, times, 0.5 * d_S);

  Eigen::Index best = 0;
  sweep.maxCoeff(&best);
  double value = sweep(best);
  double arg = times[best];
  // Golden-section refinement in ln t between the neighbouring grid points.
  double lo = std::log(times[std::max<Eigen::Index>(best - 1, 0)]);
  double hi = std::log(times[std::min<Eigen::Index>(best + 1, kGrid - 1)]);
  auto g = [&](double lt) {
    const double t = std::exp(lt);
    return std::pow(t, 0.5 * d_S) * heat_diagonal(sd, t).maxCoeff();
  };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 40; ++it) {
    if (g1 >= g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = g(x2);
    }
  }
  for (auto [x, v] : {std::pair{x1, g1}, std::pair{x2, g2}}) {
    if (v > value) {
      value = v;
      arg = std::exp(x);
    }
  }
  est.c1 = std::max(value, est.c1_unit_time);
  est.t_argmax = est.c1_unit_time > value ? 1.0 : arg;
  return est;
}

nlohmann::json HeatBoundReport::to_json() const {
  return {{"pass", pass}, {"worst_small_t", worst_small_t}, {"worst_large_t", worst_large_t}};
}

HeatBoundReport heat_bound_check(const SpectralData& sd, double d_S, const C1Estimate& c1) {
  require_dirichlet(sd, "heat_bound_check");
  HeatBoundReport rep;
  constexpr int kSmall = 97;
  constexpr int kLarge = 37;
  const double a = std::log(c1.t_min);
  std::vector<double> small(kSmall), large(kLarge);
  for (int i = 0; i < kSmall; ++i) small[i] = std::exp(a * (1.0 - static_cast<double>(i) / (kSmall - 1)));
  for (int i = 0; i < kLarge; ++i) large[i] = 1.0 + 9.0 * i / (kLarge - 1);
  const Eigen::VectorXd s = kernels::omp::heat_sup_sweep(sd.eigenvectors, sd.eigenvalues, small, 0.5 * d_S);
  rep.worst_small_t = s.maxCoeff() / c1.c1;
  const Eigen::VectorXd l = kernels::omp::heat_sup_sweep(sd.eigenvectors, sd.eigenvalues, large, 0.0);
  const double l1 = sd.eigenvalues(0);
  for (int i = 0; i < kLarge; ++i)
    rep.worst_large_t = std::max(rep.worst_large_t, l(i) / (c1.c1 * std::exp(-(large[i] - 1.0) * l1)));
  rep.pass = rep.worst_small_t <= 1.0 + 1e-9 && rep.worst_large_t <= 1.0 + 1e-9;
  return rep;
}

nlohmann::json PotentialReport::to_json() const {
  return {{"p", p}, {"max_diagonal", max_diagonal}, {"rhs", rhs}, {"pass", pass}};
}

PotentialReport potential_kernel(const SpectralData& sd, double p, double d_S, double c1) {
  require_dirichlet(sd, "potential_kernel");
  if (!(p > d_S && p <= 2.0)) throw PreconditionError("potential_kernel needs d_S < p <= 2, got p = " + fmt(p));
  PotentialReport rep;
  rep.p = p;
  const Eigen::VectorXd w = std::tgamma(0.5 * p) * sd.eigenvalues.array().pow(-0.5 * p).matrix();
  rep.diagonal = kernels::omp::spectral_diagonal(sd.eigenvectors, w);
  rep.max_diagonal = rep.diagonal.maxCoeff();
  rep.rhs = c1 * (1.0 / sd.eigenvalues(0) + 2.0 / (p - d_S));
  rep.pass = rep.max_diagonal <= rep.rhs;
  return rep;
}

nlohmann::json SpectralVolume::to_json() const {
  return {{"estimate", estimate}, {"band", band}, {"cutoff", cutoff}, {"ratio_mean", ratio_mean}};
}

SpectralVolume spectral_volume_estimate(const SpectralData& sd, const SpectralExponent& se) {
  if (se.lattice)
    throw PreconditionError(
        "spectral volume needs the non-lattice case: the ln gamma_i are commensurable, so rho(x) / x^{d_S/2} "
        "oscillates and has no limit");
  require_dirichlet(sd, "spectral_volume_estimate");
  const Window win = middle_decade(sd);
  const double d = se.d_S;
  const auto nu = kl_weights(se);
  double entropy = 0.0;
  for (double v : nu) entropy -= v * std::log(v);

  auto rho = [&](double x) { return static_cast<double>(counting_function(sd, x)); };
  auto integral = [&](double cutoff) {
    const double tmax = 0.5 * std::log(cutoff);
    std::vector<double> jumps;
    for (Eigen::Index k = 0; k < sd.size(); ++k) {
      const double lam = sd.eigenvalues(k);
      jumps.push_back(0.5 * std::log(lam));
      for (double g : se.gamma) jumps.push_back(0.5 * std::log(lam / (g * g)));
    }
    std::sort(jumps.begin(), jumps.end());
    std::vector<double> pts;
    for (double t : jumps)
      if (t > 0.0 && t < tmax) pts.push_back(t);
    pts.push_back(tmax);
    // R is piecewise constant between jumps, so each piece integrates exactly.
    double total = 0.0, prev = 0.0;
    for (double t : pts) {
      if (t <= prev) continue;
      const double x = std::exp(prev + t);
      double R = rho(x);
      for (double g : se.gamma) R -= rho(g * g * x);
      total += R * (std::exp(-d * prev) - std::exp(-d * t)) / d;
      prev = t;
    }
    return d * total / entropy;
  };

  SpectralVolume vol;
  vol.cutoff = win.hi;
  vol.estimate = integral(win.hi);
  vol.band = std::abs(vol.estimate - integral(win.hi / 4.0));
  double sum = 0.0;
  int count = 0;
  for (const auto& [b, e] : clusters(sd.eigenvalues, first_positive(sd))) {
    const double x = sd.eigenvalues(b);
    if (x < win.lo || x > win.hi) continue;
    sum += static_cast<double>(e) / std::pow(x, 0.5 * d);
    ++count;
  }
  vol.ratio_mean = count > 0 ? sum / count : 0.0;
  return vol;
}

}  // namespace pcf
