#include <cmath>
#include <vector>

#include <omp.h>

#include "pcf/kernels.hpp"

namespace pcf::kernels::omp {

namespace {

// Per-chunk partial sums added in chunk order.
template <class Term>
double chunked_sum(std::ptrdiff_t n, Term term) {
  const std::ptrdiff_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::ptrdiff_t end = std::min(n, (c + 1) * kChunk);
    double s = 0.0;
    for (std::ptrdiff_t i = c * kChunk; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

Eigen::VectorXd spectral_diagonal(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  Eigen::VectorXd out(A.rows());
  const Eigen::Index rows = A.rows();
  const Eigen::Index cols = A.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index x = 0; x < rows; ++x) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < cols; ++k) s += w(k) * A(x, k) * A(x, k);
    out(x) = s;
  }
  return out;
}

Eigen::MatrixXd commutator_matrix(const Eigen::MatrixXd& F, const Eigen::VectorXd& abar) {
  Eigen::MatrixXd C(F.rows(), F.cols());
  const Eigen::Index rows = F.rows();
  const Eigen::Index cols = F.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) C(i, j) = F(i, j) * (abar(j) - abar(i));
  return C;
}

Eigen::VectorXd heat_sup_sweep(const Eigen::MatrixXd& A, const Eigen::VectorXd& lambda, std::span<const double> times,
                               double scale) {
  const auto nt = static_cast<std::ptrdiff_t>(times.size());
  Eigen::VectorXd out(nt);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < nt; ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    const Eigen::VectorXd w = (-t * lambda.array()).exp().matrix();
    double best = 0.0;
    for (Eigen::Index x = 0; x < A.rows(); ++x) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < A.cols(); ++k) s += w(k) * A(x, k) * A(x, k);
      best = std::max(best, s);
    }
    out(i) = std::pow(t, scale) * best;
  }
  return out;
}

double edge_energy(std::span<const Edge> edges, std::span<const double> u) {
  return chunked_sum(static_cast<std::ptrdiff_t>(edges.size()), [&](std::ptrdiff_t i) {
    const auto& e = edges[static_cast<std::size_t>(i)];
    const double d = u[e.head] - u[e.tail];
    return e.conductance * d * d;
  });
}

double edge_measure(std::span<const Edge> edges, std::span<const double> a, std::span<const double> b) {
  return chunked_sum(static_cast<std::ptrdiff_t>(edges.size()), [&](std::ptrdiff_t i) {
    const auto& e = edges[static_cast<std::size_t>(i)];
    const double d = a[e.head] - a[e.tail];
    return e.conductance * 0.5 * (b[e.head] + b[e.tail]) * d * d;
  });
}

}  // namespace pcf::kernels::omp
