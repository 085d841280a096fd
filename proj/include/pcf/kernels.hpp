#pragma once

#include <span>

#include <Eigen/Dense>

#include "pcf/harmonic.hpp"

// Data-parallel inner loops. Each kernel has a plain serial reference and an
// OpenMP variant; the OpenMP reductions sum fixed-size chunks in index order so
// their result does not depend on the thread count.
namespace pcf::kernels {

inline constexpr std::ptrdiff_t kChunk = 1024;

namespace serial {

/// out(x) = sum_k w(k) * A(x, k)^2
Eigen::VectorXd spectral_diagonal(const Eigen::MatrixXd& A, const Eigen::VectorXd& w);

/// C(i, j) = F(i, j) * (abar(j) - abar(i)), i.e. [F, diag(abar)].
Eigen::MatrixXd commutator_matrix(const Eigen::MatrixXd& F, const Eigen::VectorXd& abar);

/// sup_x t^{scale} p(t, x, x) for each t in `times`, where p is the spectral heat kernel.
Eigen::VectorXd heat_sup_sweep(const Eigen::MatrixXd& A, const Eigen::VectorXd& lambda, std::span<const double> times,
                               double scale);

/// sum_e c_e (u(head) - u(tail))^2
double edge_energy(std::span<const Edge> edges, std::span<const double> u);

/// sum_e c_e bbar(e) (a(head) - a(tail))^2
double edge_measure(std::span<const Edge> edges, std::span<const double> a, std::span<const double> b);

}  // namespace serial

namespace omp {

Eigen::VectorXd spectral_diagonal(const Eigen::MatrixXd& A, const Eigen::VectorXd& w);
Eigen::MatrixXd commutator_matrix(const Eigen::MatrixXd& F, const Eigen::VectorXd& abar);
Eigen::VectorXd heat_sup_sweep(const Eigen::MatrixXd& A, const Eigen::VectorXd& lambda, std::span<const double> times,
                               double scale);
double edge_energy(std::span<const Edge> edges, std::span<const double> u);
double edge_measure(std::span<const Edge> edges, std::span<const double> a, std::span<const double> b);

}  // namespace omp

}  // namespace pcf::kernels
