#include <cmath>

#include "pcf/kernels.hpp"

namespace pcf::kernels::serial {

Eigen::VectorXd spectral_diagonal(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(A.rows());
  for (Eigen::Index x = 0; x < A.rows(); ++x) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < A.cols(); ++k) s += w(k) * A(x, k) * A(x, k);
    out(x) = s;
  }
  return out;
}

Eigen::MatrixXd commutator_matrix(const Eigen::MatrixXd& F, const Eigen::VectorXd& abar) {
  Eigen::MatrixXd C(F.rows(), F.cols());
  for (Eigen::Index j = 0; j < F.cols(); ++j)
    for (Eigen::Index i = 0; i < F.rows(); ++i) C(i, j) = F(i, j) * (abar(j) - abar(i));
  return C;
}

Eigen::VectorXd heat_sup_sweep(const Eigen::MatrixXd& A, const Eigen::VectorXd& lambda, std::span<const double> times,
                               double scale) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Eigen::VectorXd w = (-t * lambda.array()).exp().matrix();
    out(static_cast<Eigen::Index>(i)) = std::pow(t, scale) * spectral_diagonal(A, w).maxCoeff();
  }
  return out;
}

double edge_energy(std::span<const Edge> edges, std::span<const double> u) {
  double s = 0.0;
  for (const auto& e : edges) {
    const double d = u[e.head] - u[e.tail];
    s += e.conductance * d * d;
  }
  return s;
}

double edge_measure(std::span<const Edge> edges, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (const auto& e : edges) {
    const double d = a[e.head] - a[e.tail];
    s += e.conductance * 0.5 * (b[e.head] + b[e.tail]) * d * d;
  }
  return s;
}

}  // namespace pcf::kernels::serial
