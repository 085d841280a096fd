#include <doctest.h>

#include <omp.h>

#include "pcf/kernels.hpp"
#include "support.hpp"

namespace kn = pcf::kernels;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  const auto v = testing::random_vector(rng, static_cast<std::size_t>(r * c));
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), r, c);
}

std::vector<pcf::Edge> random_edges(std::mt19937_64& rng, int nv, int ne) {
  std::uniform_int_distribution<int> pick(0, nv - 1);
  std::uniform_real_distribution<double> cond(0.1, 3.0);
  std::vector<pcf::Edge> edges(ne);
  for (auto& e : edges) {
    e.tail = pick(rng);
    e.head = pick(rng);
    e.conductance = cond(rng);
  }
  return edges;
}

// Sizes straddle the chunk length so partial chunks are exercised.
constexpr int kSizes[] = {1, 7, 1023, 1024, 1025, 5000};

}  // namespace

TEST_CASE("spectral_diagonal: OpenMP matches serial") {
  std::mt19937_64 rng(31);
  for (int n : {1, 9, 300}) {
    const Eigen::MatrixXd A = random_matrix(rng, n, n + 3);
    const Eigen::VectorXd w = testing::vec(testing::random_vector(rng, n + 3, 0.0, 2.0));
    const Eigen::VectorXd s = kn::serial::spectral_diagonal(A, w);
    const Eigen::VectorXd o = kn::omp::spectral_diagonal(A, w);
    CHECK((s - o).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd oracle = (A.array().square().matrix() * w);
    CHECK((s - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("commutator_matrix: OpenMP matches serial and the explicit product") {
  std::mt19937_64 rng(32);
  const Eigen::MatrixXd F = random_matrix(rng, 120, 120);
  const Eigen::VectorXd abar = testing::vec(testing::random_vector(rng, 120));
  const Eigen::MatrixXd s = kn::serial::commutator_matrix(F, abar);
  CHECK((s - kn::omp::commutator_matrix(F, abar)).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd oracle = F * abar.asDiagonal() - abar.asDiagonal() * F;
  CHECK((s - oracle).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("heat_sup_sweep: OpenMP matches serial") {
  std::mt19937_64 rng(33);
  const Eigen::MatrixXd A = random_matrix(rng, 200, 50);
  const Eigen::VectorXd lambda = testing::vec(testing::random_vector(rng, 50, 1.0, 500.0));
  const std::vector<double> times = {1e-3, 1e-2, 0.1, 1.0, 3.0};
  const Eigen::VectorXd s = kn::serial::heat_sup_sweep(A, lambda, times, 0.68);
  const Eigen::VectorXd o = kn::omp::heat_sup_sweep(A, lambda, times, 0.68);
  CHECK((s - o).cwiseAbs().maxCoeff() <= 1e-14 * s.cwiseAbs().maxCoeff());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const Eigen::VectorXd w = (-times[j] * lambda.array()).exp();
    const double oracle = std::pow(times[j], 0.68) * (A.array().square().matrix() * w).maxCoeff();
    CHECK(testing::rel_diff(s(static_cast<Eigen::Index>(j)), oracle) < 1e-12);
  }
}

TEST_CASE("edge sums: OpenMP matches serial, independent of thread count") {
  std::mt19937_64 rng(34);
  for (int ne : kSizes) {
    const auto edges = random_edges(rng, 200, ne);
    const auto u = testing::random_vector(rng, 200);
    const auto b = testing::random_vector(rng, 200, 0.0, 1.0);
    const double se = kn::serial::edge_energy(edges, u);
    const double sm = kn::serial::edge_measure(edges, u, b);
    double oracle = 0.0;
    for (const auto& e : edges) oracle += e.conductance * (u[e.head] - u[e.tail]) * (u[e.head] - u[e.tail]);
    CHECK(testing::rel_diff(se, oracle) < 1e-12);
    const int saved = omp_get_max_threads();
    double first_e = 0.0, first_m = 0.0;
    for (int threads : {1, 2, 3, 8}) {
      omp_set_num_threads(threads);
      const double oe = kn::omp::edge_energy(edges, u);
      const double om = kn::omp::edge_measure(edges, u, b);
      CHECK(testing::rel_diff(oe, se) < 1e-12);
      CHECK(testing::rel_diff(om, sm) < 1e-12);
      if (threads == 1) {
        first_e = oe;
        first_m = om;
      }
      CHECK(oe == first_e);
      CHECK(om == first_m);
    }
    omp_set_num_threads(saved);
  }
}
