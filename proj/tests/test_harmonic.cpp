#include <doctest.h>

#include <set>

#include <Eigen/LU>

#include "pcf/error.hpp"
#include "pcf/harmonic.hpp"
#include "support.hpp"

namespace {

// Schur complement through an explicit dense inverse.
Eigen::MatrixXd dense_schur(const Eigen::MatrixXd& H, int nb) {
  const Eigen::Index ni = H.rows() - nb;
  const Eigen::MatrixXd inv = H.bottomRightCorner(ni, ni).fullPivLu().inverse();
  return H.topLeftCorner(nb, nb) - H.topRightCorner(nb, ni) * inv * H.bottomLeftCorner(ni, nb);
}

pcf::HarmonicStructure gasket_with_r(double r) {
  auto hs = testing::preset("gasket").require_harmonic();
  hs.r = {r, r, r};
  return hs;
}

}  // namespace

TEST_CASE("level-1 assembly: interval chain and gasket conductances") {
  const auto iv = testing::preset("interval");
  const auto ef = pcf::assemble_energy(iv.structure, iv.require_harmonic(), 1);
  Eigen::MatrixXd expected(3, 3);
  expected << 2, 0, -2, 0, 2, -2, -2, -2, 4;
  CHECK((Eigen::MatrixXd(ef.H) - expected).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(ef.edges.size() == 2);
  for (const auto& e : ef.edges) CHECK(e.conductance == doctest::Approx(2.0));

  const auto g = testing::preset("gasket");
  const auto eg = pcf::assemble_energy(g.structure, g.require_harmonic(), 1);
  CHECK(eg.num_vertices() == 6);
  REQUIRE(eg.edges.size() == 9);
  for (const auto& e : eg.edges) CHECK(e.conductance == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("level 0 form is D") {
  for (const char* name : {"interval", "gasket"}) {
    const auto d = testing::preset(name);
    const auto ef = pcf::assemble_energy(d.structure, d.require_harmonic(), 0);
    CHECK((Eigen::MatrixXd(ef.H) - d.require_harmonic().D).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("edge list: positive conductances, no loops, no duplicates, E = sum c (du)^2") {
  std::mt19937_64 rng(11);
  for (const char* name : {"interval", "gasket"}) {
    const auto d = testing::preset(name);
    for (int m = 0; m <= 4; ++m) {
      const auto ef = pcf::assemble_energy(d.structure, d.require_harmonic(), m);
      std::set<std::pair<int, int>> seen;
      for (const auto& e : ef.edges) {
        CHECK(e.conductance > 0.0);
        CHECK(e.tail < e.head);
        CHECK(seen.insert({e.tail, e.head}).second);
      }
      const auto u = testing::random_vector(rng, ef.num_vertices());
      double sum = 0.0;
      for (const auto& e : ef.edges) sum += e.conductance * (u[e.head] - u[e.tail]) * (u[e.head] - u[e.tail]);
      CHECK(testing::rel_diff(sum, ef.energy(u)) < 1e-12);
    }
  }
}

TEST_CASE("H is positive semidefinite with kernel the constants") {
  const auto d = testing::preset("gasket");
  const auto ef = pcf::assemble_energy(d.structure, d.require_harmonic(), 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(ef.H)};
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-10);
  CHECK(es.eigenvalues()(1) > 1e-6);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ef.num_vertices());
  CHECK((ef.H * ones).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("verify_harmonic against the dense Schur oracle") {
  const auto iv = testing::preset("interval");
  const auto ri = pcf::verify_harmonic(iv.structure, iv.require_harmonic());
  CHECK(ri.pass);
  CHECK(ri.deviation <= 1e-12);

  const auto g = testing::preset("gasket");
  const auto rg = pcf::verify_harmonic(g.structure, g.require_harmonic());
  CHECK(rg.pass);
  CHECK(rg.deviation <= 1e-12);

  const auto half = gasket_with_r(0.5);
  const auto rh = pcf::verify_harmonic(g.structure, half);
  CHECK_FALSE(rh.pass);
  CHECK(rh.deviation > 0.05);
  const auto H1 = Eigen::MatrixXd(pcf::assemble_energy(g.structure, half, 1).H);
  const Eigen::MatrixXd oracle = dense_schur(H1, 3);
  CHECK((oracle - rh.schur).cwiseAbs().maxCoeff() < 1e-12);
  // The gasket Schur complement scales as (3/5) / r times D.
  CHECK(rh.deviation == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("invalid harmonic structures name the failing condition") {
  const auto s = testing::preset("gasket").structure;
  auto hs = testing::preset("gasket").require_harmonic();
  auto bad = hs;
  bad.D(0, 1) = -0.5;
  CHECK_THROWS_WITH_AS(pcf::validate(bad, s), doctest::Contains("symmetric"), pcf::ValidationError);
  bad = hs;
  bad.D(0, 1) = bad.D(1, 0) = 0.5;
  bad.D(0, 0) = bad.D(1, 1) = 0.5;
  bad.D(0, 2) = bad.D(2, 0) = -1.0;
  CHECK_THROWS_WITH_AS(pcf::validate(bad, s), doctest::Contains("off-diagonal"), pcf::ValidationError);
  bad = hs;
  bad.D(0, 0) = 3.0;
  CHECK_THROWS_WITH_AS(pcf::validate(bad, s), doctest::Contains("sums to"), pcf::ValidationError);
  bad = hs;
  bad.r[1] = 1.0;
  CHECK_THROWS_WITH_AS(pcf::validate(bad, s), doctest::Contains("not regular"), pcf::ValidationError);
  bad = hs;
  bad.D.setZero();
  CHECK_THROWS_WITH_AS(pcf::validate(bad, s), doctest::Contains("kernel"), pcf::ValidationError);
}

TEST_CASE("harmonic extension: 2/5 rule, midpoint rule, constants") {
  const auto g = testing::preset("gasket");
  const auto ug = pcf::harmonic_extension(g.structure, g.require_harmonic(), 0, std::vector<double>{1, 0, 0});
  REQUIRE(ug.size() == 6);
  CHECK(ug[3] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(ug[4] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(ug[5] == doctest::Approx(0.2).epsilon(1e-14));

  const auto iv = testing::preset("interval");
  const auto ui = pcf::harmonic_extension(iv.structure, iv.require_harmonic(), 0, std::vector<double>{0, 1});
  CHECK(ui[2] == doctest::Approx(0.5).epsilon(1e-15));

  const auto c = pcf::harmonic_extension(g.structure, g.require_harmonic(), 2, std::vector<double>(15, 2.5));
  for (double x : c) CHECK(x == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("extension matrices") {
  const auto iv = testing::preset("interval");
  const auto A = pcf::extension_matrices(iv.structure, iv.require_harmonic());
  Eigen::MatrixXd A1(2, 2), A2(2, 2);
  A1 << 1, 0, 0.5, 0.5;
  A2 << 0.5, 0.5, 0, 1;
  CHECK((A[0] - A1).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((A[1] - A2).cwiseAbs().maxCoeff() < 1e-15);

  const auto g = testing::preset("gasket");
  for (const auto& Ai : pcf::extension_matrices(g.structure, g.require_harmonic())) {
    CHECK((Ai.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK(Ai.minCoeff() >= 0.0);
    for (int q = 0; q < 3; ++q) {
      std::vector<double> row = {Ai(q, 0), Ai(q, 1), Ai(q, 2)};
      std::sort(row.begin(), row.end());
      const bool delta = row[2] == doctest::Approx(1.0) && row[1] == doctest::Approx(0.0);
      const bool rule = row[0] == doctest::Approx(0.2) && row[1] == doctest::Approx(0.4) && row[2] == doctest::Approx(0.4);
      CHECK((delta || rule));
    }
  }
}

TEST_CASE("harmonic_lift agrees with repeated extension") {
  const auto g = testing::preset("gasket");
  const auto& hs = g.require_harmonic();
  const auto A = pcf::extension_matrices(g.structure, hs);
  std::mt19937_64 rng(3);
  std::vector<double> u = testing::random_vector(rng, 6);
  const auto lifted = pcf::harmonic_lift(A, pcf::build_level(g.structure, 1), u, pcf::build_level(g.structure, 4));
  for (int m = 1; m < 4; ++m) u = pcf::harmonic_extension(g.structure, hs, m, u);
  REQUIRE(u.size() == lifted.size());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - lifted[i]) < 1e-13);
}

TEST_CASE("minimality, energy conservation and maximum principle") {
  std::mt19937_64 rng(5);
  for (const char* name : {"interval", "gasket"}) {
    const auto d = testing::preset(name);
    const auto& hs = d.require_harmonic();
    for (int m = 0; m <= 4; ++m) {
      const auto coarse = pcf::assemble_energy(d.structure, hs, m);
      const auto fine = pcf::assemble_energy(d.structure, hs, m + 1);
      const auto u = testing::random_vector(rng, coarse.num_vertices());
      const auto h = pcf::harmonic_extension(fine, u);
      const double eh = fine.energy(h);
      CHECK(testing::rel_diff(eh, coarse.energy(u)) < 1e-10);
      const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
      for (double x : h) CHECK((x >= *lo - 1e-14 && x <= *hi + 1e-14));
      for (int trial = 0; trial < 100; ++trial) {
        auto v = h;
        const auto noise = testing::random_vector(rng, v.size() - u.size(), -0.1, 0.1);
        for (std::size_t i = u.size(); i < v.size(); ++i) v[i] += noise[i - u.size()];
        CHECK(fine.energy(v) > eh);
      }
    }
  }
}

TEST_CASE("energy conservation up to level 5") {
  std::mt19937_64 rng(6);
  for (const char* name : {"interval", "gasket"}) {
    const auto d = testing::preset(name);
    for (int m = 0; m <= 5; ++m) {
      const auto u = testing::random_vector(rng, pcf::build_level(d.structure, m).num_vertices());
      const auto coarse = pcf::assemble_energy(d.structure, d.require_harmonic(), m);
      const auto fine = pcf::assemble_energy(d.structure, d.require_harmonic(), m + 1);
      CHECK(testing::rel_diff(fine.energy(pcf::harmonic_extension(fine, u)), coarse.energy(u)) < 1e-10);
    }
  }
}

TEST_CASE("self-similar identity E^(m+1)[u] = sum_i r_i^-1 E^(m)[u o F_i]") {
  std::mt19937_64 rng(7);
  for (const char* name : {"interval", "gasket"}) {
    const auto d = testing::preset(name);
    const auto& hs = d.require_harmonic();
    for (int m = 0; m <= 4; ++m) {
      const auto coarse = pcf::assemble_energy(d.structure, hs, m);
      const auto fine = pcf::assemble_energy(d.structure, hs, m + 1);
      for (int trial = 0; trial < 10; ++trial) {
        const auto u = testing::random_vector(rng, fine.num_vertices());
        double sum = 0.0;
        for (int i = 0; i < d.structure.N; ++i)
          sum += coarse.energy(pcf::pullback(fine.complex, coarse.complex, i, u)) / hs.r[i];
        CHECK(testing::rel_diff(fine.energy(u), sum) < 1e-12);
      }
    }
  }
}

TEST_CASE("energy is constant along harmonic refinement and nondecreasing otherwise") {
  std::mt19937_64 rng(8);
  const auto d = testing::preset("gasket");
  const auto& hs = d.require_harmonic();
  auto u = testing::random_vector(rng, 6);
  auto v = u;
  double e_h = pcf::assemble_energy(d.structure, hs, 1).energy(u);
  double e_v = e_h;
  for (int m = 2; m <= 5; ++m) {
    const auto ef = pcf::assemble_energy(d.structure, hs, m);
    u = pcf::harmonic_extension(ef, u);
    CHECK(testing::rel_diff(ef.energy(u), e_h) < 1e-10);
    const auto extra = testing::random_vector(rng, ef.num_vertices() - v.size());
    v.insert(v.end(), extra.begin(), extra.end());
    const double next = ef.energy(v);
    CHECK(next >= e_v * (1.0 - 1e-12));
    e_v = next;
  }
}
