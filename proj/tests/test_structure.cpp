#include <doctest.h>

#include <map>
#include <set>

#include "pcf/error.hpp"
#include "pcf/structure.hpp"
#include "support.hpp"

using pcf::build_level;

TEST_CASE("presets parse and level-1 vertex counts match hand enumeration") {
  CHECK(build_level(testing::preset("interval").structure, 1).num_vertices() == 3);
  CHECK(build_level(testing::preset("gasket").structure, 1).num_vertices() == 6);
}

TEST_CASE("empty gluing list is a disconnected level-1 graph") {
  nlohmann::json doc = {{"name", "broken"}, {"N", 2}, {"n0", 2}, {"gluings", nlohmann::json::array()}};
  CHECK_THROWS_WITH_AS(pcf::parse_structure(doc), doctest::Contains("disconnected level-1 graph"), pcf::ValidationError);
}

TEST_CASE("malformed and out-of-range documents are rejected") {
  CHECK_THROWS_AS(pcf::parse_structure(nlohmann::json::array()), pcf::InputError);
  CHECK_THROWS_AS(pcf::parse_structure({{"N", 2}, {"gluings", {{1, 2, 2, 1}}}}), pcf::InputError);
  CHECK_THROWS_AS(pcf::parse_structure({{"N", 2}, {"n0", 2}, {"gluings", {{1, 3, 2, 1}}}}), pcf::InputError);
  CHECK_THROWS_AS(pcf::parse_structure({{"N", 2}, {"n0", 2}, {"gluings", {{1, 2, 5, 1}}}}), pcf::InputError);
  CHECK_THROWS_AS(pcf::parse_structure({{"N", 2}, {"n0", 2}, {"gluings", {{1, 2, 2}}}}), pcf::InputError);
  CHECK_THROWS_AS(pcf::parse_structure({{"N", 2}, {"n0", 2}, {"gluings", {{1, 1, 2, 1}, {1, 2, 2, 1}}}}),
                  pcf::ValidationError);
}

TEST_CASE("vertex counts follow the closed forms") {
  const auto interval = testing::preset("interval").structure;
  const auto gasket = testing::preset("gasket").structure;
  for (int m = 0; m <= 9; ++m) {
    const auto lc = build_level(interval, m);
    CHECK(lc.num_vertices() == (std::size_t{1} << m) + 1);
    CHECK(lc.num_cells() == (std::int64_t{1} << m));
  }
  std::int64_t p3 = 1;
  for (int m = 0; m <= 6; ++m) {
    const auto lc = build_level(gasket, m);
    CHECK(lc.num_vertices() == static_cast<std::size_t>(3 * (p3 + 1) / 2));
    CHECK(lc.num_cells() == p3);
    p3 *= 3;
  }
  CHECK(build_level(interval, 3).num_vertices() == 9);
  CHECK(build_level(gasket, 2).num_vertices() == 15);
}

TEST_CASE("level 0 is the boundary with a single empty-word cell") {
  for (const char* name : {"interval", "gasket"}) {
    const auto s = testing::preset(name).structure;
    const auto lc = build_level(s, 0);
    CHECK(lc.num_vertices() == static_cast<std::size_t>(s.n0));
    REQUIRE(lc.num_cells() == 1);
    for (int p = 0; p < s.n0; ++p) CHECK(lc.cell(0)[p] == p);
  }
}

TEST_CASE("identification classes agree with Euclidean coordinates") {
  for (const char* name : {"interval", "gasket"}) {
    const auto s = testing::preset(name).structure;
    for (int m = 0; m <= 5; ++m) {
      const auto lc = build_level(s, m);
      std::map<int, Eigen::Vector2d> where;
      for (std::int64_t w = 0; w < lc.num_cells(); ++w) {
        for (int p = 0; p < s.n0; ++p) {
          const auto x = testing::position(s, w, m, p);
          const int v = lc.cell(w)[p];
          if (auto it = where.find(v); it != where.end()) {
            CHECK((it->second - x).norm() < 1e-12);
          } else {
            where.emplace(v, x);
          }
        }
      }
      CHECK(where.size() == lc.num_vertices());
      for (auto a = where.begin(); a != where.end(); ++a)
        for (auto b = std::next(a); b != where.end(); ++b) CHECK((a->second - b->second).norm() > 1e-9);
    }
  }
}

TEST_CASE("canonical address is the least slot of its class") {
  const auto s = testing::preset("gasket").structure;
  const auto lc = build_level(s, 3);
  std::vector<std::int64_t> least(lc.num_vertices(), std::numeric_limits<std::int64_t>::max());
  for (std::int64_t w = 0; w < lc.num_cells(); ++w)
    for (int p = 0; p < s.n0; ++p) least[lc.cell(w)[p]] = std::min(least[lc.cell(w)[p]], w * s.n0 + p);
  for (std::size_t v = 0; v < lc.num_vertices(); ++v)
    CHECK(lc.vertices[v].word * s.n0 + lc.vertices[v].label == least[v]);
}

TEST_CASE("nesting: V_m embeds in V_{m+1} preserving the boundary") {
  for (const char* name : {"interval", "gasket"}) {
    const auto s = testing::preset(name).structure;
    for (int m = 0; m < 5; ++m) {
      const auto coarse = build_level(s, m);
      const auto fine = build_level(s, m + 1);
      REQUIRE(fine.nested_sizes.size() == static_cast<std::size_t>(m + 2));
      CHECK(fine.nested_sizes[m] == coarse.num_vertices());
      for (std::int64_t w = 0; w < coarse.num_cells(); ++w)
        for (int p = 0; p < s.n0; ++p)
          CHECK(fine.cell(w * s.N + s.fixed_maps[p])[p] == coarse.cell(w)[p]);
      for (int p = 0; p < s.n0; ++p) {
        std::int64_t corner = 0;
        for (int j = 0; j <= m; ++j) corner = corner * s.N + s.fixed_maps[p];
        CHECK(fine.cell(corner)[p] == p);
      }
    }
  }
}

TEST_CASE("every vertex lies in some cell and builds are deterministic") {
  const auto s = testing::preset("gasket").structure;
  const auto a = build_level(s, 4);
  const auto b = build_level(s, 4);
  CHECK(a.cells == b.cells);
  CHECK(a.vertices == b.vertices);
  std::set<int> seen(a.cells.begin(), a.cells.end());
  CHECK(seen.size() == a.num_vertices());
}

TEST_CASE("words are spelled lexicographically, first letter most significant") {
  CHECK(pcf::word_string(5, 3, 2) == "23");
  CHECK(pcf::word_string(0, 3, 0).empty());
  CHECK(pcf::word_letters(7, 2, 3) == std::vector<int>{1, 1, 1});
}

TEST_CASE("pullback reads the restriction to a first-level cell") {
  const auto s = testing::preset("interval").structure;
  const auto fine = build_level(s, 3);
  const auto coarse = build_level(s, 2);
  std::vector<double> x(fine.num_vertices());
  for (std::int64_t w = 0; w < fine.num_cells(); ++w)
    for (int p = 0; p < 2; ++p) x[fine.cell(w)[p]] = testing::position(s, w, 3, p).x();
  const auto right = pcf::pullback(fine, coarse, 1, x);
  for (std::int64_t w = 0; w < coarse.num_cells(); ++w)
    for (int p = 0; p < 2; ++p)
      CHECK(right[coarse.cell(w)[p]] == doctest::Approx(0.5 + 0.5 * testing::position(s, w, 2, p).x()));
}
