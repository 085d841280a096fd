#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pcf/error.hpp"
#include "pcf/functions.hpp"
#include "pcf/io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pcf_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("FNV-1a reference vectors") {
  CHECK(pcf::io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(pcf::io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(pcf::io::fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("digest ignores key order and formatting") {
  const auto a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
  const auto b = nlohmann::json::parse(R"({"a":[1,2],"b":1})");
  CHECK(pcf::io::digest(a) == pcf::io::digest(b));
  CHECK(pcf::io::digest(a) != pcf::io::digest(nlohmann::json::parse(R"({"a":[2,1],"b":1})")));
}

TEST_CASE("csv round-trips doubles") {
  const std::vector<double> xs = {0.1, 1.0 / 3.0, 1e-300, -2.5e17};
  const auto text = pcf::io::csv({"k", "x"}, {{0, 1, 2, 3}, xs});
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,x");
  for (double x : xs) {
    REQUIRE(std::getline(in, line));
    CHECK(std::stod(line.substr(line.find(',') + 1)) == x);
  }
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("atomic write replaces content and leaves no temporaries") {
  const auto dir = scratch("atomic");
  pcf::io::write_atomic(dir / "out.txt", "first");
  pcf::io::write_atomic(dir / "out.txt", "second");
  CHECK(slurp(dir / "out.txt") == "second");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
  CHECK_THROWS_AS(pcf::io::write_atomic(dir / "missing" / "x.txt", "y"), pcf::Error);
  fs::remove_all(dir);
}

TEST_CASE("meta carries version, seed and digest; wall time only on request") {
  const auto def = testing::preset("gasket");
  const auto m = pcf::io::meta(def.source, 7, -1.0);
  CHECK(m.at("version") == pcf::io::kToolVersion);
  CHECK(m.at("seed") == 7);
  CHECK(m.at("definition_digest") == pcf::io::digest(def.source));
  CHECK_FALSE(m.contains("wall_seconds"));
  CHECK(pcf::io::meta(def.source, 7, 0.5).contains("wall_seconds"));
}

TEST_CASE("uniform values are reproducible and in [0, 1)") {
  const auto a = pcf::uniform_values(42, 1000);
  CHECK(a == pcf::uniform_values(42, 1000));
  CHECK(a != pcf::uniform_values(43, 1000));
  for (double x : a) CHECK((x >= 0.0 && x < 1.0));
  std::mt19937_64 rng(42);
  CHECK(a[0] == static_cast<double>(rng() >> 11) / 9007199254740992.0);
}

TEST_CASE("function specs") {
  const auto g = testing::preset("gasket");
  const auto& hs = g.require_harmonic();
  const auto spec = pcf::parse_function_spec({{"type", "harmonic"}, {"level", 0}, {"boundary_values", {1, 0, 0}}});
  const auto u = pcf::materialize(spec, g.structure, hs, 1);
  CHECK(u[3] == doctest::Approx(0.4));
  CHECK(pcf::parse_function_spec({{"type", "random-harmonic"}, {"level", 2}, {"seed", 7}}).id() ==
        "random-harmonic:m0=2:seed=7");
  const auto c = pcf::materialize(pcf::parse_function_spec({{"type", "constant"}, {"value", 2}}), g.structure, hs, 2);
  CHECK(c == std::vector<double>(15, 2.0));

  CHECK_THROWS_AS(pcf::parse_function_spec({{"type", "sine"}}), pcf::InputError);
  CHECK_THROWS_AS(pcf::parse_function_spec({{"type", "harmonic"}, {"level", 0}}), pcf::InputError);
  CHECK_THROWS_AS(pcf::parse_function_spec({{"type", "random-harmonic"}, {"level", -1}}), pcf::InputError);
  const auto short_spec = pcf::parse_function_spec({{"type", "harmonic"}, {"level", 1}, {"boundary_values", {1, 0, 0}}});
  CHECK_THROWS_WITH_AS(pcf::materialize(short_spec, g.structure, hs, 3), doctest::Contains("needs 6"), pcf::InputError);
  const auto deep = pcf::parse_function_spec({{"type", "random-harmonic"}, {"level", 4}});
  CHECK_THROWS_AS(pcf::materialize(deep, g.structure, hs, 3), pcf::PreconditionError);
}

TEST_CASE("definitions: presets, files and errors") {
  CHECK(pcf::preset_names() == std::vector<std::string>{"gasket", "interval"});
  CHECK_THROWS_AS(pcf::load_preset("carpet"), pcf::InputError);

  const auto dir = scratch("def");
  const auto path = dir / "gasket.json";
  std::ofstream(path) << pcf::preset_document("gasket").dump();
  const auto def = pcf::load_definition(path.string());
  CHECK(def.structure.N == 3);
  CHECK(def.require_harmonic().r == std::vector<double>(3, 0.6));

  const auto missing = (dir / "nope.json").string();
  CHECK_THROWS_WITH_AS(pcf::load_definition(missing), doctest::Contains(missing.c_str()), pcf::InputError);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_WITH_AS(pcf::load_definition((dir / "bad.json").string()), doctest::Contains("bad.json"),
                       pcf::InputError);

  auto doc = pcf::preset_document("gasket");
  doc.erase("measure");
  const auto partial = pcf::parse_definition(doc);
  CHECK_THROWS_AS(partial.require_measure(), pcf::InputError);
  fs::remove_all(dir);
}
