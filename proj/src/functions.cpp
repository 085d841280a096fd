#include "pcf/functions.hpp"

#include <random>

#include "pcf/error.hpp"

namespace pcf {

std::string FunctionSpec::id() const {
  switch (kind) {
    case Kind::Constant:
      return "constant:value=" + nlohmann::json(value).dump();
    case Kind::Harmonic:
      return "harmonic:m0=" + std::to_string(level);
    case Kind::RandomHarmonic:
      break;
  }
  return "random-harmonic:m0=" + std::to_string(level) + ":seed=" + std::to_string(seed);
}

nlohmann::json FunctionSpec::to_json() const {
  switch (kind) {
    case Kind::Constant:
      return {{"type", "constant"}, {"value", value}};
    case Kind::Harmonic:
      return {{"type", "harmonic"}, {"level", level}, {"boundary_values", boundary_values}};
    case Kind::RandomHarmonic:
      break;
  }
  return {{"type", "random-harmonic"}, {"level", level}, {"seed", seed}};
}

FunctionSpec parse_function_spec(const nlohmann::json& doc) {
  FunctionSpec spec;
  try {
    const auto type = doc.at("type").get<std::string>();
    if (type == "constant") {
      spec.kind = FunctionSpec::Kind::Constant;
      spec.value = doc.value("value", 1.0);
    } else if (type == "harmonic") {
      spec.kind = FunctionSpec::Kind::Harmonic;
      spec.level = doc.at("level").get<int>();
      spec.boundary_values = doc.at("boundary_values").get<std::vector<double>>();
    } else if (type == "random-harmonic") {
      spec.kind = FunctionSpec::Kind::RandomHarmonic;
      spec.level = doc.at("level").get<int>();
      spec.seed = doc.value("seed", std::uint64_t{0});
    } else {
      throw InputError("unknown function type '" + type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed function spec: ") + e.what());
  }
  if (spec.level < 0) throw InputError("function spec level must be non-negative");
  return spec;
}

std::vector<double> uniform_values(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return out;
}

std::vector<double> materialize(const FunctionSpec& spec, const SelfSimilarStructure& s, const HarmonicStructure& hs,
                                int m) {
  const LevelComplex target = build_level(s, m);
  if (spec.kind == FunctionSpec::Kind::Constant) return std::vector<double>(target.num_vertices(), spec.value);
  if (spec.level > m)
    throw PreconditionError("function level m0 = " + std::to_string(spec.level) + " exceeds the target level " +
                            std::to_string(m));
  const LevelComplex base = build_level(s, spec.level);
  std::vector<double> values;
  if (spec.kind == FunctionSpec::Kind::Harmonic) {
    values = spec.boundary_values;
    if (values.size() != base.num_vertices())
      throw InputError("harmonic function needs " + std::to_string(base.num_vertices()) + " boundary values on V_" +
                       std::to_string(spec.level) + ", got " + std::to_string(values.size()));
  } else {
    values = uniform_values(spec.seed, base.num_vertices());
  }
  const auto A = extension_matrices(s, hs);
  return harmonic_lift(A, base, values, target);
}

}  // namespace pcf
