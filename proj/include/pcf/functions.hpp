#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcf/harmonic.hpp"

namespace pcf {

/// Test function for the Fredholm module: boundary data on V_{level}
/// extended harmonically to deeper levels.
struct FunctionSpec {
  enum class Kind { Harmonic, RandomHarmonic, Constant };
  Kind kind = Kind::RandomHarmonic;
  int level = 0;
  std::vector<double> boundary_values;
  std::uint64_t seed = 0;
  double value = 0.0;

  /// Stable identifier, e.g. "random-harmonic:m0=2:seed=7".
  std::string id() const;
  nlohmann::json to_json() const;
};

FunctionSpec parse_function_spec(const nlohmann::json& doc);

/// Uniform [0, 1) values from mt19937_64, 53 bits per draw.
std::vector<double> uniform_values(std::uint64_t seed, std::size_t n);

/// Values of the function on V_m.
std::vector<double> materialize(const FunctionSpec& spec, const SelfSimilarStructure& s, const HarmonicStructure& hs,
                                int m);

}  // namespace pcf
