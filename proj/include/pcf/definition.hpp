#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcf/harmonic.hpp"
#include "pcf/spectra.hpp"
#include "pcf/structure.hpp"

namespace pcf {

/// A parsed fractal-definition document.
struct FractalDefinition {
  SelfSimilarStructure structure;
  std::optional<HarmonicStructure> harmonic;
  std::optional<MeasureWeights> measure;
  nlohmann::json source;

  const HarmonicStructure& require_harmonic() const;
  const MeasureWeights& require_measure() const;
};

FractalDefinition parse_definition(const nlohmann::json& doc);

/// Reads and parses a definition file. Throws InputError naming the path.
FractalDefinition load_definition(const std::string& path);

std::vector<std::string> preset_names();
nlohmann::json preset_document(const std::string& name);
FractalDefinition load_preset(const std::string& name);

}  // namespace pcf
