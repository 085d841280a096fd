#include "pcf/definition.hpp"

#include <fstream>

#include "pcf/error.hpp"

namespace pcf {

namespace {

const nlohmann::json& presets() {
  static const nlohmann::json doc = nlohmann::json::parse(R"({
    "interval": {
      "name": "interval",
      "N": 2,
      "n0": 2,
      "gluings": [[1, 2, 2, 1]],
      "fixed_maps": [1, 2],
      "harmonic": {"D": [[1, -1], [-1, 1]], "r": [0.5, 0.5]},
      "measure": {"mu": [0.5, 0.5]}
    },
    "gasket": {
      "name": "gasket",
      "N": 3,
      "n0": 3,
      "gluings": [[1, 2, 2, 1], [2, 3, 3, 2], [1, 3, 3, 1]],
      "fixed_maps": [1, 2, 3],
      "harmonic": {"D": [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], "r": [0.6, 0.6, 0.6]},
      "measure": {"mu": [0.3333333333333333, 0.3333333333333333, 0.3333333333333333]}
    }
  })");
  return doc;
}

}  // namespace

const HarmonicStructure& FractalDefinition::require_harmonic() const {
  if (!harmonic) throw InputError("definition '" + structure.name + "' has no harmonic block");
  return *harmonic;
}

const MeasureWeights& FractalDefinition::require_measure() const {
  if (!measure) throw InputError("definition '" + structure.name + "' has no measure block (use --mu)");
  return *measure;
}

FractalDefinition parse_definition(const nlohmann::json& doc) {
  FractalDefinition def;
  def.structure = parse_structure(doc);
  def.source = doc;
  if (doc.contains("harmonic")) def.harmonic = parse_harmonic(doc.at("harmonic"), def.structure);
  if (doc.contains("measure")) {
    if (!def.harmonic) throw InputError("a measure block needs a harmonic block");
    def.measure = parse_measure(doc.at("measure"), def.structure, *def.harmonic);
  }
  return def;
}

FractalDefinition load_definition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open definition file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("definition file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_definition(doc);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : presets().items()) names.push_back(k);
  return names;
}

nlohmann::json preset_document(const std::string& name) {
  if (!presets().contains(name)) throw InputError("unknown preset '" + name + "'");
  return presets().at(name);
}

FractalDefinition load_preset(const std::string& name) { return parse_definition(preset_document(name)); }

}  // namespace pcf
