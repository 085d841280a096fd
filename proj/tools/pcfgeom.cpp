// pcfgeom: spectral and Fredholm-module invariants of p.c.f. self-similar fractals.

#include <iostream>

#include <CLI11.hpp>

#include "pcf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral and Fredholm-module invariants of p.c.f. self-similar fractals"};
  app.require_subcommand(1);

  pcf::RunConfig cfg;
  std::string mu_text;

  const std::pair<const char*, const char*> subcommands[] = {
      {"describe", "structure summary, harmonic verification, d_S and weights"},
      {"spectrum", "generalized eigenvalues of the level-m energy (spectrum.csv)"},
      {"weyl", "counting function, Weyl fit and spectral volume (weyl.json)"},
      {"kernels", "Green, heat and potential kernels (kernels.json)"},
      {"commutator", "singular values of [F, a] and summability checks (svals.csv, summability.json)"},
      {"invariance", "self-similar invariance of the d_S-energy functional (invariance.json)"},
  };
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    auto* preset = sub->add_option("--preset", cfg.preset, "embedded preset (interval, gasket)");
    auto* def = sub->add_option("--def", cfg.definition_path, "fractal-definition JSON file");
    preset->excludes(def);
    sub->add_option("--level", cfg.level, "level m")->capture_default_str();
    sub->add_option("--bc", cfg.bc, "boundary condition: dirichlet | neumann")->capture_default_str();
    sub->add_option("--mu", mu_text, "measure weights w1,...,wN");
    sub->add_option("--p", cfg.p, "Schatten / potential exponent")->capture_default_str();
    sub->add_option("--fn", cfg.function, "function spec as JSON text or path");
    sub->add_option("--seed", cfg.seed, "seed for random-harmonic functions")->capture_default_str();
    sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "tolerance override");
    sub->add_option("--max-level", cfg.max_level, "largest accepted level")->capture_default_str();
    sub->add_flag("--timing", cfg.timing, "record wall-clock seconds in meta");
    sub->callback([&cfg, name = std::string(name)] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcf::kExitInputError;
  }

  if (!mu_text.empty()) {
    std::vector<double> mu;
    std::stringstream ss(mu_text);
    std::string item;
    try {
      while (std::getline(ss, item, ',')) mu.push_back(std::stod(item));
    } catch (const std::exception&) {
      std::cerr << "error: --mu must be a comma-separated list of numbers\n";
      return pcf::kExitInputError;
    }
    cfg.mu = mu;
  }
  return pcf::run(cfg, std::cout, std::cerr);
}
