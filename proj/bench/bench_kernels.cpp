// Serial reference vs OpenMP variant for each kernel on gasket-sized inputs.

#include <benchmark/benchmark.h>

#include "pcf/definition.hpp"
#include "pcf/fredholm.hpp"
#include "pcf/functions.hpp"
#include "pcf/kernels.hpp"

namespace {

struct Fixture {
  pcf::FractalDefinition def = pcf::load_preset("gasket");
  pcf::EdgeModule em;
  pcf::SpectralData sd;
  std::vector<double> a;
  std::vector<double> b;

  explicit Fixture(int m) {
    const auto& hs = def.require_harmonic();
    auto ef = pcf::assemble_energy(def.structure, hs, m);
    const auto mass = pcf::mass_vector(def.structure, hs, def.require_measure(), m);
    sd = pcf::eigensolve(ef, mass, pcf::BoundaryCondition::Dirichlet);
    em = pcf::build_module(std::move(ef));
    a = pcf::uniform_values(1, em.form.num_vertices());
    b = pcf::uniform_values(2, em.form.num_vertices());
  }
};

const Fixture& fixture(int m) {
  static const Fixture f4(4);
  static const Fixture f5(5);
  return m == 4 ? f4 : f5;
}

template <auto Kernel>
void BM_spectral_diagonal(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  const Eigen::VectorXd w = f.sd.eigenvalues.cwiseInverse();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.sd.eigenvectors, w));
}

template <auto Kernel>
void BM_commutator(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  const Eigen::VectorXd abar = f.em.midpoint(f.a);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.em.phase, abar));
}

template <auto Kernel>
void BM_heat_sweep(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  std::vector<double> times(32);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = std::pow(10.0, -3.0 + 3.0 * i / 31.0);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.sd.eigenvectors, f.sd.eigenvalues, times, 0.68));
}

template <auto Kernel>
void BM_edge_measure(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.em.form.edges, f.a, f.b));
}

}  // namespace

BENCHMARK(BM_spectral_diagonal<pcf::kernels::serial::spectral_diagonal>)->Name("spectral_diagonal/serial")->Arg(4)->Arg(5);
BENCHMARK(BM_spectral_diagonal<pcf::kernels::omp::spectral_diagonal>)->Name("spectral_diagonal/omp")->Arg(4)->Arg(5);
BENCHMARK(BM_commutator<pcf::kernels::serial::commutator_matrix>)->Name("commutator_matrix/serial")->Arg(4)->Arg(5);
BENCHMARK(BM_commutator<pcf::kernels::omp::commutator_matrix>)->Name("commutator_matrix/omp")->Arg(4)->Arg(5);
BENCHMARK(BM_heat_sweep<pcf::kernels::serial::heat_sup_sweep>)->Name("heat_sup_sweep/serial")->Arg(4)->Arg(5);
BENCHMARK(BM_heat_sweep<pcf::kernels::omp::heat_sup_sweep>)->Name("heat_sup_sweep/omp")->Arg(4)->Arg(5);
BENCHMARK(BM_edge_measure<pcf::kernels::serial::edge_measure>)->Name("edge_measure/serial")->Arg(4)->Arg(5);
BENCHMARK(BM_edge_measure<pcf::kernels::omp::edge_measure>)->Name("edge_measure/omp")->Arg(4)->Arg(5);

BENCHMARK_MAIN();
