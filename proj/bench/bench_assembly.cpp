// Serial reference vs OpenMP assembly of the condensed global system.

#include "hybridns/condense.hpp"
#include "hybridns/forms.hpp"
#include "hybridns/mesh.hpp"
#include "hybridns/spaces.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace hybridns;

void assemble(benchmark::State& bench, Execution exec) {
  const int n = static_cast<int>(bench.range(0));
  const int k = static_cast<int>(bench.range(1));
  const Mesh mesh = build_rect_mesh(n, n, Rect{});
  const DofMap dofs(mesh, SpaceSpec::equal_order(k));
  const ReferenceTables tables(dofs);
  Physics physics;
  physics.params.nu = 1e-2;
  physics.params.alpha = 6.0 * k * k;
  const State frozen = interpolate_state(
      mesh, dofs, [](const Vec2& x) { return Vec2(x.y(), -x.x()); }, [](const Vec2&) { return 0.0; });
  const Constraints bc = Constraints::from_mask(dofs);
  const PressureConstraint pressure = PressureConstraint::mean(0.0);
  const AssemblyInput in{mesh, dofs, tables, physics, StepKind{true}, frozen, bc, pressure};
  for (auto _ : bench) {
    CondensedSystem sys = assemble_condensed(in, exec);
    benchmark::DoNotOptimize(sys.rhs.data());
  }
  bench.SetItemsProcessed(bench.iterations() * mesh.num_cells());
}

void BM_AssembleSerial(benchmark::State& s) { assemble(s, Execution::serial); }
void BM_AssembleParallel(benchmark::State& s) { assemble(s, Execution::parallel); }

BENCHMARK(BM_AssembleSerial)->Args({32, 1})->Args({32, 2})->Args({64, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Args({32, 1})->Args({32, 2})->Args({64, 2})->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
