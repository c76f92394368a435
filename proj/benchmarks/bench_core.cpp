// Microbenchmarks for the hot paths: quadrature construction, tridiagonal
// eigensolves, the finite-difference and Galerkin pipelines, and both
// nodal-domain counters.

#include <benchmark/benchmark.h>

#include <vector>

#include "esp/biaxial_fd.hpp"
#include "esp/eigensolve.hpp"
#include "esp/galerkin.hpp"
#include "esp/geometry.hpp"
#include "esp/nodal.hpp"
#include "esp/perturbation.hpp"
#include "esp/special_fn.hpp"

namespace {

void BM_GaussLegendre(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(esp::gauss_legendre(order));
  }
}
BENCHMARK(BM_GaussLegendre)->Arg(16)->Arg(64)->Arg(256);

void BM_EigTridiagonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  esp::SymTridiagonal T;
  T.diag.assign(static_cast<size_t>(n), 2.0);
  T.offdiag.assign(static_cast<size_t>(n - 1), -1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(esp::eig_tridiagonal_values(T));
  }
}
BENCHMARK(BM_EigTridiagonal)->Arg(100)->Arg(400)->Arg(1600);

void BM_PerturbedSpectrum(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(esp::perturbed_spectrum(l, 0.3, -0.55, 0.9));
  }
}
BENCHMARK(BM_PerturbedSpectrum)->Arg(2)->Arg(5)->Arg(10);

void BM_SolveBiaxialFd(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto spec = esp::EllipsoidSpec::from_perturbation(0, 0, 1, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        esp::solve_biaxial_fd(spec, 1, N, 4, esp::PoleBc::AUTO));
  }
}
BENCHMARK(BM_SolveBiaxialFd)->Arg(200)->Arg(400)->Arg(800);

void BM_AssembleGalerkin(benchmark::State& state) {
  const int l_max = static_cast<int>(state.range(0));
  const auto spec = esp::EllipsoidSpec::from_perturbation(0, 1, -1, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(esp::assemble_galerkin(spec, l_max));
  }
}
BENCHMARK(BM_AssembleGalerkin)->Arg(4)->Arg(8)->Arg(12)
    ->Unit(benchmark::kMillisecond);

void BM_SolveTriaxial(benchmark::State& state) {
  const int l_max = static_cast<int>(state.range(0));
  const auto spec = esp::EllipsoidSpec::from_perturbation(0, 1, -1, 0.1);
  const int k = (l_max + 1) * (l_max + 1) / 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(esp::solve_triaxial(spec, l_max, k));
  }
}
BENCHMARK(BM_SolveTriaxial)->Arg(6)->Arg(8)->Arg(10)
    ->Unit(benchmark::kMillisecond);

void BM_RasterCount(benchmark::State& state) {
  const int n_phi = static_cast<int>(state.range(0));
  const esp::ModeCombination zonal = {
      {esp::ModeIndex{4, 0, esp::Family::COS}, 1.0}};
  const auto grid = esp::eval_mode_function(zonal, n_phi, 2 * (n_phi - 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(esp::count_nodal_domains(grid));
  }
}
BENCHMARK(BM_RasterCount)->Arg(201)->Arg(401)->Arg(801)
    ->Unit(benchmark::kMillisecond);

void BM_ExactNodalCount(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const auto spec = esp::perturbed_spectrum(l, 0.2, 0.9, -0.6);
  for (auto _ : state) {
    for (const auto& pe : spec) {
      benchmark::DoNotOptimize(
          esp::exact_nodal_count(l, pe.eigvec, 0.2, 0.9, -0.6));
    }
  }
}
BENCHMARK(BM_ExactNodalCount)->Arg(3)->Arg(4)->Arg(5);

void BM_CheckConjecture(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const auto spec = esp::EllipsoidSpec::from_axes(1, 2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(esp::check_conjecture(spec, l, 401, 800));
  }
}
BENCHMARK(BM_CheckConjecture)->Arg(2)->Arg(4)
    ->Unit(benchmark::kMillisecond);

}  // namespace
