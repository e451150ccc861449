#include <benchmark/benchmark.h>

#include <random>

#include "ncg/dirac.hpp"
#include "ncg/kernels.hpp"
#include "ncg/lipschitz.hpp"
#include "ncg/sampled_plane.hpp"
#include "ncg/states_distance.hpp"

using namespace ncg;

namespace {

const LadderTable& table() { return default_ladder_table(); }

TruncatedElement random_element(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = {nd(rng), nd(rng)};
  }
  m = 0.5 * (m + m.adjoint()).eval();
  return TruncatedElement(m, 1.0).interior_projected(2);
}

void BM_StarMatrix(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto a = random_element(n, 1), b = random_element(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(star(a, b));
}
BENCHMARK(BM_StarMatrix)->Arg(32)->Arg(64)->Arg(128);

void BM_StarQuadrature(benchmark::State& st) {
  const PlaneGrid g = PlaneGrid::for_theta(1.0, static_cast<int>(st.range(0)), 6.0);
  const auto f = synthesize_fmn(1, 2, 1.0, g), h = synthesize_fmn(2, 0, 1.0, g);
  for (auto _ : st) benchmark::DoNotOptimize(moyal_star_quadrature(f, h));
}
BENCHMARK(BM_StarQuadrature)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_Seminorm(benchmark::State& st) {
  const auto a = random_element(static_cast<int>(st.range(0)), 3);
  DiracParams p;
  p.omega = 0.5;
  table();
  for (auto _ : st) benchmark::DoNotOptimize(lipschitz_seminorm(DiracKind::D1, p, a, SeminormMethod::Direct, table()));
}
BENCHMARK(BM_Seminorm)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DistanceLp(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  DistanceProblem p;
  p.params.theta = 2.0;
  p.state_a = State::pure(0, n);
  p.state_b = State::pure(5, n);
  for (auto _ : st) benchmark::DoNotOptimize(distance(p, table()));
}
BENCHMARK(BM_DistanceLp)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PhiIntegral(benchmark::State& st) {
  double v2 = 0.5;
  for (auto _ : st) {
    benchmark::DoNotOptimize(phi_integral(v2, 2.0, 2.0, 1.0));
    v2 = v2 < 4.0 ? v2 * 1.01 : 0.5;
  }
}
BENCHMARK(BM_PhiIntegral)->Unit(benchmark::kMicrosecond);

void BM_LandauSpectrum(benchmark::State& st) {
  DiracParams p;
  p.xi = 1.0;
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(hamiltonian_spectrum(Hamiltonian::Landau, p, n, table()));
}
BENCHMARK(BM_LandauSpectrum)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
