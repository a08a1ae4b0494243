#include "vccrecon/espirit.hpp"
#include "vccrecon/fft.hpp"
#include "vccrecon/phantom.hpp"
#include "vccrecon/recon.hpp"
#include "vccrecon/sampling.hpp"
#include "vccrecon/vcc.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace vcc;

struct Setup
{
  PhantomTruth truth = make_phantom({});
  KTensor ksp = simulate_kspace(truth);
  KTensor vcc_acs = vcc_calibration_block(make_vcc(ksp).data, 24);
  CalibSubspace sub = calibrate(vcc_acs);
  KTensor maps = soft_weight(center_phase(eigen_maps(sub, 96, 96, 1)).maps).maps;
};

Setup const &setup()
{
  static Setup const s;
  return s;
}

void BM_Fftc(benchmark::State &state)
{
  Index const n = state.range(0);
  KTensor t = KTensor::image(n, n, 16);
  for (auto _ : state) {
    fftc_inplace(t, kSpatial);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_Fftc)->Arg(96)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Calibrate(benchmark::State &state)
{
  auto const &s = setup();
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate(s.vcc_acs, {state.range(0), 0.001}));
  }
}
BENCHMARK(BM_Calibrate)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EigenMaps(benchmark::State &state)
{
  auto const &s = setup();
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigen_maps(s.sub, 96, 96, state.range(0)));
  }
}
BENCHMARK(BM_EigenMaps)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State &state)
{
  auto const &s = setup();
  ForwardModel m;
  m.maps = s.maps;
  m.pattern = make_pattern(96, 96, 3, 24);
  m.mode = SolveMode::Real;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(m, s.ksp, {20, 0.0}));
  }
}
BENCHMARK(BM_Solve)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
