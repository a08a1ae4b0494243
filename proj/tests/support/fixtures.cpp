#include "fixtures.hpp"
#include "oracles.hpp"

#include "vccrecon/fft.hpp"
#include "vccrecon/sampling.hpp"

#include <cmath>

namespace vcc::testing {

VccRun make_run(PhantomOptions const &opts, Index acs, Index kernel, Index nsets)
{
  VccRun r;
  r.truth = make_phantom(opts);
  r.ksp = simulate_kspace(r.truth);
  r.coils = ifftc(r.ksp, kSpatial);
  VccKSpace const v = make_vcc(r.ksp);
  r.sub = calibrate(vcc_calibration_block(v.data, acs), {kernel, 0.001});
  r.raw = eigen_maps(r.sub, r.truth.grid(), r.truth.grid(), nsets);
  r.centered = center_phase(r.raw);
  r.weighted = soft_weight(r.centered.maps, 0.85);
  return r;
}

VccRun const &smooth_run()
{
  static VccRun const run = make_run({});
  return run;
}

VccRun const &blob_run()
{
  static VccRun const run = [] {
    PhantomOptions o;
    o.hf_blobs = 3;
    return make_run(o);
  }();
  return run;
}

SensitivityMaps conventional_maps(KTensor const &ksp, Index acs, Index kernel, Index nsets)
{
  CalibSubspace const sub = calibrate(extract_acs(ksp, acs, acs), {kernel, 0.001});
  return soft_weight(eigen_maps(sub, ksp.extent(Dim::X), ksp.extent(Dim::Y), nsets), 0.85);
}

KTensor first_sets(KTensor const &maps, Index n)
{
  Index const nx = maps.extent(Dim::X);
  Index const ny = maps.extent(Dim::Y);
  Index const nc = maps.extent(Dim::Coil);
  KTensor out = KTensor::image(nx, ny, nc, n);
  for (Index s = 0; s < n; s++) {
    for (Index c = 0; c < nc; c++) {
      for (Index y = 0; y < ny; y++) {
        for (Index x = 0; x < nx; x++) {
          out(x, y, c, s) = maps(x, y, c, s);
        }
      }
    }
  }
  return out;
}

RealImage doubled_angle_error(KTensor const &maps, KTensor const &truth_maps)
{
  Index const nx = maps.extent(Dim::X);
  Index const ny = maps.extent(Dim::Y);
  RealImage err(nx, ny);
  for (Index y = 0; y < ny; y++) {
    for (Index x = 0; x < nx; x++) {
      Cxd s{0.0, 0.0};
      for (Index c = 0; c < maps.extent(Dim::Coil); c++) {
        s += Cxd(maps(x, y, c, 0)) * std::conj(Cxd(truth_maps(x, y, c)));
      }
      err(x, y) = static_cast<float>(std::abs(std::arg(s * s)));
    }
  }
  return err;
}

KTensor disc_object_coils(Index n, Index ncoils, std::mt19937_64 &rng)
{
  KTensor coils = smooth_coil_images(n, ncoils, rng);
  float const r = 0.35f * static_cast<float>(n);
  for (Index c = 0; c < ncoils; c++) {
    for (Index y = 0; y < n; y++) {
      for (Index x = 0; x < n; x++) {
        float const dx = static_cast<float>(x - n / 2);
        float const dy = static_cast<float>(y - n / 2);
        if (dx * dx + dy * dy > r * r) {
          coils(x, y, c) = Cx{0.f, 0.f};
        }
      }
    }
  }
  return coils;
}

} // namespace vcc::testing
