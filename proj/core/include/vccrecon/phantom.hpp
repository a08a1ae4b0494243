#pragma once

#include "vccrecon/ktensor.hpp"

#include <cstdint>

namespace vcc {

struct PhantomOptions
{
  Index grid = 96;
  Index ncoils = 8;
  int hf_blobs = 0;
  std::uint64_t seed = 42;
  float blob_radius = 4.f;             // pixels, at most 6
  float blob_ramp = 2.f * 3.14159265f; // total phase change across a blob, at least pi
  float coil_width = 0.4f;             // Gaussian sigma of each coil, fraction of the grid
  float phase_peak = 0.5f * 3.14159265f; // max |smooth phase| over the object
};

/// Ground truth for the simulator: |rho|, the split image phase and the physical coils.
struct PhantomTruth
{
  RealImage magnitude;
  RealImage smooth_phase; // radians, low-order and band-limited
  RealImage hf_phase;     // radians, nonzero only inside the blobs
  KTensor coils;          // (x, y, coil)
  Mask support;
  Mask blobs; // union of blob discs

  Index grid() const { return magnitude.rows(); }
  Index ncoils() const { return coils.extent(Dim::Coil); }
};

PhantomTruth make_phantom(PhantomOptions const &opts);

/// exp(i psi) c_j, the maps that make the image real. Includes hf_phase.
KTensor phase_maps(PhantomTruth const &truth);
/// Same as phase_maps but with only the smooth phase component.
KTensor smooth_phase_maps(PhantomTruth const &truth);
/// |rho| exp(i psi) c_j, the fully sampled coil images.
KTensor coil_images(PhantomTruth const &truth);
/// y_j = fftc(|rho| exp(i psi) c_j), (x, y, coil).
KTensor simulate_kspace(PhantomTruth const &truth);

/// Binary dilation with a disc of the given radius.
Mask dilate(Mask const &mask, int radius);

} // namespace vcc
