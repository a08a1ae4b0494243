#pragma once

#include "vccrecon/espirit.hpp"
#include "vccrecon/phantom.hpp"
#include "vccrecon/vcc.hpp"

#include <random>

namespace vcc::testing {

/// Phantom plus VCC-ESPIRiT calibration from its fully sampled ACS block.
struct VccRun
{
  PhantomTruth truth;
  KTensor ksp;
  KTensor coils; // ifftc of the fully sampled k-space
  CalibSubspace sub;
  SensitivityMaps raw;      // 2N channels, before centring
  CenteredMaps centered;    // N channels, unit norm
  SensitivityMaps weighted; // centred and soft-weighted
};

VccRun make_run(PhantomOptions const &opts, Index acs = 24, Index kernel = 6, Index nsets = 2);

/// Cached runs on the default 96 x 96, 8-coil, seed 42 phantom.
VccRun const &smooth_run();
VccRun const &blob_run(); // 3 blobs

/// Conventional ESPIRiT maps on the physical channels, soft-weighted.
SensitivityMaps conventional_maps(KTensor const &ksp, Index acs, Index kernel, Index nsets);

/// The first n sets of a maps tensor.
KTensor first_sets(KTensor const &maps, Index n);

/// Per-pixel doubled-angle error between the phase of estimated and true maps, in [0, pi].
RealImage doubled_angle_error(KTensor const &maps, KTensor const &truth_maps);

/// Smooth coil images times a centred disc, for small dense-oracle instances.
KTensor disc_object_coils(Index n, Index ncoils, std::mt19937_64 &rng);

/// Fraction of masked pixels where pred holds.
template <class Pred>
double fraction(Mask const &mask, Pred pred)
{
  Index hit = 0;
  Index total = 0;
  for (Index y = 0; y < mask.cols(); y++) {
    for (Index x = 0; x < mask.rows(); x++) {
      if (mask(x, y)) {
        total++;
        hit += pred(x, y) ? 1 : 0;
      }
    }
  }
  return total > 0 ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

} // namespace vcc::testing
