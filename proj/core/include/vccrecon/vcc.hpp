#pragma once

#include "vccrecon/espirit.hpp"

#include <span>
#include <vector>

namespace vcc {

/// k-space with N physical channels followed by N virtual conjugate channels.
struct VccKSpace
{
  KTensor data; // (x, y, coil) with 2N coils
  Index n_physical = 0;
};

/// conj(y(-k)) per channel, with -k taken as index negation modulo the extent.
KTensor flip_conjugate(KTensor const &ksp);

/// Appends the virtual conjugate channels: channel N + j is flip_conjugate of channel j.
VccKSpace make_vcc(KTensor const &ksp);

/// ACS data for calibrating on VCC k-space sampled over a centred acs x acs block: the part of
/// the block that is closed under k -> -k. For even acs this drops the first row and column,
/// whose mirror images lie outside the sampled block.
KTensor vcc_calibration_block(KTensor const &vcc_ksp, Index acs);

/// Per-pixel phase phi (radians, principal branch in (-pi/2, pi/2]) and where it is defined.
struct PhaseMap
{
  RealImage phi;
  Mask valid;
};

/// phi = 1/2 arg sum_{j<N} c_j c_{N+j} for one map set of 2N-channel maps.
/// Pixels where |sum| < 1e-8 of its maximum are marked invalid and get phi = 0. The sum is
/// taken over the unit-normalized coil vector, so eigenvalue weighting does not change validity.
PhaseMap estimate_phase(SensitivityMaps const &maps, Index set);

/// Multiplies every channel of each set by exp(-i phi_s); phases.size() must equal nsets.
SensitivityMaps rotate_phase(SensitivityMaps const &maps, std::span<PhaseMap const> phases);

/// Keeps the first `n_physical` channels.
SensitivityMaps physical_channels(SensitivityMaps const &maps, Index n_physical);

struct CenteredMaps
{
  std::vector<PhaseMap> phase; // one per set
  SensitivityMaps maps;        // N physical channels, all sets
};

/// Phase centering of a single set: (phi, rotated physical maps with one set).
std::pair<PhaseMap, SensitivityMaps> center_phase(SensitivityMaps const &maps, Index set);
/// Phase centering of every set independently.
CenteredMaps center_phase(SensitivityMaps const &maps);

/// Flips the sign of each set's coil vector wherever Re<maps(x), reference(x)> < 0.
/// The reference uses its set s if present, otherwise its set 0.
SensitivityMaps align_sign(SensitivityMaps const &maps, SensitivityMaps const &reference);

/// max over masked pixels of ||c_{N+j} - conj(c_j)|| / ||c|| for one set of centred 2N-channel maps.
/// An empty mask means every pixel.
double check_conjugate_pairing(SensitivityMaps const &maps, Index set, Mask const &support = {});

} // namespace vcc
