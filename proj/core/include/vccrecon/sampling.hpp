#pragma once

#include "vccrecon/ktensor.hpp"

#include <string>
#include <string_view>

namespace vcc {

struct Fraction
{
  int num = 1;
  int den = 1;

  double value() const { return static_cast<double>(num) / den; }
  bool is_one() const { return num == den; }
};

/// Cartesian undersampling mask over (x, y).
///
/// Acceleration acts on y (every accel-th line, counted from the centre line); partial
/// Fourier acts on x and keeps the first ceil(pf * nx) positions, which contain the
/// negative frequencies and DC. The ACS block is centred and fully sampled.
struct SamplingPattern
{
  Mask mask;
  int accel = 1;
  Index acs_x = 0;
  Index acs_y = 0;
  Fraction partial_fourier{1, 1};

  Index nx() const { return mask.rows(); }
  Index ny() const { return mask.cols(); }
  Index count() const { return mask.count(); }
};

SamplingPattern make_pattern(Index nx, Index ny, int accel, Index acs, Fraction pf = {1, 1});
SamplingPattern full_pattern(Index nx, Index ny);

/// Parses "R=3,acs=24[,pf=5/8]" (keys in any order, each optional).
SamplingPattern parse_pattern(std::string_view spec, Index nx, Index ny);
Fraction parse_fraction(std::string_view text);

/// Zeroes unsampled (x, y) positions, broadcasting over every other dimension.
KTensor apply_pattern(KTensor const &ksp, SamplingPattern const &p);

/// Centred acs_x by acs_y block of k-space (all coils).
KTensor extract_acs(KTensor const &ksp, Index acs_x, Index acs_y);

} // namespace vcc
