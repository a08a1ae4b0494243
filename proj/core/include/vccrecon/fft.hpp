#pragma once

#include "vccrecon/ktensor.hpp"

#include <initializer_list>
#include <span>

namespace vcc {

/// Centered, unitary forward DFT along the named dimensions.
///
/// DC sits at index N/2 (zero-indexed) in both domains and every transformed dimension is
/// scaled by 1/sqrt(N). With this convention negating an index modulo N negates the spatial
/// frequency, which is what the conjugate flip in make_vcc relies on. Transformed extents
/// must be even.
KTensor fftc(KTensor const &t, std::span<Dim const> dims);
KTensor ifftc(KTensor const &t, std::span<Dim const> dims);

inline KTensor fftc(KTensor const &t, std::initializer_list<Dim> dims)
{
  return fftc(t, std::span<Dim const>(dims.begin(), dims.size()));
}
inline KTensor ifftc(KTensor const &t, std::initializer_list<Dim> dims)
{
  return ifftc(t, std::span<Dim const>(dims.begin(), dims.size()));
}

// In-place variants used by the iterative solvers.
void fftc_inplace(KTensor &t, std::span<Dim const> dims);
void ifftc_inplace(KTensor &t, std::span<Dim const> dims);

inline constexpr Dim kSpatial[] = {Dim::X, Dim::Y};

} // namespace vcc
