#pragma once

#include "vccrecon/espirit.hpp"

namespace vcc {

/// Residual coil images, their root-sum-of-squares and a relative RMS over the support.
struct ErrorMap
{
  KTensor per_coil;   // (x, y, coil)
  RealImage combined; // sqrt(sum_j |E_j|^2)
  double scalar = 0.0;
};

/// scalar = ||combined||_support / ||reference||_support, or the plain RMS of `combined`
/// over the support when the reference has no energy there. An empty support means all pixels.
ErrorMap make_error_map(KTensor residual, KTensor const &reference, Mask const &support);

/// Low-resolution maps straight from the k-space centre: taper the central `acs` block
/// (raised cosine over its outer 25%), inverse FFT per coil, divide by the coil RSS.
SensitivityMaps direct_maps(KTensor const &ksp, Index acs);

enum class ProjectionMode
{
  Complex,
  Real,
};

struct Projection
{
  KTensor projected;
  ErrorMap error;
};

/// Per-pixel projection of coil images onto the span of the maps.
///
///   complex: P m = c (c^H m) / |c|^2
///   real:    P m = c Re(c^H m) / |c|^2
///
/// Multiple sets are handled by summing the per-set projections. Pixels where a set's
/// norm is below 1e-8 of the largest norm contribute nothing.
Projection project(KTensor const &coils, KTensor const &maps, ProjectionMode mode, Mask const &support = {});

/// Per-coil difference recon - reference and its RSS error map.
ErrorMap diff_image(KTensor const &recon_coils, KTensor const &reference_coils, Mask const &support = {});

/// ||a - b|| / ||b|| over the masked pixels (all coils and sets). Empty mask = all pixels.
double nrmse(KTensor const &a, KTensor const &b, Mask const &support = {});

/// Root-sum-of-squares over coils (and sets).
RealImage rss(KTensor const &t);

/// Largest |finite difference| of an image along x; a simple edge-sharpness measure.
double edge_sharpness(RealImage const &img, Mask const &region = {});

} // namespace vcc
