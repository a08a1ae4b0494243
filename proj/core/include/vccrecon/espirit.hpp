#pragma once

#include "vccrecon/ktensor.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vcc {

/// Orthonormal basis of the k-space patch subspace found by calibration.
///
/// Column r of `kernels` is one k x k x ncoils patch, flattened with kx fastest, then ky,
/// then coil (the same layout as a calibration-matrix row).
struct CalibSubspace
{
  Eigen::MatrixXcd kernels;
  std::vector<double> singular_values; // all of them, descending
  Index kernel_size = 0;
  Index ncoils = 0;

  Index nkernels() const { return kernels.cols(); }
};

/// Per-pixel eigenvector maps (x, y, coil, set) with the matching eigenvalues, one image per set.
struct SensitivityMaps
{
  KTensor maps;
  std::vector<RealImage> eigenvalues;

  Index nsets() const { return maps.extent(Dim::Set); }
  Index ncoils() const { return maps.extent(Dim::Coil); }
  Index nx() const { return maps.extent(Dim::X); }
  Index ny() const { return maps.extent(Dim::Y); }

  /// Eigenvalues as an (x, y, set) tensor, for writing to disk.
  KTensor eigenvalue_tensor() const;
};

struct CalibOptions
{
  Index kernel = 6;
  double threshold = 0.001; // relative to the largest singular value
};

/// Hankel-structured calibration matrix: one row per k x k window (stride 1, no wrap),
/// (acs_x - k + 1) * (acs_y - k + 1) rows and k * k * ncoils columns.
Eigen::MatrixXcd build_calib_matrix(KTensor const &acs, Index kernel);

/// SVD of the calibration matrix, keeping right singular vectors with sigma >= threshold * sigma_max.
CalibSubspace calibrate(KTensor const &acs, CalibOptions const &opts = {});

/// Per-pixel ncoils x ncoils operators G_q (Hermitian, column-major per pixel) on an nx x ny grid.
/// Built from the kernel projector in k-space and one inverse FFT per coil pair.
std::vector<Eigen::MatrixXcd> pixel_operators(CalibSubspace const &sub, Index nx, Index ny);

/// Top-`nsets` eigenpairs of G_q at every pixel. Coil 0 of each eigenvector is rotated to be
/// real and non-negative (the largest-magnitude coil where coil 0 nearly vanishes).
SensitivityMaps eigen_maps(CalibSubspace const &sub, Index nx, Index ny, Index nsets);

/// Scales each map set by a smoothstep of its eigenvalue: 0 at or below `lo`, 1 at or above 1.
SensitivityMaps soft_weight(SensitivityMaps const &maps, double lo = 0.85);
double smoothstep_weight(double lambda, double lo);

/// Rotates an eigenvector so the reference coil is real and non-negative.
void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v);

} // namespace vcc
