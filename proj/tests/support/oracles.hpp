#pragma once

#include "vccrecon/espirit.hpp"
#include "vccrecon/ktensor.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace vcc::testing {

/// O(N^4) centred unitary 2D DFT in double precision, computed straight from the definition.
KTensor dft2_bruteforce(KTensor const &t, bool inverse);

/// Per-pixel operators built the slow way: SVD of an independently assembled calibration
/// matrix, each kernel zero-padded onto the grid and inverse-DFT'd by brute force, then
/// sum_r v_r v_r^H scaled by grid size / kernel size.
std::vector<Eigen::MatrixXcd> dense_pixel_operators(KTensor const &acs, Index kernel, double threshold, Index nx,
                                                    Index ny);

/// Number of 4-connected components of a mask.
int count_components(Mask const &m);

/// Largest principal angle between the column spans of a and b.
double principal_angle(Eigen::MatrixXcd const &a, Eigen::MatrixXcd const &b);

KTensor random_tensor(std::vector<DimExtent> dims, std::mt19937_64 &rng);

/// Smooth random coil images on a small grid: a few low-order complex harmonics per coil.
KTensor smooth_coil_images(Index n, Index ncoils, std::mt19937_64 &rng);

} // namespace vcc::testing
