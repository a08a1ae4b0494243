#pragma once

#include "vccrecon/ktensor.hpp"
#include "vccrecon/sampling.hpp"

#include <string_view>
#include <vector>

namespace vcc {

enum class SolveMode
{
  Complex,         // unconstrained complex image
  Real,            // real-valued image per pixel and set
  ImagRegularized, // complex image with a penalty on its imaginary part
};

SolveMode parse_solve_mode(std::string_view name); // "complex", "real", "imagreg"
std::string_view solve_mode_name(SolveMode m);

/// A = mask . fftc . sum_s maps_s, acting on S component images.
///
/// Regularization weights are relative to the largest eigenvalue of A^H A (estimated by
/// power iteration), so they do not depend on the data or map scaling.
struct ForwardModel
{
  KTensor maps; // (x, y, coil, set)
  SamplingPattern pattern;
  SolveMode mode = SolveMode::Complex;
  double lambda_tikhonov = 1e-4;
  double lambda_imag = 1e-2;

  Index nx() const { return maps.extent(Dim::X); }
  Index ny() const { return maps.extent(Dim::Y); }
  Index ncoils() const { return maps.extent(Dim::Coil); }
  Index nsets() const { return maps.extent(Dim::Set); }

  /// Throws DataError on inconsistent geometry or invalid weights.
  void validate() const;
};

/// Coil k-space of S component images (x, y, set). In Real mode the imaginary part of the
/// input is ignored, so forward and adjoint are a pair under the real inner product.
KTensor forward(ForwardModel const &model, KTensor const &image);
/// (x, y, set); in Real mode only the real part is kept.
KTensor adjoint(ForwardModel const &model, KTensor const &ksp);

/// Largest eigenvalue of A^H A for the model's variable space.
double normal_operator_norm(ForwardModel const &model, int iterations = 20);

struct SolveOptions
{
  int max_iter = 100;
  double tol = 1e-6;
};

struct ReconResult
{
  KTensor image; // (x, y, set)
  int iterations = 0;
  /// sqrt(||A x - y||^2 + penalties) / ||y|| after every iteration, starting with x = 0.
  std::vector<double> residual_history;
  /// False when max_iter was reached before the normal-equation residual fell below tol.
  bool converged = false;
};

/// Conjugate gradients on (A^H A + lambda_t I + lambda_i Im) x = A^H y, using the real inner
/// product so the same iteration serves the complex, real and imaginary-penalized variables.
ReconResult solve(ForwardModel const &model, KTensor const &ksp, SolveOptions const &opts = {});

/// Same solver. The real and imaginary-penalized modes are what fill the missing half of k-space.
ReconResult partial_fourier_recon(ForwardModel const &model, KTensor const &ksp, SolveOptions const &opts = {});

/// m_j = sum_s maps[j, s] image[s], (x, y, coil).
KTensor synthesize_coil_images(KTensor const &image, KTensor const &maps);

} // namespace vcc
