#include "vccrecon/recon.hpp"

#include "vccrecon/fft.hpp"

#include <fmt/format.h>

#include <cmath>

namespace vcc {

namespace {

void axpy(Cx a, std::span<Cx const> x, std::span<Cx> y)
{
  for (std::size_t i = 0; i < y.size(); i++) {
    y[i] += a * x[i];
  }
}

double real_dot(std::span<Cx const> a, std::span<Cx const> b) { return dot(a, b).real(); }

double imag_energy(std::span<Cx const> v)
{
  double s = 0.0;
  for (auto const &z : v) {
    s += static_cast<double>(z.imag()) * z.imag();
  }
  return s;
}

void drop_imag(KTensor &t)
{
  for (auto &z : t.data()) {
    z = Cx{z.real(), 0.f};
  }
}

} // namespace

SolveMode parse_solve_mode(std::string_view name)
{
  if (name == "complex") {
    return SolveMode::Complex;
  }
  if (name == "real") {
    return SolveMode::Real;
  }
  if (name == "imagreg") {
    return SolveMode::ImagRegularized;
  }
  throw std::invalid_argument(fmt::format("unknown solve mode '{}'", name));
}

std::string_view solve_mode_name(SolveMode m)
{
  switch (m) {
  case SolveMode::Complex: return "complex";
  case SolveMode::Real: return "real";
  case SolveMode::ImagRegularized: return "imagreg";
  }
  return "?";
}

void ForwardModel::validate() const
{
  if (!maps.has(Dim::X) || !maps.has(Dim::Y) || !maps.has(Dim::Coil)) {
    throw DataError("forward model maps must be (x, y, coil[, set])");
  }
  if (pattern.nx() != nx() || pattern.ny() != ny()) {
    throw DataError(
      fmt::format("sampling pattern {}x{} does not match maps {}x{}", pattern.nx(), pattern.ny(), nx(), ny()));
  }
  if (!std::isfinite(lambda_tikhonov) || lambda_tikhonov < 0.0 || !std::isfinite(lambda_imag) || lambda_imag < 0.0) {
    throw DataError("regularization weights must be finite and non-negative");
  }
}

KTensor synthesize_coil_images(KTensor const &image, KTensor const &maps)
{
  Index const nx = maps.extent(Dim::X);
  Index const ny = maps.extent(Dim::Y);
  Index const nc = maps.extent(Dim::Coil);
  Index const ns = maps.extent(Dim::Set);
  if (image.extent(Dim::X) != nx || image.extent(Dim::Y) != ny || image.extent(Dim::Set) != ns ||
      image.extent(Dim::Coil) != 1) {
    throw DataError("synthesize_coil_images: image (x, y, set) does not match the maps");
  }
  KTensor out = KTensor::image(nx, ny, nc);
  for (Index s = 0; s < ns; s++) {
    for (Index c = 0; c < nc; c++) {
      for (Index y = 0; y < ny; y++) {
        for (Index x = 0; x < nx; x++) {
          out(x, y, c) += maps(x, y, c, s) * image(x, y, 0, s);
        }
      }
    }
  }
  return out;
}

KTensor forward(ForwardModel const &model, KTensor const &image)
{
  model.validate();
  KTensor coils;
  if (model.mode == SolveMode::Real) {
    KTensor re = image;
    drop_imag(re);
    coils = synthesize_coil_images(re, model.maps);
  } else {
    coils = synthesize_coil_images(image, model.maps);
  }
  fftc_inplace(coils, kSpatial);
  auto const &mask = model.pattern.mask;
  for (Index c = 0; c < model.ncoils(); c++) {
    for (Index y = 0; y < model.ny(); y++) {
      for (Index x = 0; x < model.nx(); x++) {
        if (!mask(x, y)) {
          coils(x, y, c) = Cx{0.f, 0.f};
        }
      }
    }
  }
  return coils;
}

KTensor adjoint(ForwardModel const &model, KTensor const &ksp)
{
  model.validate();
  if (ksp.extent(Dim::X) != model.nx() || ksp.extent(Dim::Y) != model.ny() ||
      ksp.extent(Dim::Coil) != model.ncoils() || ksp.extent(Dim::Set) != 1) {
    throw DataError("adjoint: k-space does not match the model");
  }
  KTensor coils = KTensor::image(model.nx(), model.ny(), model.ncoils());
  auto const &mask = model.pattern.mask;
  for (Index c = 0; c < model.ncoils(); c++) {
    for (Index y = 0; y < model.ny(); y++) {
      for (Index x = 0; x < model.nx(); x++) {
        if (mask(x, y)) {
          coils(x, y, c) = ksp(x, y, c);
        }
      }
    }
  }
  ifftc_inplace(coils, kSpatial);
  KTensor image = KTensor::image(model.nx(), model.ny(), 0, model.nsets());
  for (Index s = 0; s < model.nsets(); s++) {
    for (Index c = 0; c < model.ncoils(); c++) {
      for (Index y = 0; y < model.ny(); y++) {
        for (Index x = 0; x < model.nx(); x++) {
          image(x, y, 0, s) += std::conj(model.maps(x, y, c, s)) * coils(x, y, c);
        }
      }
    }
  }
  if (model.mode == SolveMode::Real) {
    drop_imag(image);
  }
  return image;
}

double normal_operator_norm(ForwardModel const &model, int iterations)
{
  KTensor v = KTensor::image(model.nx(), model.ny(), 0, model.nsets());
  for (auto &z : v.data()) {
    z = Cx{1.f, 0.f};
  }
  double lambda = 0.0;
  for (int i = 0; i < iterations; i++) {
    double const n = norm(v.data());
    if (n == 0.0) {
      return 0.0;
    }
    for (auto &z : v.data()) {
      z /= static_cast<float>(n);
    }
    KTensor const w = adjoint(model, forward(model, v));
    lambda = real_dot(v.data(), w.data());
    v = w;
  }
  return lambda;
}

ReconResult solve(ForwardModel const &model, KTensor const &ksp_in, SolveOptions const &opts)
{
  model.validate();
  if (opts.max_iter < 1 || !(opts.tol >= 0.0)) {
    throw std::invalid_argument("solver needs max_iter >= 1 and tol >= 0");
  }
  KTensor const y = apply_pattern(ksp_in, model.pattern);
  double const y_norm = norm(y.data());

  ReconResult res;
  res.image = KTensor::image(model.nx(), model.ny(), 0, model.nsets());
  res.residual_history.push_back(1.0);
  if (y_norm == 0.0) {
    res.converged = true;
    return res;
  }

  double const scale = normal_operator_norm(model);
  double const lt = model.lambda_tikhonov * scale;
  double const li = model.mode == SolveMode::ImagRegularized ? model.lambda_imag * scale : 0.0;

  auto regularize = [&](KTensor const &p, KTensor &q) {
    auto const pd = p.data();
    auto qd = q.data();
    for (std::size_t i = 0; i < qd.size(); i++) {
      qd[i] += static_cast<float>(lt) * pd[i] + Cx{0.f, static_cast<float>(li) * pd[i].imag()};
    }
  };

  KTensor &x = res.image;
  KTensor ax = KTensor::image(model.nx(), model.ny(), model.ncoils());
  KTensor r = adjoint(model, y);
  KTensor p = r;
  double const b_norm = norm(r.data());
  double rr = real_dot(r.data(), r.data());
  if (b_norm == 0.0) {
    res.converged = true;
    return res;
  }

  for (int it = 0; it < opts.max_iter; it++) {
    KTensor const ap = forward(model, p);
    KTensor q = adjoint(model, ap);
    regularize(p, q);
    double const pq = real_dot(p.data(), q.data());
    if (!(pq > 0.0)) {
      break;
    }
    auto const alpha = static_cast<float>(rr / pq);
    axpy(alpha, p.data(), x.data());
    axpy(alpha, ap.data(), ax.data());
    axpy(-alpha, q.data(), r.data());
    res.iterations = it + 1;

    double misfit = 0.0;
    for (std::size_t i = 0; i < ax.data().size(); i++) {
      misfit += std::norm(Cxd(ax.data()[i]) - Cxd(y.data()[i]));
    }
    double const xn = norm(x.data());
    double const objective = misfit + lt * xn * xn + li * imag_energy(x.data());
    res.residual_history.push_back(std::sqrt(objective) / y_norm);

    double const rr_new = real_dot(r.data(), r.data());
    if (std::sqrt(rr_new) / b_norm < opts.tol) {
      res.converged = true;
      break;
    }
    auto const beta = static_cast<float>(rr_new / rr);
    rr = rr_new;
    auto pd = p.data();
    auto const rd = r.data();
    for (std::size_t i = 0; i < pd.size(); i++) {
      pd[i] = rd[i] + beta * pd[i];
    }
  }
  if (model.mode == SolveMode::Real) {
    drop_imag(x);
  }
  return res;
}

ReconResult partial_fourier_recon(ForwardModel const &model, KTensor const &ksp, SolveOptions const &opts)
{
  return solve(model, ksp, opts);
}

} // namespace vcc
