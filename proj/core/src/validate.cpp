#include "vccrecon/validate.hpp"

#include "vccrecon/fft.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace vcc {

namespace {

bool in_support(Mask const &support, Index x, Index y) { return support.size() == 0 || support(x, y); }

void check_support(Mask const &support, Index nx, Index ny)
{
  if (support.size() > 0 && (support.rows() != nx || support.cols() != ny)) {
    throw DataError("support mask does not match the image grid");
  }
}

// Symmetric about DC (index n/2): 1 over the inner 75% of the half-width, then a raised cosine to 0.
double taper(Index i, Index n)
{
  double const half = 0.5 * static_cast<double>(n);
  double const u = std::abs(static_cast<double>(i) - half) / half;
  if (u <= 0.75) {
    return 1.0;
  }
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (u - 0.75) / 0.25));
}

} // namespace

ErrorMap make_error_map(KTensor residual, KTensor const &reference, Mask const &support)
{
  if (!residual.same_shape(reference)) {
    throw DataError("error map: residual and reference differ in shape");
  }
  Index const nx = residual.extent(Dim::X);
  Index const ny = residual.extent(Dim::Y);
  check_support(support, nx, ny);
  Index const nc = residual.extent(Dim::Coil);
  Index const ns = residual.extent(Dim::Set);

  ErrorMap e;
  e.combined = RealImage::Zero(nx, ny);
  double err = 0.0;
  double ref = 0.0;
  Index npix = 0;
  for (Index y = 0; y < ny; y++) {
    for (Index x = 0; x < nx; x++) {
      double se = 0.0;
      double sr = 0.0;
      for (Index s = 0; s < ns; s++) {
        for (Index c = 0; c < nc; c++) {
          se += std::norm(Cxd(residual(x, y, c, s)));
          sr += std::norm(Cxd(reference(x, y, c, s)));
        }
      }
      e.combined(x, y) = static_cast<float>(std::sqrt(se));
      if (in_support(support, x, y)) {
        err += se;
        ref += sr;
        npix++;
      }
    }
  }
  if (ref > 0.0) {
    e.scalar = std::sqrt(err / ref);
  } else {
    e.scalar = npix > 0 ? std::sqrt(err / static_cast<double>(npix)) : 0.0;
  }
  e.per_coil = std::move(residual);
  return e;
}

SensitivityMaps direct_maps(KTensor const &ksp, Index acs)
{
  require_even_grid(ksp);
  Index const nx = ksp.extent(Dim::X);
  Index const ny = ksp.extent(Dim::Y);
  Index const nc = ksp.extent(Dim::Coil);
  if (acs < 2 || acs > nx || acs > ny) {
    throw DataError(fmt::format("ACS size {} does not fit the {}x{} grid", acs, nx, ny));
  }
  KTensor lowres = KTensor::image(nx, ny, nc);
  Index const x0 = nx / 2 - acs / 2;
  Index const y0 = ny / 2 - acs / 2;
  for (Index c = 0; c < nc; c++) {
    for (Index y = 0; y < acs; y++) {
      for (Index x = 0; x < acs; x++) {
        auto const w = static_cast<float>(taper(x, acs) * taper(y, acs));
        lowres(x0 + x, y0 + y, c) = w * ksp(x0 + x, y0 + y, c);
      }
    }
  }
  ifftc_inplace(lowres, kSpatial);

  RealImage const norms = rss(lowres);
  float const peak = norms.maxCoeff();
  SensitivityMaps out;
  out.maps = KTensor::image(nx, ny, nc, 1);
  out.eigenvalues = {RealImage::Zero(nx, ny)};
  for (Index y = 0; y < ny; y++) {
    for (Index x = 0; x < nx; x++) {
      float const n = norms(x, y);
      if (!(peak > 0.f) || n < 1e-8f * peak) {
        continue;
      }
      for (Index c = 0; c < nc; c++) {
        out.maps(x, y, c, 0) = lowres(x, y, c) / n;
      }
      out.eigenvalues[0](x, y) = 1.f;
    }
  }
  return out;
}

Projection project(KTensor const &coils, KTensor const &maps, ProjectionMode mode, Mask const &support)
{
  Index const nx = coils.extent(Dim::X);
  Index const ny = coils.extent(Dim::Y);
  Index const nc = coils.extent(Dim::Coil);
  Index const ns = maps.extent(Dim::Set);
  if (maps.extent(Dim::X) != nx || maps.extent(Dim::Y) != ny || maps.extent(Dim::Coil) != nc ||
      coils.extent(Dim::Set) != 1) {
    throw DataError("project: coil images and maps differ in shape");
  }

  double peak = 0.0;
  for (Index s = 0; s < ns; s++) {
    for (Index y = 0; y < ny; y++) {
      for (Index x = 0; x < nx; x++) {
        double n2 = 0.0;
        for (Index c = 0; c < nc; c++) {
          n2 += std::norm(Cxd(maps(x, y, c, s)));
        }
        peak = std::max(peak, std::sqrt(n2));
      }
    }
  }
  double const floor = 1e-8 * peak;

  KTensor projected = KTensor::image(nx, ny, nc);
  for (Index y = 0; y < ny; y++) {
    for (Index x = 0; x < nx; x++) {
      for (Index s = 0; s < ns; s++) {
        double n2 = 0.0;
        Cxd inner{0.0, 0.0};
        for (Index c = 0; c < nc; c++) {
          Cxd const m(maps(x, y, c, s));
          n2 += std::norm(m);
          inner += std::conj(m) * Cxd(coils(x, y, c));
        }
        if (peak == 0.0 || std::sqrt(n2) < floor) {
          continue;
        }
        if (mode == ProjectionMode::Real) {
          inner = Cxd{inner.real(), 0.0};
        }
        Cxd const coeff = inner / n2;
        for (Index c = 0; c < nc; c++) {
          projected(x, y, c) += Cx(Cxd(maps(x, y, c, s)) * coeff);
        }
      }
    }
  }

  KTensor residual = coils;
  for (Index i = 0; i < residual.size(); i++) {
    residual.data()[static_cast<std::size_t>(i)] -= projected.data()[static_cast<std::size_t>(i)];
  }
  Projection p;
  p.error = make_error_map(std::move(residual), coils, support);
  p.projected = std::move(projected);
  return p;
}

ErrorMap diff_image(KTensor const &recon_coils, KTensor const &reference_coils, Mask const &support)
{
  if (!recon_coils.same_shape(reference_coils)) {
    throw DataError("diff_image: inputs differ in shape");
  }
  KTensor d = recon_coils;
  for (Index i = 0; i < d.size(); i++) {
    d.data()[static_cast<std::size_t>(i)] -= reference_coils.data()[static_cast<std::size_t>(i)];
  }
  return make_error_map(std::move(d), reference_coils, support);
}

double nrmse(KTensor const &a, KTensor const &b, Mask const &support)
{
  if (!a.same_shape(b)) {
    throw DataError("nrmse: inputs differ in shape");
  }
  Index const nx = a.extent(Dim::X);
  Index const ny = a.extent(Dim::Y);
  check_support(support, nx, ny);
  double num = 0.0;
  double den = 0.0;
  for (Index s = 0; s < a.extent(Dim::Set); s++) {
    for (Index c = 0; c < a.extent(Dim::Coil); c++) {
      for (Index y = 0; y < ny; y++) {
        for (Index x = 0; x < nx; x++) {
          if (!in_support(support, x, y)) {
            continue;
          }
          num += std::norm(Cxd(a(x, y, c, s)) - Cxd(b(x, y, c, s)));
          den += std::norm(Cxd(b(x, y, c, s)));
        }
      }
    }
  }
  if (!(den > 0.0)) {
    throw DataError("nrmse: reference has zero norm");
  }
  return std::sqrt(num / den);
}

RealImage rss(KTensor const &t)
{
  Index const nx = t.extent(Dim::X);
  Index const ny = t.extent(Dim::Y);
  RealImage out = RealImage::Zero(nx, ny);
  for (Index y = 0; y < ny; y++) {
    for (Index x = 0; x < nx; x++) {
      double s2 = 0.0;
      for (Index s = 0; s < t.extent(Dim::Set); s++) {
        for (Index c = 0; c < t.extent(Dim::Coil); c++) {
          s2 += std::norm(Cxd(t(x, y, c, s)));
        }
      }
      out(x, y) = static_cast<float>(std::sqrt(s2));
    }
  }
  return out;
}

double edge_sharpness(RealImage const &img, Mask const &region)
{
  double best = 0.0;
  for (Index y = 0; y < img.cols(); y++) {
    for (Index x = 0; x + 1 < img.rows(); x++) {
      if (region.size() > 0 && !region(x, y) && !region(x + 1, y)) {
        continue;
      }
      best = std::max(best, static_cast<double>(std::abs(img(x + 1, y) - img(x, y))));
    }
  }
  return best;
}

} // namespace vcc
