#include "vccrecon/vcc.hpp"

#include "vccrecon/sampling.hpp"

#include <fmt/format.h>

#include <cmath>

namespace vcc {

KTensor flip_conjugate(KTensor const &ksp)
{
  require_even_grid(ksp);
  Index const nx = ksp.extent(Dim::X);
  Index const ny = ksp.extent(Dim::Y);
  KTensor out = ksp;
  for (Index s = 0; s < ksp.extent(Dim::Set); s++) {
    for (Index c = 0; c < ksp.extent(Dim::Coil); c++) {
      for (Index y = 0; y < ny; y++) {
        for (Index x = 0; x < nx; x++) {
          out(x, y, c, s) = std::conj(ksp((nx - x) % nx, (ny - y) % ny, c, s));
        }
      }
    }
  }
  return out;
}

VccKSpace make_vcc(KTensor const &ksp)
{
  if (!ksp.has(Dim::Coil)) {
    throw DataError("make_vcc: k-space has no coil dimension");
  }
  require_dims(ksp, {Dim::X, Dim::Y, Dim::Coil}, "make_vcc");
  Index const nc = ksp.extent(Dim::Coil);
  KTensor const flipped = flip_conjugate(ksp);
  VccKSpace v;
  v.n_physical = nc;
  v.data = KTensor::image(ksp.extent(Dim::X), ksp.extent(Dim::Y), 2 * nc);
  auto const half = static_cast<std::size_t>(ksp.size());
  std::copy(ksp.data().begin(), ksp.data().end(), v.data.data().begin());
  std::copy(flipped.data().begin(), flipped.data().end(), v.data.data().begin() + static_cast<std::ptrdiff_t>(half));
  return v;
}

KTensor vcc_calibration_block(KTensor const &vcc_ksp, Index acs)
{
  Index const n = acs % 2 == 0 ? acs - 1 : acs;
  return extract_acs(vcc_ksp, n, n);
}

PhaseMap estimate_phase(SensitivityMaps const &maps, Index set)
{
  Index const nc = maps.ncoils();
  if (nc % 2 != 0) {
    throw DataError(fmt::format("phase centering needs an even channel count, got {}", nc));
  }
  if (set < 0 || set >= maps.nsets()) {
    throw DataError(fmt::format("map set {} out of range", set));
  }
  Index const n = nc / 2;
  Index const nx = maps.nx();
  Index const ny = maps.ny();
  Eigen::ArrayXXcd sum(nx, ny);
  for (Index y = 0; y < ny; y++) {
    for (Index x = 0; x < nx; x++) {
      Cxd s{0.0, 0.0};
      double n2 = 0.0;
      for (Index j = 0; j < n; j++) {
        Cxd const a(maps.maps(x, y, j, set));
        Cxd const b(maps.maps(x, y, n + j, set));
        s += a * b;
        n2 += std::norm(a) + std::norm(b);
      }
      sum(x, y) = n2 > 0.0 ? s / n2 : Cxd{0.0, 0.0};
    }
  }
  double const peak = sum.abs().maxCoeff();
  PhaseMap pm{RealImage::Zero(nx, ny), Mask::Constant(nx, ny, false)};
  for (Index y = 0; y < ny; y++) {
    for (Index x = 0; x < nx; x++) {
      double const mag = std::abs(sum(x, y));
      if (peak > 0.0 && mag >= 1e-8 * peak) {
        // arg in (-pi, pi], so phi in (-pi/2, pi/2].
        pm.phi(x, y) = static_cast<float>(0.5 * std::arg(sum(x, y)));
        pm.valid(x, y) = true;
      }
    }
  }
  return pm;
}

SensitivityMaps rotate_phase(SensitivityMaps const &maps, std::span<PhaseMap const> phases)
{
  if (static_cast<Index>(phases.size()) != maps.nsets()) {
    throw DataError("rotate_phase needs one phase map per set");
  }
  SensitivityMaps out = maps;
  for (Index s = 0; s < maps.nsets(); s++) {
    auto const &pm = phases[static_cast<std::size_t>(s)];
    if (pm.phi.rows() != maps.nx() || pm.phi.cols() != maps.ny()) {
      throw DataError("phase map geometry does not match the maps");
    }
    for (Index y = 0; y < maps.ny(); y++) {
      for (Index x = 0; x < maps.nx(); x++) {
        if (!pm.valid(x, y)) {
          continue;
        }
        Cx const rot = std::polar(1.f, -pm.phi(x, y));
        for (Index c = 0; c < maps.ncoils(); c++) {
          out.maps(x, y, c, s) *= rot;
        }
      }
    }
  }
  return out;
}

SensitivityMaps physical_channels(SensitivityMaps const &maps, Index n_physical)
{
  if (n_physical < 1 || n_physical > maps.ncoils()) {
    throw DataError("physical channel count out of range");
  }
  SensitivityMaps out;
  out.eigenvalues = maps.eigenvalues;
  out.maps = KTensor::image(maps.nx(), maps.ny(), n_physical, maps.nsets());
  for (Index s = 0; s < maps.nsets(); s++) {
    for (Index c = 0; c < n_physical; c++) {
      for (Index y = 0; y < maps.ny(); y++) {
        for (Index x = 0; x < maps.nx(); x++) {
          out.maps(x, y, c, s) = maps.maps(x, y, c, s);
        }
      }
    }
  }
  return out;
}

std::pair<PhaseMap, SensitivityMaps> center_phase(SensitivityMaps const &maps, Index set)
{
  PhaseMap pm = estimate_phase(maps, set);
  SensitivityMaps single;
  single.maps = KTensor::image(maps.nx(), maps.ny(), maps.ncoils(), 1);
  single.eigenvalues = {maps.eigenvalues.at(static_cast<std::size_t>(set))};
  for (Index c = 0; c < maps.ncoils(); c++) {
    for (Index y = 0; y < maps.ny(); y++) {
      for (Index x = 0; x < maps.nx(); x++) {
        single.maps(x, y, c, 0) = maps.maps(x, y, c, set);
      }
    }
  }
  SensitivityMaps rotated = rotate_phase(single, std::span<PhaseMap const>(&pm, 1));
  return {std::move(pm), physical_channels(rotated, maps.ncoils() / 2)};
}

CenteredMaps center_phase(SensitivityMaps const &maps)
{
  CenteredMaps out;
  for (Index s = 0; s < maps.nsets(); s++) {
    out.phase.push_back(estimate_phase(maps, s));
  }
  out.maps = physical_channels(rotate_phase(maps, out.phase), maps.ncoils() / 2);
  return out;
}

SensitivityMaps align_sign(SensitivityMaps const &maps, SensitivityMaps const &reference)
{
  if (maps.nx() != reference.nx() || maps.ny() != reference.ny() || maps.ncoils() != reference.ncoils()) {
    throw DataError("align_sign: maps and reference differ in shape");
  }
  SensitivityMaps out = maps;
  for (Index s = 0; s < maps.nsets(); s++) {
    Index const rs = s < reference.nsets() ? s : 0;
    for (Index y = 0; y < maps.ny(); y++) {
      for (Index x = 0; x < maps.nx(); x++) {
        double inner = 0.0;
        for (Index c = 0; c < maps.ncoils(); c++) {
          inner += std::real(Cxd(maps.maps(x, y, c, s)) * std::conj(Cxd(reference.maps(x, y, c, rs))));
        }
        if (inner < 0.0) {
          for (Index c = 0; c < maps.ncoils(); c++) {
            out.maps(x, y, c, s) = -out.maps(x, y, c, s);
          }
        }
      }
    }
  }
  return out;
}

double check_conjugate_pairing(SensitivityMaps const &maps, Index set, Mask const &support)
{
  Index const nc = maps.ncoils();
  if (nc % 2 != 0) {
    throw DataError("conjugate pairing needs an even channel count");
  }
  Index const n = nc / 2;
  double worst = 0.0;
  for (Index y = 0; y < maps.ny(); y++) {
    for (Index x = 0; x < maps.nx(); x++) {
      if (support.size() > 0 && !support(x, y)) {
        continue;
      }
      double diff = 0.0;
      double total = 0.0;
      for (Index j = 0; j < n; j++) {
        Cxd const a(maps.maps(x, y, j, set));
        Cxd const b(maps.maps(x, y, n + j, set));
        diff += std::norm(b - std::conj(a));
        total += std::norm(a) + std::norm(b);
      }
      if (total > 0.0) {
        worst = std::max(worst, std::sqrt(diff / total));
      }
    }
  }
  return worst;
}

} // namespace vcc
