#include "vccrecon/ktensor.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace vcc {

std::string_view dim_name(Dim d)
{
  switch (d) {
  case Dim::X: return "x";
  case Dim::Y: return "y";
  case Dim::Coil: return "coil";
  case Dim::Set: return "set";
  }
  return "?";
}

KTensor::KTensor(std::vector<DimExtent> dims)
  : dims_(std::move(dims))
{
  init_strides();
  Index n = 1;
  for (auto const &d : dims_) {
    n *= d.extent;
  }
  data_.assign(static_cast<std::size_t>(n), Cx{0.f, 0.f});
}

KTensor::KTensor(std::vector<DimExtent> dims, std::vector<Cx> data)
  : dims_(std::move(dims))
  , data_(std::move(data))
{
  init_strides();
  Index n = 1;
  for (auto const &d : dims_) {
    n *= d.extent;
  }
  if (n != size()) {
    throw DataError(fmt::format("tensor extents give {} elements but {} supplied", n, size()));
  }
}

KTensor KTensor::image(Index nx, Index ny, Index ncoil, Index nset)
{
  std::vector<DimExtent> dims{{Dim::X, nx}, {Dim::Y, ny}};
  if (ncoil > 0) {
    dims.push_back({Dim::Coil, ncoil});
  }
  if (nset > 0) {
    dims.push_back({Dim::Set, nset});
  }
  return KTensor(std::move(dims));
}

void KTensor::init_strides()
{
  std::fill(std::begin(stride_), std::end(stride_), 0);
  bool seen[4] = {false, false, false, false};
  Index s = 1;
  for (auto const &d : dims_) {
    auto const i = static_cast<int>(d.name);
    if (i < 0 || i > 3) {
      throw DataError("unknown dimension tag");
    }
    if (seen[i]) {
      throw DataError(fmt::format("duplicate dimension '{}'", dim_name(d.name)));
    }
    if (d.extent < 1) {
      throw DataError(fmt::format("dimension '{}' has non-positive extent", dim_name(d.name)));
    }
    seen[i] = true;
    stride_[i] = s;
    s *= d.extent;
  }
}

bool KTensor::has(Dim d) const
{
  return std::any_of(dims_.begin(), dims_.end(), [d](DimExtent const &e) { return e.name == d; });
}

Index KTensor::extent(Dim d) const
{
  for (auto const &e : dims_) {
    if (e.name == d) {
      return e.extent;
    }
  }
  return 1;
}

bool KTensor::all_finite() const
{
  return std::all_of(data_.begin(), data_.end(), [](Cx const &v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

void KTensor::set_zero() { std::fill(data_.begin(), data_.end(), Cx{0.f, 0.f}); }

void require_even_grid(KTensor const &t)
{
  for (Dim d : {Dim::X, Dim::Y}) {
    if (!t.has(d)) {
      throw DataError(fmt::format("tensor lacks dimension '{}'", dim_name(d)));
    }
    if (t.extent(d) % 2 != 0) {
      throw DataError(fmt::format("dimension '{}' has odd extent {}", dim_name(d), t.extent(d)));
    }
  }
}

void require_dims(KTensor const &t, std::initializer_list<Dim> names, char const *what)
{
  bool ok = t.ndims() == static_cast<Index>(names.size());
  Index i = 0;
  for (Dim d : names) {
    ok = ok && t.dims()[static_cast<std::size_t>(i)].name == d;
    ++i;
  }
  if (!ok) {
    std::string want;
    for (Dim d : names) {
      want += want.empty() ? "" : ",";
      want += dim_name(d);
    }
    throw DataError(fmt::format("{}: expected dimensions ({})", what, want));
  }
}

KTensor real_to_ktensor(RealImage const &img)
{
  KTensor t = KTensor::image(img.rows(), img.cols());
  for (Index y = 0; y < img.cols(); y++) {
    for (Index x = 0; x < img.rows(); x++) {
      t(x, y) = Cx{img(x, y), 0.f};
    }
  }
  return t;
}

RealImage real_part(KTensor const &t, Index coil, Index set)
{
  RealImage img(t.extent(Dim::X), t.extent(Dim::Y));
  for (Index y = 0; y < img.cols(); y++) {
    for (Index x = 0; x < img.rows(); x++) {
      img(x, y) = t(x, y, coil, set).real();
    }
  }
  return img;
}

double norm(std::span<Cx const> v)
{
  double s = 0.0;
  for (auto const &z : v) {
    s += static_cast<double>(z.real()) * z.real() + static_cast<double>(z.imag()) * z.imag();
  }
  return std::sqrt(s);
}

Cxd dot(std::span<Cx const> a, std::span<Cx const> b)
{
  Cxd s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); i++) {
    s += std::conj(Cxd(a[i])) * Cxd(b[i]);
  }
  return s;
}

} // namespace vcc
