#pragma once

#include "vccrecon/types.hpp"

#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace vcc {

struct DimExtent
{
  Dim name;
  Index extent;

  friend bool operator==(DimExtent const &, DimExtent const &) = default;
};

/// Complex multi-dimensional array with named dimensions, stored first-dimension-fastest.
///
/// Dimensions may appear in any order, but every routine in this library produces them
/// in the canonical order x, y, coil, set. Dimensions that are absent behave as extent 1
/// for element access.
class KTensor
{
public:
  KTensor() = default;
  explicit KTensor(std::vector<DimExtent> dims);
  KTensor(std::vector<DimExtent> dims, std::vector<Cx> data);

  /// Canonical-order tensor with extents for x, y and optionally coil and set (0 = absent).
  static KTensor image(Index nx, Index ny, Index ncoil = 0, Index nset = 0);

  std::span<DimExtent const> dims() const { return dims_; }
  Index ndims() const { return static_cast<Index>(dims_.size()); }
  bool has(Dim d) const;
  /// Extent of a named dimension, 1 when absent.
  Index extent(Dim d) const;
  Index size() const { return static_cast<Index>(data_.size()); }

  std::span<Cx> data() { return data_; }
  std::span<Cx const> data() const { return data_; }

  Cx &operator()(Index x, Index y, Index c = 0, Index s = 0)
  {
    return data_[static_cast<std::size_t>(x * stride_[0] + y * stride_[1] + c * stride_[2] + s * stride_[3])];
  }
  Cx const &operator()(Index x, Index y, Index c = 0, Index s = 0) const
  {
    return data_[static_cast<std::size_t>(x * stride_[0] + y * stride_[1] + c * stride_[2] + s * stride_[3])];
  }

  /// Stride (in elements) of a named dimension, 0 when absent.
  Index stride(Dim d) const { return stride_[static_cast<int>(d)]; }

  bool same_shape(KTensor const &other) const { return dims_ == other.dims_; }
  bool all_finite() const;

  void set_zero();

  friend bool operator==(KTensor const &a, KTensor const &b) = default;

private:
  void init_strides();

  std::vector<DimExtent> dims_;
  std::vector<Cx> data_;
  Index stride_[4] = {0, 0, 0, 0};
};

/// Throws DataError unless t has dimensions x and y with even extents.
void require_even_grid(KTensor const &t);
/// Throws DataError unless t's dims are exactly the listed names, in that order.
void require_dims(KTensor const &t, std::initializer_list<Dim> names, char const *what);

KTensor real_to_ktensor(RealImage const &img);
RealImage real_part(KTensor const &t, Index coil = 0, Index set = 0);

/// L2 norm accumulated in double precision.
double norm(std::span<Cx const> v);
Cxd dot(std::span<Cx const> a, std::span<Cx const> b); // sum conj(a) * b

} // namespace vcc
