#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vcc {

using Index = std::ptrdiff_t;
using Cx = std::complex<float>;
using Cxd = std::complex<double>;

// Real-valued 2D images are column-major, so x is the fastest index, matching KTensor.
using RealImage = Eigen::ArrayXXf;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class Dim : std::uint8_t { X = 0, Y = 1, Coil = 2, Set = 3 };

std::string_view dim_name(Dim d);

// Raised for malformed input data (shapes, values). The CLI maps these to exit code 2.
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class IoErrc
{
  Open,
  BadMagic,
  Truncated,
  TrailingData,
  ExtentOverflow,
  BadDimension,
  OddExtent,
  NonFinite,
  Write,
};

class IoError : public DataError
{
public:
  IoError(IoErrc code, std::string const &what)
    : DataError(what)
    , code_(code)
  {
  }

  IoErrc code() const noexcept { return code_; }

private:
  IoErrc code_;
};

} // namespace vcc
