#include "vccrecon/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace vcc {

namespace {

constexpr std::array<char, 4> kMagic{'K', 'S', 'P', '1'};
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 36;

template <typename T>
void put_le(std::vector<unsigned char> &out, T v)
{
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); i++) {
    out.push_back(static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(unsigned char const *p)
{
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); i++) {
    v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

class Reader
{
public:
  Reader(std::vector<unsigned char> const &buf, std::filesystem::path const &path)
    : buf_(buf)
    , path_(path)
  {
  }

  unsigned char const *take(std::size_t n, char const *what)
  {
    if (buf_.size() - pos_ < n) {
      throw IoError(IoErrc::Truncated, fmt::format("{}: truncated while reading {}", path_.string(), what));
    }
    auto const *p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::size_t remaining() const { return buf_.size() - pos_; }

private:
  std::vector<unsigned char> const &buf_;
  std::filesystem::path const &path_;
  std::size_t pos_ = 0;
};

} // namespace

KTensor read_ktensor(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(IoErrc::Open, fmt::format("cannot open '{}'", path.string()));
  }
  std::vector<unsigned char> const buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  Reader r(buf, path);

  if (buf.size() < kMagic.size() || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw IoError(IoErrc::BadMagic, fmt::format("{}: not a KSP1 file", path.string()));
  }
  r.take(kMagic.size(), "magic");
  auto const ndims = get_le<std::uint32_t>(r.take(4, "dimension count"));
  if (ndims < 1 || ndims > 4) {
    throw IoError(IoErrc::BadDimension, fmt::format("{}: unsupported dimension count {}", path.string(), ndims));
  }

  std::vector<DimExtent> dims;
  std::uint64_t count = 1;
  bool seen[4] = {false, false, false, false};
  for (std::uint32_t i = 0; i < ndims; i++) {
    auto const tag = *r.take(1, "dimension tag");
    auto const extent = get_le<std::uint64_t>(r.take(8, "dimension extent"));
    if (tag > 3 || seen[tag]) {
      throw IoError(IoErrc::BadDimension, fmt::format("{}: bad or repeated dimension tag {}", path.string(), tag));
    }
    seen[tag] = true;
    if (extent == 0 || extent > kMaxElements || count > kMaxElements / extent) {
      throw IoError(IoErrc::ExtentOverflow, fmt::format("{}: extents overflow the element limit", path.string()));
    }
    count *= extent;
    auto const name = static_cast<Dim>(tag);
    if ((name == Dim::X || name == Dim::Y) && extent % 2 != 0) {
      throw IoError(IoErrc::OddExtent, fmt::format("{}: odd extent {} on '{}'", path.string(), extent, dim_name(name)));
    }
    dims.push_back({name, static_cast<Index>(extent)});
  }

  auto const payload = count * 2 * sizeof(float);
  if (r.remaining() < payload) {
    throw IoError(
      IoErrc::Truncated,
      fmt::format("{}: header declares {} values but only {} bytes follow", path.string(), count, r.remaining()));
  }
  if (r.remaining() > payload) {
    throw IoError(IoErrc::TrailingData, fmt::format("{}: {} unexpected trailing bytes", path.string(), r.remaining() - payload));
  }

  std::vector<Cx> data(count);
  auto const *p = r.take(payload, "payload");
  for (std::size_t i = 0; i < count; i++) {
    auto const re = std::bit_cast<float>(get_le<std::uint32_t>(p + 8 * i));
    auto const im = std::bit_cast<float>(get_le<std::uint32_t>(p + 8 * i + 4));
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw IoError(IoErrc::NonFinite, fmt::format("{}: non-finite value at element {}", path.string(), i));
    }
    data[i] = Cx{re, im};
  }
  return KTensor(std::move(dims), std::move(data));
}

void write_ktensor(std::filesystem::path const &path, KTensor const &t)
{
  if (t.ndims() < 1 || t.ndims() > 4) {
    throw IoError(IoErrc::BadDimension, "KSP1 supports 1 to 4 dimensions");
  }
  std::vector<unsigned char> out(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.ndims()));
  for (auto const &d : t.dims()) {
    if ((d.name == Dim::X || d.name == Dim::Y) && d.extent % 2 != 0) {
      throw IoError(IoErrc::OddExtent, fmt::format("refusing to write odd extent on '{}'", dim_name(d.name)));
    }
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(d.name));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(d.extent));
  }
  out.reserve(out.size() + static_cast<std::size_t>(t.size()) * 8);
  for (auto const &v : t.data()) {
    put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v.real()));
    put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v.imag()));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw IoError(IoErrc::Open, fmt::format("cannot open '{}' for writing", path.string()));
  }
  f.write(reinterpret_cast<char const *>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw IoError(IoErrc::Write, fmt::format("short write to '{}'", path.string()));
  }
}

void write_pgm(std::filesystem::path const &path, RealImage const &img, float gain, float peak)
{
  if (peak <= 0.f) {
    peak = img.size() > 0 ? img.abs().maxCoeff() : 0.f;
  }
  float const scale = peak > 0.f ? gain * 255.f / peak : 0.f;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw IoError(IoErrc::Open, fmt::format("cannot open '{}' for writing", path.string()));
  }
  f << "P5\n" << img.rows() << " " << img.cols() << "\n255\n";
  // Rows of the PGM run along x.
  for (Index y = 0; y < img.cols(); y++) {
    for (Index x = 0; x < img.rows(); x++) {
      float const v = std::clamp(std::abs(img(x, y)) * scale, 0.f, 255.f);
      f.put(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
    }
  }
  if (!f) {
    throw IoError(IoErrc::Write, fmt::format("short write to '{}'", path.string()));
  }
}

} // namespace vcc
