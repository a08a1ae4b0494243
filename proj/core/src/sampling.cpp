#include "vccrecon/sampling.hpp"

#include <fmt/format.h>

#include <charconv>
#include <numeric>

namespace vcc {

namespace {

int parse_int(std::string_view s, std::string_view what)
{
  int v = 0;
  auto const [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("bad integer '{}' for {}", s, what));
  }
  return v;
}

} // namespace

Fraction parse_fraction(std::string_view text)
{
  auto const slash = text.find('/');
  Fraction f;
  if (slash == std::string_view::npos) {
    f = {parse_int(text, "fraction"), 1};
  } else {
    f = {parse_int(text.substr(0, slash), "fraction"), parse_int(text.substr(slash + 1), "fraction")};
  }
  if (f.den <= 0 || f.num <= 0) {
    throw std::invalid_argument(fmt::format("bad fraction '{}'", text));
  }
  int const g = std::gcd(f.num, f.den);
  return {f.num / g, f.den / g};
}

SamplingPattern make_pattern(Index nx, Index ny, int accel, Index acs, Fraction pf)
{
  if (nx < 2 || ny < 2 || nx % 2 || ny % 2) {
    throw std::invalid_argument("sampling grid must have even extents");
  }
  if (accel < 1) {
    throw std::invalid_argument("acceleration must be positive");
  }
  if (acs < 0 || acs > nx || acs > ny) {
    throw std::invalid_argument(fmt::format("ACS size {} does not fit the {}x{} grid", acs, nx, ny));
  }
  // pf in (1/2, 1]
  if (!(2 * pf.num > pf.den && pf.num <= pf.den)) {
    throw std::invalid_argument(fmt::format("partial Fourier factor {}/{} outside (1/2, 1]", pf.num, pf.den));
  }

  SamplingPattern p;
  p.accel = accel;
  p.acs_x = acs;
  p.acs_y = acs;
  p.partial_fourier = pf;
  p.mask = Mask::Constant(nx, ny, false);

  Index const cx = nx / 2;
  Index const cy = ny / 2;
  Index const keep_x = (static_cast<Index>(pf.num) * nx + pf.den - 1) / pf.den;
  for (Index y = 0; y < ny; y++) {
    bool const line = ((y - cy) % accel) == 0;
    bool const acs_line = y >= cy - acs / 2 && y < cy - acs / 2 + acs;
    for (Index x = 0; x < keep_x; x++) {
      bool const acs_col = x >= cx - acs / 2 && x < cx - acs / 2 + acs;
      p.mask(x, y) = line || (acs_line && acs_col);
    }
  }
  // The ACS block stays fully sampled even if it reaches past the partial-Fourier cut.
  for (Index y = cy - acs / 2; y < cy - acs / 2 + acs; y++) {
    for (Index x = cx - acs / 2; x < cx - acs / 2 + acs; x++) {
      p.mask(x, y) = true;
    }
  }
  return p;
}

SamplingPattern full_pattern(Index nx, Index ny) { return make_pattern(nx, ny, 1, 0); }

SamplingPattern parse_pattern(std::string_view spec, Index nx, Index ny)
{
  int accel = 1;
  Index acs = 0;
  Fraction pf{1, 1};
  while (!spec.empty()) {
    auto const comma = spec.find(',');
    auto const item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    auto const eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument(fmt::format("pattern item '{}' lacks '='", item));
    }
    auto const key = item.substr(0, eq);
    auto const value = item.substr(eq + 1);
    if (key == "R" || key == "r") {
      accel = parse_int(value, "R");
    } else if (key == "acs") {
      acs = parse_int(value, "acs");
    } else if (key == "pf") {
      pf = parse_fraction(value);
    } else {
      throw std::invalid_argument(fmt::format("unknown pattern key '{}'", key));
    }
  }
  return make_pattern(nx, ny, accel, acs, pf);
}

KTensor apply_pattern(KTensor const &ksp, SamplingPattern const &p)
{
  if (ksp.extent(Dim::X) != p.nx() || ksp.extent(Dim::Y) != p.ny()) {
    throw DataError(fmt::format(
      "pattern is {}x{} but k-space is {}x{}", p.nx(), p.ny(), ksp.extent(Dim::X), ksp.extent(Dim::Y)));
  }
  KTensor out = ksp;
  for (Index s = 0; s < ksp.extent(Dim::Set); s++) {
    for (Index c = 0; c < ksp.extent(Dim::Coil); c++) {
      for (Index y = 0; y < p.ny(); y++) {
        for (Index x = 0; x < p.nx(); x++) {
          if (!p.mask(x, y)) {
            out(x, y, c, s) = Cx{0.f, 0.f};
          }
        }
      }
    }
  }
  return out;
}

KTensor extract_acs(KTensor const &ksp, Index acs_x, Index acs_y)
{
  Index const nx = ksp.extent(Dim::X);
  Index const ny = ksp.extent(Dim::Y);
  if (acs_x < 1 || acs_y < 1 || acs_x > nx || acs_y > ny) {
    throw DataError(fmt::format("ACS block {}x{} does not fit the {}x{} grid", acs_x, acs_y, nx, ny));
  }
  Index const nc = ksp.extent(Dim::Coil);
  KTensor acs = KTensor::image(acs_x, acs_y, nc);
  Index const x0 = nx / 2 - acs_x / 2;
  Index const y0 = ny / 2 - acs_y / 2;
  for (Index c = 0; c < nc; c++) {
    for (Index y = 0; y < acs_y; y++) {
      for (Index x = 0; x < acs_x; x++) {
        acs(x, y, c) = ksp(x0 + x, y0 + y, c);
      }
    }
  }
  return acs;
}

} // namespace vcc
