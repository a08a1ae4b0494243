#include "vccrecon/phantom.hpp"

#include "vccrecon/fft.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace vcc {

namespace {

struct Ellipse
{
  float intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan, with the skull-to-brain step reduced so the interior stays positive.
constexpr std::array<Ellipse, 10> kEllipses{{
  {1.0f, 0.69f, 0.92f, 0.f, 0.f, 0.f},
  {-0.7f, 0.6624f, 0.874f, 0.f, -0.0184f, 0.f},
  {-0.2f, 0.11f, 0.31f, 0.22f, 0.f, -18.f},
  {-0.2f, 0.16f, 0.41f, -0.22f, 0.f, 18.f},
  {0.1f, 0.21f, 0.25f, 0.f, 0.35f, 0.f},
  {0.1f, 0.046f, 0.046f, 0.f, 0.1f, 0.f},
  {0.1f, 0.046f, 0.046f, 0.f, -0.1f, 0.f},
  {0.1f, 0.046f, 0.023f, -0.08f, -0.605f, 0.f},
  {0.1f, 0.023f, 0.023f, 0.f, -0.606f, 0.f},
  {0.1f, 0.023f, 0.046f, 0.06f, -0.605f, 0.f},
}};

// Object half-extent as a fraction of the grid.
constexpr float kObjectScale = 0.45f;

bool inside(Ellipse const &e, float u, float v)
{
  float const t = e.phi_deg * std::numbers::pi_v<float> / 180.f;
  float const du = u - e.x0;
  float const dv = v - e.y0;
  float const r1 = (du * std::cos(t) + dv * std::sin(t)) / e.a;
  float const r2 = (-du * std::sin(t) + dv * std::cos(t)) / e.b;
  return r1 * r1 + r2 * r2 <= 1.f;
}

// Smooth taper that is 1 over the object and reaches 0 at the grid edge.
float edge_taper(float r)
{
  constexpr float lo = 0.88f;
  if (r <= lo) {
    return 1.f;
  }
  if (r >= 1.f) {
    return 0.f;
  }
  float const c = std::cos(0.5f * std::numbers::pi_v<float> * (r - lo) / (1.f - lo));
  return c * c;
}

} // namespace

Mask dilate(Mask const &mask, int radius)
{
  Mask out = mask;
  for (Index y = 0; y < mask.cols(); y++) {
    for (Index x = 0; x < mask.rows(); x++) {
      if (!mask(x, y)) {
        continue;
      }
      for (int dy = -radius; dy <= radius; dy++) {
        for (int dx = -radius; dx <= radius; dx++) {
          Index const xx = x + dx;
          Index const yy = y + dy;
          if (dx * dx + dy * dy <= radius * radius && xx >= 0 && yy >= 0 && xx < mask.rows() && yy < mask.cols()) {
            out(xx, yy) = true;
          }
        }
      }
    }
  }
  return out;
}

PhantomTruth make_phantom(PhantomOptions const &opts)
{
  Index const n = opts.grid;
  if (n < 32 || n % 2 != 0) {
    throw std::invalid_argument(fmt::format("phantom grid must be even and at least 32, got {}", n));
  }
  if (opts.ncoils < 2) {
    throw std::invalid_argument(fmt::format("phantom needs at least 2 coils, got {}", opts.ncoils));
  }
  if (opts.hf_blobs < 0) {
    throw std::invalid_argument("negative blob count");
  }
  if (opts.blob_radius <= 0.f || opts.blob_radius > 6.f || opts.blob_ramp < std::numbers::pi_v<float>) {
    throw std::invalid_argument("blob radius must be in (0, 6] and the ramp at least pi");
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<float> uni(-1.f, 1.f);

  float const half = 0.5f * static_cast<float>(n);
  auto object_u = [&](Index i) { return (static_cast<float>(i) - half) / (kObjectScale * 2.f * half); };
  auto grid_u = [&](Index i) { return (static_cast<float>(i) - half) / half; };

  PhantomTruth t;
  t.magnitude = RealImage::Zero(n, n);
  t.support = Mask::Constant(n, n, false);
  for (Index y = 0; y < n; y++) {
    for (Index x = 0; x < n; x++) {
      float const u = object_u(x);
      float const v = object_u(y);
      float m = 0.f;
      for (auto const &e : kEllipses) {
        if (inside(e, u, v)) {
          m += e.intensity;
        }
      }
      t.magnitude(x, y) = std::max(m, 0.f);
      t.support(x, y) = inside(kEllipses[0], u, v);
    }
  }

  // Low-order polynomial phase scaled to +-pi/2 over the object.
  std::array<float, 5> poly;
  for (auto &p : poly) {
    p = uni(rng);
  }
  auto poly_at = [&](float u, float v) {
    return poly[0] * u + poly[1] * v + poly[2] * u * u + poly[3] * u * v + poly[4] * v * v;
  };
  float peak = 0.f;
  for (Index y = 0; y < n; y++) {
    for (Index x = 0; x < n; x++) {
      if (t.support(x, y)) {
        peak = std::max(peak, std::abs(poly_at(grid_u(x), grid_u(y))));
      }
    }
  }
  float const phase_scale = peak > 0.f ? opts.phase_peak / peak : 0.f;
  t.smooth_phase = RealImage::Zero(n, n);
  for (Index y = 0; y < n; y++) {
    for (Index x = 0; x < n; x++) {
      float const u = grid_u(x);
      float const v = grid_u(y);
      float const r = std::max(std::abs(u), std::abs(v));
      t.smooth_phase(x, y) = phase_scale * poly_at(u, v) * edge_taper(r);
    }
  }

  // Coils: Gaussian-weighted first-order complex polynomials centred on a ring around the FOV.
  Index const nc = opts.ncoils;
  t.coils = KTensor::image(n, n, nc);
  float const ring = 0.55f * static_cast<float>(n);
  float const sigma = opts.coil_width * static_cast<float>(n);
  for (Index c = 0; c < nc; c++) {
    float const angle = 2.f * std::numbers::pi_v<float> * static_cast<float>(c) / static_cast<float>(nc);
    float const px = half + ring * std::cos(angle);
    float const py = half + ring * std::sin(angle);
    Cx const a{0.3f * uni(rng) / std::sqrt(2.f), 0.3f * uni(rng) / std::sqrt(2.f)};
    Cx const b{0.3f * uni(rng) / std::sqrt(2.f), 0.3f * uni(rng) / std::sqrt(2.f)};
    Cx const rot = std::polar(1.f, std::numbers::pi_v<float> * uni(rng));
    for (Index y = 0; y < n; y++) {
      for (Index x = 0; x < n; x++) {
        float const dx = (static_cast<float>(x) - px) / static_cast<float>(n);
        float const dy = (static_cast<float>(y) - py) / static_cast<float>(n);
        float const g = std::exp(-(dx * dx + dy * dy) * static_cast<float>(n * n) / (2.f * sigma * sigma));
        t.coils(x, y, c) = rot * g * (Cx{1.f, 0.f} + a * dx + b * dy);
      }
    }
  }

  // High-frequency phase: linear ramps inside small, well separated discs.
  t.hf_phase = RealImage::Zero(n, n);
  t.blobs = Mask::Constant(n, n, false);
  float const r = opts.blob_radius;
  int const reach = static_cast<int>(std::ceil(r));
  Mask const allowed = [&] {
    // Centres must keep the whole disc plus a margin inside the support.
    Mask outside = !t.support.array();
    Mask forbidden = dilate(outside, reach + 3);
    return Mask(!forbidden.array());
  }();
  std::vector<std::array<float, 2>> centres;
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_real_distribution<float> direction(0.f, 2.f * std::numbers::pi_v<float>);
  int attempts = 0;
  while (static_cast<int>(centres.size()) < opts.hf_blobs) {
    if (++attempts > 100000) {
      throw std::invalid_argument(fmt::format("cannot place {} blobs on a {} grid", opts.hf_blobs, n));
    }
    Index const cx = pick(rng);
    Index const cy = pick(rng);
    if (!allowed(cx, cy)) {
      continue;
    }
    bool clear = true;
    for (auto const &c : centres) {
      float const dx = c[0] - static_cast<float>(cx);
      float const dy = c[1] - static_cast<float>(cy);
      clear = clear && std::sqrt(dx * dx + dy * dy) > 2.f * r + 4.f;
    }
    if (!clear) {
      continue;
    }
    centres.push_back({static_cast<float>(cx), static_cast<float>(cy)});
    float const theta = direction(rng);
    for (int dy = -reach; dy <= reach; dy++) {
      for (int dx = -reach; dx <= reach; dx++) {
        if (static_cast<float>(dx * dx + dy * dy) > r * r) {
          continue;
        }
        float const along = static_cast<float>(dx) * std::cos(theta) + static_cast<float>(dy) * std::sin(theta);
        // Offset by pi/2 so the phase never vanishes inside a disc.
        t.hf_phase(cx + dx, cy + dy) = 0.5f * std::numbers::pi_v<float> + opts.blob_ramp * (along + r) / (2.f * r);
        t.blobs(cx + dx, cy + dy) = true;
      }
    }
  }
  return t;
}

namespace {

KTensor maps_with_phase(PhantomTruth const &t, bool with_hf, bool with_magnitude)
{
  KTensor out = t.coils;
  Index const n = t.grid();
  for (Index c = 0; c < t.ncoils(); c++) {
    for (Index y = 0; y < n; y++) {
      for (Index x = 0; x < n; x++) {
        float const psi = t.smooth_phase(x, y) + (with_hf ? t.hf_phase(x, y) : 0.f);
        float const mag = with_magnitude ? t.magnitude(x, y) : 1.f;
        out(x, y, c) *= std::polar(mag, psi);
      }
    }
  }
  return out;
}

} // namespace

KTensor phase_maps(PhantomTruth const &truth) { return maps_with_phase(truth, true, false); }
KTensor smooth_phase_maps(PhantomTruth const &truth) { return maps_with_phase(truth, false, false); }
KTensor coil_images(PhantomTruth const &truth) { return maps_with_phase(truth, true, true); }

KTensor simulate_kspace(PhantomTruth const &truth)
{
  if (truth.coils.extent(Dim::X) != truth.grid() || truth.coils.extent(Dim::Y) != truth.magnitude.cols()) {
    throw DataError("phantom coil maps do not match the magnitude image");
  }
  return fftc(coil_images(truth), kSpatial);
}

} // namespace vcc
