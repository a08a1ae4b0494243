#include "fixtures.hpp"
#include "oracles.hpp"

#include "vccrecon/fft.hpp"
#include "vccrecon/io.hpp"
#include "vccrecon/validate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace vcc {
namespace {

using testing::fraction;

Cxd inner(KTensor const &a, KTensor const &b)
{
  Cxd s{0.0, 0.0};
  for (Index i = 0; i < a.size(); i++) {
    s += std::conj(Cxd(a.data()[i])) * Cxd(b.data()[i]);
  }
  return s;
}

double rel_diff(KTensor const &a, KTensor const &b)
{
  double d = 0.0;
  for (Index i = 0; i < a.size(); i++) {
    d += std::norm(Cxd(a.data()[i]) - Cxd(b.data()[i]));
  }
  return std::sqrt(d) / norm(b.data());
}

KTensor random_maps(Index n, Index nc, Index ns, std::mt19937_64 &rng)
{
  return testing::random_tensor({{Dim::X, n}, {Dim::Y, n}, {Dim::Coil, nc}, {Dim::Set, ns}}, rng);
}

KTensor random_coils(Index n, Index nc, std::mt19937_64 &rng)
{
  return testing::random_tensor({{Dim::X, n}, {Dim::Y, n}, {Dim::Coil, nc}}, rng);
}

TEST(DirectMaps, UnitRss)
{
  auto const &run = testing::smooth_run();
  SensitivityMaps const d = direct_maps(run.ksp, 24);
  ASSERT_EQ(d.nsets(), 1);
  RealImage const r = rss(d.maps);
  for (Index y = 0; y < 96; y++) {
    for (Index x = 0; x < 96; x++) {
      if (run.truth.support(x, y)) {
        ASSERT_NEAR(r(x, y), 1.f, 1e-5);
      }
    }
  }
  EXPECT_THROW(direct_maps(run.ksp, 98), DataError);
}

TEST(DirectMaps, SingleConstantCoil)
{
  PhantomTruth t = make_phantom({});
  t.coils = KTensor::image(96, 96, 1);
  for (auto &z : t.coils.data()) {
    z = Cx{1.f, 0.f};
  }
  t.smooth_phase.setZero();
  SensitivityMaps const d = direct_maps(simulate_kspace(t), 24);
  for (Index y = 0; y < 96; y++) {
    for (Index x = 0; x < 96; x++) {
      if (t.support(x, y)) {
        ASSERT_NEAR(std::abs(d.maps(x, y, 0)), 1.f, 1e-5);
      }
    }
  }
}

TEST(Project, InSpanRealMultipleHasNoResidual)
{
  std::mt19937_64 rng(3);
  KTensor const maps = random_maps(8, 3, 1, rng);
  KTensor coils = KTensor::image(8, 8, 3);
  std::normal_distribution<float> g;
  for (Index y = 0; y < 8; y++) {
    for (Index x = 0; x < 8; x++) {
      float const r = g(rng);
      for (Index c = 0; c < 3; c++) {
        coils(x, y, c) = r * maps(x, y, c);
      }
    }
  }
  for (auto mode : {ProjectionMode::Real, ProjectionMode::Complex}) {
    Projection const p = project(coils, maps, mode);
    EXPECT_LT(p.error.combined.maxCoeff(), 1e-5);
    EXPECT_LT(rel_diff(p.projected, coils), 1e-5);
  }
}

TEST(Project, OrthogonalToyGivesZero)
{
  KTensor maps = KTensor::image(4, 4, 2, 1);
  KTensor coils = KTensor::image(4, 4, 2);
  for (Index y = 0; y < 4; y++) {
    for (Index x = 0; x < 4; x++) {
      maps(x, y, 0) = Cx{1.f, 0.f};
      coils(x, y, 1) = Cx{0.3f, -0.7f};
    }
  }
  Projection const p = project(coils, maps, ProjectionMode::Complex);
  EXPECT_EQ(norm(p.projected.data()), 0.0);
  EXPECT_TRUE(p.error.per_coil == coils);
  EXPECT_NEAR(p.error.combined(1, 2), std::abs(Cx{0.3f, -0.7f}), 1e-6);
  EXPECT_NEAR(p.error.scalar, 1.0, 1e-6);
}

TEST(Project, ComplexModeIsOrthogonalProjector)
{
  std::mt19937_64 rng(4);
  KTensor const maps = random_maps(10, 4, 1, rng);
  KTensor const a = random_coils(10, 4, rng);
  KTensor const b = random_coils(10, 4, rng);
  KTensor const pa = project(a, maps, ProjectionMode::Complex).projected;
  KTensor const pb = project(b, maps, ProjectionMode::Complex).projected;
  EXPECT_LT(rel_diff(project(pa, maps, ProjectionMode::Complex).projected, pa), 1e-5);
  Cxd const l = inner(pa, b);
  Cxd const r = inner(a, pb);
  EXPECT_LT(std::abs(l - r) / std::abs(l), 1e-5);
}

TEST(Project, RealModeIsProjectorUnderRealInnerProduct)
{
  std::mt19937_64 rng(5);
  KTensor const maps = random_maps(10, 4, 1, rng);
  KTensor const a = random_coils(10, 4, rng);
  KTensor const b = random_coils(10, 4, rng);
  KTensor const pa = project(a, maps, ProjectionMode::Real).projected;
  KTensor const pb = project(b, maps, ProjectionMode::Real).projected;
  EXPECT_LT(rel_diff(project(pa, maps, ProjectionMode::Real).projected, pa), 1e-5);
  double const l = inner(pa, b).real();
  double const r = inner(a, pb).real();
  EXPECT_LT(std::abs(l - r) / std::abs(l), 1e-5);
}

TEST(Project, MultiSetEigenvectorsFormProjector)
{
  auto const &run = testing::blob_run();
  SensitivityMaps const m = testing::conventional_maps(run.ksp, 24, 6, 2);
  std::mt19937_64 rng(6);
  KTensor const a = random_coils(96, 8, rng);
  KTensor const b = random_coils(96, 8, rng);
  KTensor const pa = project(a, m.maps, ProjectionMode::Complex).projected;
  KTensor const pb = project(b, m.maps, ProjectionMode::Complex).projected;
  EXPECT_LT(rel_diff(project(pa, m.maps, ProjectionMode::Complex).projected, pa), 1e-5);
  Cxd const l = inner(pa, b);
  EXPECT_LT(std::abs(l - inner(a, pb)) / std::abs(l), 1e-5);
}

TEST(Project, ZeroMapsProjectToZero)
{
  std::mt19937_64 rng(7);
  KTensor maps = random_maps(6, 2, 1, rng);
  maps(2, 3, 0) = Cx{0.f, 0.f};
  maps(2, 3, 1) = Cx{0.f, 0.f};
  KTensor const coils = random_coils(6, 2, rng);
  Projection const p = project(coils, maps, ProjectionMode::Complex);
  EXPECT_EQ(p.projected(2, 3, 0), (Cx{0.f, 0.f}));
  EXPECT_TRUE(p.projected.all_finite());
  EXPECT_THROW(project(random_coils(6, 3, rng), maps, ProjectionMode::Real), DataError);
}

TEST(Project, RealResidualAtLeastComplexResidual)
{
  auto const &run = testing::blob_run();
  KTensor const maps = testing::first_sets(run.weighted.maps, 1);
  ErrorMap const re = project(run.coils, maps, ProjectionMode::Real, run.truth.support).error;
  ErrorMap const cx = project(run.coils, maps, ProjectionMode::Complex, run.truth.support).error;
  EXPECT_GE(re.scalar, cx.scalar);
  EXPECT_TRUE((re.combined >= cx.combined - 1e-6f).all());
}

TEST(Project, SecondSetNeverHurts)
{
  auto const &run = testing::blob_run();
  KTensor const one = testing::first_sets(run.weighted.maps, 1);
  ErrorMap const r1 = project(run.coils, one, ProjectionMode::Real, run.truth.support).error;
  ErrorMap const r2 = project(run.coils, run.weighted.maps, ProjectionMode::Real, run.truth.support).error;
  EXPECT_LE(r2.scalar, r1.scalar + 1e-6);
  EXPECT_LT(r2.scalar, r1.scalar);

  SensitivityMaps const conv = testing::conventional_maps(run.ksp, 24, 6, 2);
  ErrorMap const c1 =
    project(run.coils, testing::first_sets(conv.maps, 1), ProjectionMode::Complex, run.truth.support).error;
  ErrorMap const c2 = project(run.coils, conv.maps, ProjectionMode::Complex, run.truth.support).error;
  EXPECT_LE(c2.scalar, c1.scalar + 1e-6);
  EXPECT_TRUE((c2.combined <= c1.combined + 1e-6f).all());
}

TEST(Project, SmoothPhantomRealResidualIsSmall)
{
  auto const &run = testing::smooth_run();
  KTensor const maps = testing::first_sets(run.weighted.maps, 1);
  EXPECT_LT(project(run.coils, maps, ProjectionMode::Real, run.truth.support).error.scalar, 0.03);
}

TEST(Project, ResidualConcentratesInBlobs)
{
  auto const &run = testing::blob_run();
  KTensor const maps = testing::first_sets(run.weighted.maps, 1);
  ErrorMap const e = project(run.coils, maps, ProjectionMode::Real, run.truth.support).error;
  Mask const near = dilate(run.truth.blobs, 2);
  double inside = 0.0;
  double total = 0.0;
  for (Index y = 0; y < 96; y++) {
    for (Index x = 0; x < 96; x++) {
      if (run.truth.support(x, y)) {
        double const v = static_cast<double>(e.combined(x, y)) * e.combined(x, y);
        total += v;
        inside += near(x, y) ? v : 0.0;
      }
    }
  }
  EXPECT_GE(inside / total, 0.7);
}

TEST(Project, DirectMapsAreWorseThanVcc)
{
  auto const &run = testing::smooth_run();
  KTensor const vccm = testing::first_sets(run.weighted.maps, 1);
  double const direct =
    project(run.coils, direct_maps(run.ksp, 24).maps, ProjectionMode::Real, run.truth.support).error.scalar;
  double const vcc = project(run.coils, vccm, ProjectionMode::Real, run.truth.support).error.scalar;
  EXPECT_GT(direct, vcc);
}

TEST(Project, LargerCalibrationHelpsTwoSets)
{
  PhantomOptions o;
  o.hf_blobs = 3;
  auto residual = [&](Index acs) {
    testing::VccRun const r = testing::make_run(o, acs, 6);
    return project(r.coils, r.weighted.maps, ProjectionMode::Real, r.truth.support).error.scalar;
  };
  EXPECT_LT(residual(40), residual(16));
}

TEST(DiffImage, Examples)
{
  std::mt19937_64 rng(8);
  KTensor const a = random_coils(8, 3, rng);
  ErrorMap const same = diff_image(a, a);
  EXPECT_EQ(same.combined.maxCoeff(), 0.f);
  EXPECT_EQ(same.scalar, 0.0);
  ErrorMap const vs_zero = diff_image(a, KTensor::image(8, 8, 3));
  EXPECT_LT((vs_zero.combined - rss(a)).abs().maxCoeff(), 1e-6f);
  EXPECT_THROW(diff_image(a, random_coils(8, 2, rng)), DataError);
}

TEST(Nrmse, Examples)
{
  std::mt19937_64 rng(9);
  KTensor const b = random_coils(8, 2, rng);
  EXPECT_EQ(nrmse(b, b), 0.0);
  KTensor a = b;
  for (auto &z : a.data()) {
    z *= 2.f;
  }
  EXPECT_NEAR(nrmse(a, b), 1.0, 1e-6);
  a = b;
  a(3, 4, 1) += Cx{1.f, 0.f};
  EXPECT_NEAR(nrmse(a, b), 1.0 / norm(b.data()), 1e-6);
  EXPECT_THROW(nrmse(b, KTensor::image(8, 8, 2)), DataError);

  Mask m = Mask::Constant(8, 8, false);
  m(3, 4) = true;
  a = b;
  a(0, 0, 0) += Cx{5.f, 0.f};
  EXPECT_EQ(nrmse(a, b, m), 0.0);
}

TEST(Metrics, RssAndEdge)
{
  KTensor t = KTensor::image(4, 4, 2);
  t(1, 1, 0) = Cx{3.f, 0.f};
  t(1, 1, 1) = Cx{0.f, 4.f};
  EXPECT_FLOAT_EQ(rss(t)(1, 1), 5.f);
  RealImage img = RealImage::Zero(6, 6);
  img.block(3, 0, 3, 6) = 2.f;
  EXPECT_DOUBLE_EQ(edge_sharpness(img), 2.0);
  img.col(2) = RealImage::Constant(6, 1, 0.f).col(0);
  img(2, 2) = 1.f;
  img(3, 2) = 2.f;
  img(4, 2) = 2.f;
  img(5, 2) = 2.f;
  Mask row = Mask::Constant(6, 6, false);
  row.col(2).setConstant(true);
  EXPECT_DOUBLE_EQ(edge_sharpness(img, row), 1.0);
}

TEST(Pgm, ScalesAndClips)
{
  auto const path = std::filesystem::temp_directory_path() / "vccrecon_pgm_test.pgm";
  RealImage img(3, 2);
  img << 0.f, 1.f, 2.f, -4.f, 0.5f, 3.f;
  write_pgm(path, img, 5.f, 8.f);
  std::ifstream f(path, std::ios::binary);
  std::string const bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::filesystem::remove(path);
  std::string const header = "P5\n3 2\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 6);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  auto px = [&](int i) { return static_cast<unsigned char>(bytes[header.size() + static_cast<std::size_t>(i)]); };
  // First PGM row is y = 0: 0, 2, 0.5 at 255 * 5 / 8 per unit.
  EXPECT_EQ(px(0), 0);
  EXPECT_EQ(px(1), 255);
  EXPECT_EQ(px(2), 80);
  EXPECT_EQ(px(4), 255);
}

} // namespace
} // namespace vcc
