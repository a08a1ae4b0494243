#include "vccrecon/espirit.hpp"

#include "vccrecon/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace vcc {

KTensor SensitivityMaps::eigenvalue_tensor() const
{
  KTensor t = KTensor::image(nx(), ny(), 0, static_cast<Index>(eigenvalues.size()));
  for (std::size_t s = 0; s < eigenvalues.size(); s++) {
    for (Index y = 0; y < ny(); y++) {
      for (Index x = 0; x < nx(); x++) {
        t(x, y, 0, static_cast<Index>(s)) = Cx{eigenvalues[s](x, y), 0.f};
      }
    }
  }
  return t;
}

Eigen::MatrixXcd build_calib_matrix(KTensor const &acs, Index kernel)
{
  Index const ax = acs.extent(Dim::X);
  Index const ay = acs.extent(Dim::Y);
  Index const nc = acs.extent(Dim::Coil);
  if (kernel < 1) {
    throw std::invalid_argument(fmt::format("kernel size must be positive, got {}", kernel));
  }
  if (!acs.has(Dim::X) || !acs.has(Dim::Y) || acs.extent(Dim::Set) != 1) {
    throw DataError("calibration data must be (x, y[, coil])");
  }
  if (ax < kernel || ay < kernel) {
    throw DataError(fmt::format("ACS region {}x{} is smaller than the {}x{} kernel", ax, ay, kernel, kernel));
  }
  Index const wx = ax - kernel + 1;
  Index const wy = ay - kernel + 1;
  Eigen::MatrixXcd m(wx * wy, kernel * kernel * nc);
  for (Index c = 0; c < nc; c++) {
    for (Index ky = 0; ky < kernel; ky++) {
      for (Index kx = 0; kx < kernel; kx++) {
        Index const col = kx + kernel * (ky + kernel * c);
        for (Index y = 0; y < wy; y++) {
          for (Index x = 0; x < wx; x++) {
            m(x + wx * y, col) = Cxd(acs(x + kx, y + ky, c));
          }
        }
      }
    }
  }
  return m;
}

CalibSubspace calibrate(KTensor const &acs, CalibOptions const &opts)
{
  if (!(opts.threshold >= 0.0)) {
    throw std::invalid_argument("calibration threshold must be non-negative");
  }
  Eigen::MatrixXcd const c = build_calib_matrix(acs, opts.kernel);

  // Eigendecompose the smaller Gram matrix; V = C^H U / sigma when rows < cols.
  bool const wide = c.rows() < c.cols();
  Eigen::MatrixXcd const gram = wide ? Eigen::MatrixXcd(c * c.adjoint()) : Eigen::MatrixXcd(c.adjoint() * c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw DataError("calibration eigendecomposition failed");
  }
  Index const n = gram.rows();
  Eigen::VectorXd const ev = eig.eigenvalues();

  CalibSubspace sub;
  sub.kernel_size = opts.kernel;
  sub.ncoils = acs.extent(Dim::Coil);
  for (Index i = n - 1; i >= 0; i--) {
    sub.singular_values.push_back(std::sqrt(std::max(ev(i), 0.0)));
  }
  double const smax = sub.singular_values.front();
  if (!(smax > 0.0)) {
    throw DataError("calibration data is all zero");
  }
  Index keep = 0;
  while (keep < n && sub.singular_values[static_cast<std::size_t>(keep)] >= opts.threshold * smax) {
    keep++;
  }
  if (keep == 0) {
    throw DataError("empty subspace: no singular value passes the threshold");
  }

  Eigen::MatrixXcd v(c.cols(), keep);
  for (Index r = 0; r < keep; r++) {
    Eigen::VectorXcd const u = eig.eigenvectors().col(n - 1 - r);
    if (wide) {
      v.col(r) = c.adjoint() * u / sub.singular_values[static_cast<std::size_t>(r)];
    } else {
      v.col(r) = u;
    }
  }
  // Rows of C are patches transposed, so the patches themselves live in span(conj(V)).
  sub.kernels = v.conjugate();
  return sub;
}

std::vector<Eigen::MatrixXcd> pixel_operators(CalibSubspace const &sub, Index nx, Index ny)
{
  Index const k = sub.kernel_size;
  Index const nc = sub.ncoils;
  if (nx < k || ny < k) {
    throw DataError(fmt::format("grid {}x{} is smaller than the kernel", nx, ny));
  }
  Index const kk = k * k;
  Index const span = 2 * k - 1;

  // Projector onto the patch subspace.
  Eigen::MatrixXcd const proj = sub.kernels * sub.kernels.adjoint();

  // Averaging the patch projection over all window positions is a k-space convolution with
  // h_ij(d) = 1/k^2 sum_{p - p' = d} P[(p,i),(p',j)], d in [-(k-1), k-1]^2.
  auto h_index = [&](Index i, Index j, Index dx, Index dy) {
    return (dx + k - 1) + span * ((dy + k - 1) + span * (i + nc * j));
  };
  std::vector<Cxd> h(static_cast<std::size_t>(span * span * nc * nc), Cxd{0.0, 0.0});
  double const inv_kk = 1.0 / static_cast<double>(kk);
  for (Index j = 0; j < nc; j++) {
    for (Index i = j; i < nc; i++) {
      for (Index p2 = 0; p2 < kk; p2++) {
        for (Index p1 = 0; p1 < kk; p1++) {
          Index const dx = p1 % k - p2 % k;
          Index const dy = p1 / k - p2 / k;
          h[static_cast<std::size_t>(h_index(i, j, dx, dy))] += proj(p1 + kk * i, p2 + kk * j) * inv_kk;
        }
      }
    }
  }

  // Image-domain multiplier: G_ij(q) = sum_d h_ij(d) exp(+i 2 pi d (q - N/2) / N), done separably.
  auto phasors = [&](Index n) {
    Eigen::MatrixXcd e(n, span);
    for (Index q = 0; q < n; q++) {
      for (Index d = -(k - 1); d <= k - 1; d++) {
        double const a = 2.0 * std::numbers::pi * static_cast<double>(d * (q - n / 2)) / static_cast<double>(n);
        e(q, d + k - 1) = Cxd{std::cos(a), std::sin(a)};
      }
    }
    return e;
  };
  Eigen::MatrixXcd const ex = phasors(nx);
  Eigen::MatrixXcd const ey = phasors(ny);

  std::vector<Eigen::MatrixXcd> ops(static_cast<std::size_t>(nx * ny), Eigen::MatrixXcd::Zero(nc, nc));
  std::vector<std::pair<Index, Index>> pairs;
  for (Index j = 0; j < nc; j++) {
    for (Index i = j; i < nc; i++) {
      pairs.emplace_back(i, j);
    }
  }
  parallel_for(static_cast<Index>(pairs.size()), [&](Index pi) {
    auto const [i, j] = pairs[static_cast<std::size_t>(pi)];
    Eigen::Map<Eigen::MatrixXcd const> hij(h.data() + h_index(i, j, -(k - 1), -(k - 1)), span, span);
    Eigen::MatrixXcd const g = ex * hij * ey.transpose(); // (nx, ny)
    for (Index y = 0; y < ny; y++) {
      for (Index x = 0; x < nx; x++) {
        auto &op = ops[static_cast<std::size_t>(x + nx * y)];
        op(i, j) = g(x, y);
        op(j, i) = std::conj(g(x, y));
      }
    }
  });
  return ops;
}

void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v)
{
  Index ref = 0;
  double const peak = v.cwiseAbs().maxCoeff();
  if (std::abs(v(0)) < 1e-8 * peak) {
    v.cwiseAbs().maxCoeff(&ref);
  }
  double const mag = std::abs(v(ref));
  if (mag > 0.0) {
    v *= std::conj(v(ref)) / mag;
  }
}

SensitivityMaps eigen_maps(CalibSubspace const &sub, Index nx, Index ny, Index nsets)
{
  Index const nc = sub.ncoils;
  if (nsets < 1 || nsets > nc) {
    throw DataError(fmt::format("requested {} map sets but only {} coils", nsets, nc));
  }
  auto const ops = pixel_operators(sub, nx, ny);

  SensitivityMaps out;
  out.maps = KTensor::image(nx, ny, nc, nsets);
  out.eigenvalues.assign(static_cast<std::size_t>(nsets), RealImage::Zero(nx, ny));
  parallel_for(ny, [&](Index y) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(nc);
    for (Index x = 0; x < nx; x++) {
      eig.compute(ops[static_cast<std::size_t>(x + nx * y)]);
      for (Index s = 0; s < nsets; s++) {
        Index const col = nc - 1 - s;
        Eigen::VectorXcd v = eig.eigenvectors().col(col);
        normalize_phase(v);
        for (Index c = 0; c < nc; c++) {
          out.maps(x, y, c, s) = Cx(v(c));
        }
        out.eigenvalues[static_cast<std::size_t>(s)](x, y) = static_cast<float>(eig.eigenvalues()(col));
      }
    }
  });
  return out;
}

double smoothstep_weight(double lambda, double lo)
{
  if (lambda <= lo) {
    return 0.0;
  }
  if (lambda >= 1.0) {
    return 1.0;
  }
  double const t = (lambda - lo) / (1.0 - lo);
  return t * t * (3.0 - 2.0 * t);
}

SensitivityMaps soft_weight(SensitivityMaps const &maps, double lo)
{
  if (!(lo < 1.0)) {
    throw std::invalid_argument(fmt::format("soft-weight lower bound must be below 1, got {}", lo));
  }
  if (static_cast<Index>(maps.eigenvalues.size()) != maps.nsets()) {
    throw DataError("soft_weight needs one eigenvalue map per set");
  }
  SensitivityMaps out = maps;
  for (Index s = 0; s < maps.nsets(); s++) {
    auto const &lambda = maps.eigenvalues[static_cast<std::size_t>(s)];
    for (Index y = 0; y < maps.ny(); y++) {
      for (Index x = 0; x < maps.nx(); x++) {
        auto const w = static_cast<float>(smoothstep_weight(lambda(x, y), lo));
        for (Index c = 0; c < maps.ncoils(); c++) {
          out.maps(x, y, c, s) *= w;
        }
      }
    }
  }
  return out;
}

} // namespace vcc
