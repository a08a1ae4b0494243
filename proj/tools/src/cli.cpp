#include "vccrecon/cli.hpp"

#include "vccrecon/espirit.hpp"
#include "vccrecon/fft.hpp"
#include "vccrecon/io.hpp"
#include "vccrecon/parallel.hpp"
#include "vccrecon/phantom.hpp"
#include "vccrecon/recon.hpp"
#include "vccrecon/sampling.hpp"
#include "vccrecon/validate.hpp"
#include "vccrecon/vcc.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

namespace fs = std::filesystem;

namespace vcc::cli {

namespace {

constexpr char const *kRecipes = R"(Experiment recipes (all via `pipeline`):
  eigenvalue maps and second set:
      --hf-blobs 3 --maps 2                      writes eig0.pgm, eig1.pgm
  projection residual, one vs two sets, over ACS and kernel size:
      --hf-blobs 3 --skip-recon --maps {1,2} --acs {16,24,32,40} --kernel {4,6,8,10}
      unconstrained reference: --hf-blobs 3 --skip-recon --calib espirit --mode complex
  R=3 reconstructions (add --pf 5/8 for the partial-Fourier variants):
      real, 1 map:             --hf-blobs 3 --maps 1 --mode real
      real, 2 maps:            --hf-blobs 3 --maps 2 --mode real
      imaginary penalty:       --hf-blobs 3 --maps 1 --mode imagreg
      direct maps:             --hf-blobs 3 --calib direct --mode {real,imagreg}
      no phase constraint:     --hf-blobs 3 --calib espirit --mode complex
  stronger high-frequency phase:
      --hf-blobs 8 with --maps 1 --mode real, --maps 2 --mode real, --maps 1 --mode imagreg
)";

struct UsageError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

fs::path sibling(fs::path const &p, std::string const &suffix)
{
  return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

Mask read_mask(fs::path const &path)
{
  KTensor const t = read_ktensor(path);
  require_dims(t, {Dim::X, Dim::Y}, "mask file");
  return (real_part(t).array() > 0.5f).eval();
}

KTensor mask_tensor(Mask const &m) { return real_to_ktensor(m.cast<float>()); }

// Maps files are (x, y, coil[, set]); a missing set dimension means one set.
KTensor read_maps_tensor(fs::path const &path)
{
  KTensor t = read_ktensor(path);
  if (t.ndims() == 3) {
    require_dims(t, {Dim::X, Dim::Y, Dim::Coil}, "maps file");
    KTensor out = KTensor::image(t.extent(Dim::X), t.extent(Dim::Y), t.extent(Dim::Coil), 1);
    std::copy(t.data().begin(), t.data().end(), out.data().begin());
    return out;
  }
  require_dims(t, {Dim::X, Dim::Y, Dim::Coil, Dim::Set}, "maps file");
  return t;
}

std::vector<RealImage> split_sets(KTensor const &t)
{
  std::vector<RealImage> out;
  for (Index s = 0; s < t.extent(Dim::Set); s++) {
    out.push_back(real_part(t, 0, s));
  }
  return out;
}

SensitivityMaps read_maps(fs::path const &path)
{
  SensitivityMaps m;
  m.maps = read_maps_tensor(path);
  fs::path const eig = sibling(path, "_eig");
  if (fs::exists(eig)) {
    m.eigenvalues = split_sets(read_ktensor(eig));
    if (static_cast<Index>(m.eigenvalues.size()) != m.nsets() || m.eigenvalues[0].rows() != m.nx() ||
        m.eigenvalues[0].cols() != m.ny()) {
      throw DataError(fmt::format("{} does not match {}", eig.string(), path.string()));
    }
  } else {
    m.eigenvalues.assign(static_cast<std::size_t>(m.nsets()), RealImage::Ones(m.nx(), m.ny()));
  }
  return m;
}

void write_maps(fs::path const &path, SensitivityMaps const &m)
{
  write_ktensor(path, m.maps);
  write_ktensor(sibling(path, "_eig"), m.eigenvalue_tensor());
}

KTensor phase_tensor(std::vector<PhaseMap> const &phases)
{
  Index const nx = phases.front().phi.rows();
  Index const ny = phases.front().phi.cols();
  KTensor t = KTensor::image(nx, ny, 0, static_cast<Index>(phases.size()));
  for (std::size_t s = 0; s < phases.size(); s++) {
    for (Index y = 0; y < ny; y++) {
      for (Index x = 0; x < nx; x++) {
        t(x, y, 0, static_cast<Index>(s)) = Cx{phases[s].phi(x, y), 0.f};
      }
    }
  }
  return t;
}

void print_kv(std::ostream &out, std::string_view key, double v) { fmt::print(out, "{}={:.6g}\n", key, v); }

// ---------------------------------------------------------------------------------------------

struct PhantomArgs
{
  Index grid = 96;
  Index coils = 8;
  int hf_blobs = 0;
  std::uint64_t seed = 42;
  float blob_radius = PhantomOptions{}.blob_radius;
  float blob_ramp = PhantomOptions{}.blob_ramp;

  PhantomOptions options() const
  {
    PhantomOptions o;
    o.grid = grid;
    o.ncoils = coils;
    o.hf_blobs = hf_blobs;
    o.seed = seed;
    o.blob_radius = blob_radius;
    o.blob_ramp = blob_ramp;
    return o;
  }
};

void add_phantom_flags(CLI::App *app, PhantomArgs &a)
{
  app->add_option("--grid", a.grid, "Grid size (even, >= 32)")->capture_default_str();
  app->add_option("--coils", a.coils, "Number of physical coils (>= 2)")->capture_default_str();
  app->add_option("--hf-blobs", a.hf_blobs, "Discs carrying high-frequency phase")->capture_default_str();
  app->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  app->add_option("--blob-radius", a.blob_radius, "Blob radius in pixels (<= 6)")->capture_default_str();
  app->add_option("--blob-ramp", a.blob_ramp, "Phase change across a blob in radians (>= pi)")->capture_default_str();
}

PhantomTruth build_phantom(PhantomArgs const &a)
{
  try {
    return make_phantom(a.options());
  } catch (std::invalid_argument const &e) {
    throw UsageError(e.what());
  }
}

std::vector<fs::path> write_truth(fs::path const &dir, PhantomTruth const &t, KTensor const &ksp)
{
  fs::create_directories(dir);
  std::vector<std::pair<std::string, KTensor>> files = {
    {"ksp.ksp1", ksp},
    {"coils.ksp1", coil_images(t)},
    {"maps_true.ksp1", phase_maps(t)},
    {"sens_true.ksp1", t.coils},
    {"magnitude.ksp1", real_to_ktensor(t.magnitude)},
    {"phase_smooth.ksp1", real_to_ktensor(t.smooth_phase)},
    {"phase_hf.ksp1", real_to_ktensor(t.hf_phase)},
    {"support.ksp1", mask_tensor(t.support)},
    {"blobs.ksp1", mask_tensor(t.blobs)},
  };
  std::vector<fs::path> written;
  for (auto const &[name, tensor] : files) {
    write_ktensor(dir / name, tensor);
    written.push_back(dir / name);
  }
  write_pgm(dir / "magnitude.pgm", t.magnitude);
  written.push_back(dir / "magnitude.pgm");
  return written;
}

// ---------------------------------------------------------------------------------------------

struct PipelineArgs
{
  PhantomArgs phantom;
  Index acs = 24;
  Index kernel = 6;
  double thresh = 0.001;
  double crop = 0.85;
  Index maps = 1;
  std::string calib = "vcc";
  int accel = 3;
  std::string pf = "1";
  std::string mode = "real";
  double lambda = ForwardModel{}.lambda_tikhonov;
  double lambda_imag = ForwardModel{}.lambda_imag;
  int iters = 100;
  double tol = 1e-6;
  bool skip_recon = false;
  std::string out = "vccrecon_out";
};

int pipeline(PipelineArgs const &a, std::ostream &out, std::ostream &err)
{
  fs::path const dir = a.out;
  PhantomTruth const truth = build_phantom(a.phantom);
  KTensor const ksp = simulate_kspace(truth);
  std::vector<fs::path> files = write_truth(dir, truth, ksp);
  auto save = [&](std::string const &name, KTensor const &t) {
    write_ktensor(dir / name, t);
    files.push_back(dir / name);
  };
  auto save_pgm = [&](std::string const &name, RealImage const &img, float gain, float peak) {
    write_pgm(dir / name, img, gain, peak);
    files.push_back(dir / name);
  };

  Fraction const pf = parse_fraction(a.pf);
  SamplingPattern const pattern = make_pattern(truth.grid(), truth.grid(), a.accel, a.acs, pf);
  KTensor const under = apply_pattern(ksp, pattern);
  save("ksp_under.ksp1", under);
  save("pattern.ksp1", mask_tensor(pattern.mask));

  Index const grid = truth.grid();
  std::map<std::string, double> metrics;
  SensitivityMaps maps;
  if (a.calib == "vcc") {
    VccKSpace const v = make_vcc(under);
    save("ksp_vcc.ksp1", v.data);
    CalibSubspace const sub = calibrate(vcc_calibration_block(v.data, a.acs), {a.kernel, a.thresh});
    metrics["nkernels"] = static_cast<double>(sub.nkernels());
    SensitivityMaps const raw = soft_weight(eigen_maps(sub, grid, grid, a.maps), a.crop);
    CenteredMaps const centered = center_phase(raw);
    metrics["pairing"] = check_conjugate_pairing(rotate_phase(raw, centered.phase), 0, truth.support);
    maps = align_sign(centered.maps, direct_maps(under, a.acs));
    save("phase.ksp1", phase_tensor(centered.phase));
  } else if (a.calib == "espirit") {
    CalibSubspace const sub = calibrate(extract_acs(under, a.acs, a.acs), {a.kernel, a.thresh});
    metrics["nkernels"] = static_cast<double>(sub.nkernels());
    maps = soft_weight(eigen_maps(sub, grid, grid, a.maps), a.crop);
  } else {
    if (a.maps != 1) {
      throw UsageError("direct maps provide a single set; use --maps 1");
    }
    maps = direct_maps(under, a.acs);
  }
  save("maps.ksp1", maps.maps);
  save("maps_eig.ksp1", maps.eigenvalue_tensor());
  for (Index s = 0; s < maps.nsets(); s++) {
    save_pgm(fmt::format("eig{}.pgm", s), maps.eigenvalues[static_cast<std::size_t>(s)], 1.f, 1.f);
  }

  KTensor const reference = ifftc(ksp, kSpatial);
  float const peak = rss(reference).maxCoeff();
  Projection const pr = project(reference, maps.maps, ProjectionMode::Real, truth.support);
  metrics["proj_real"] = pr.error.scalar;
  metrics["proj_complex"] = project(reference, maps.maps, ProjectionMode::Complex, truth.support).error.scalar;
  save_pgm("proj_real_error.pgm", pr.error.combined, 5.f, peak);

  if (!a.skip_recon) {
    ForwardModel const model{maps.maps, pattern, parse_solve_mode(a.mode), a.lambda, a.lambda_imag};
    ReconResult const res = solve(model, under, {a.iters, a.tol});
    if (!res.converged) {
      fmt::print(err, "warning: solver stopped at {} iterations without reaching tol\n", res.iterations);
    }
    KTensor const coils = synthesize_coil_images(res.image, maps.maps);
    ErrorMap const diff = diff_image(coils, reference, truth.support);
    save("recon.ksp1", res.image);
    save("recon_coils.ksp1", coils);
    save_pgm("recon.pgm", rss(coils), 1.f, peak);
    save_pgm("recon_diff.pgm", diff.combined, 5.f, peak);
    metrics["nrmse"] = nrmse(coils, reference, truth.support);
    metrics["edge"] = edge_sharpness(rss(coils), truth.support);
    metrics["iterations"] = res.iterations;
    metrics["converged"] = res.converged ? 1.0 : 0.0;
  }

  std::ofstream metrics_file(dir / "metrics.txt");
  for (auto const &[k, v] : metrics) {
    print_kv(out, k, v);
    print_kv(metrics_file, k, v);
  }
  metrics_file.close();
  files.push_back(dir / "metrics.txt");

  std::vector<std::pair<std::string, std::string>> manifest = {
    {"grid", std::to_string(a.phantom.grid)},
    {"coils", std::to_string(a.phantom.coils)},
    {"hf_blobs", std::to_string(a.phantom.hf_blobs)},
    {"seed", std::to_string(a.phantom.seed)},
    {"blob_radius", fmt::format("{}", a.phantom.blob_radius)},
    {"blob_ramp", fmt::format("{}", a.phantom.blob_ramp)},
    {"calib", a.calib},
    {"acs", std::to_string(a.acs)},
    {"kernel", std::to_string(a.kernel)},
    {"thresh", fmt::format("{}", a.thresh)},
    {"crop", fmt::format("{}", a.crop)},
    {"maps", std::to_string(a.maps)},
    {"R", std::to_string(a.accel)},
    {"pf", fmt::format("{}/{}", pf.num, pf.den)},
    {"mode", a.mode},
    {"lambda", fmt::format("{}", a.lambda)},
    {"lambda_imag", fmt::format("{}", a.lambda_imag)},
    {"iters", std::to_string(a.iters)},
    {"tol", fmt::format("{}", a.tol)},
    {"skip_recon", a.skip_recon ? "1" : "0"},
  };
  std::sort(files.begin(), files.end());
  std::ofstream mf(dir / "manifest.txt");
  for (auto const &[k, v] : manifest) {
    fmt::print(mf, "{}={}\n", k, v);
  }
  for (auto const &f : files) {
    fmt::print(mf, "sha256.{}={}\n", f.filename().string(), sha256_file(f.string()));
  }
  mf.close();
  if (!mf) {
    throw IoError(IoErrc::Write, fmt::format("cannot write {}", (dir / "manifest.txt").string()));
  }
  fmt::print(out, "manifest={}\n", (dir / "manifest.txt").string());
  return 0;
}

// ---------------------------------------------------------------------------------------------

int dispatch(CLI::App &app, std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (0 = all cores)")
    ->envname("VCCRECON_THREADS")
    ->check(CLI::NonNegativeNumber);
  app.require_subcommand(1);
  app.fallthrough();

  PhantomArgs ph;
  std::string ph_out;
  auto *phantom = app.add_subcommand("phantom", "Simulate a multi-coil phantom and its k-space");
  add_phantom_flags(phantom, ph);
  phantom->add_option("--out", ph_out, "Output directory")->required();

  std::string vcc_in, vcc_out;
  auto *vcc = app.add_subcommand("vcc", "Append virtual conjugate channels");
  vcc->add_option("--in", vcc_in, "Input k-space (x, y, coil)")->required();
  vcc->add_option("--out", vcc_out, "Output k-space with 2N channels")->required();

  std::string ec_in, ec_out;
  Index ec_acs = 24, ec_kernel = 6, ec_maps = 1;
  double ec_thresh = 0.001, ec_crop = 0.85;
  bool ec_direct = false, ec_vcc = false;
  auto *ecalib = app.add_subcommand("ecalib", "ESPIRiT calibration (eigenvalues go to <out>_eig.ksp1)");
  ecalib->add_option("--in", ec_in, "k-space (x, y, coil); VCC k-space for phase-carrying maps")
    ->required();
  ecalib->add_option("--acs", ec_acs, "ACS block size")->capture_default_str()->check(CLI::PositiveNumber);
  ecalib->add_option("--kernel", ec_kernel, "Kernel size")->capture_default_str()->check(CLI::PositiveNumber);
  ecalib->add_option("--thresh", ec_thresh, "Singular-value threshold relative to the largest")
    ->capture_default_str()
    ->check(CLI::Range(0.0, 1.0));
  ecalib->add_option("--maps", ec_maps, "Number of map sets")->capture_default_str()->check(CLI::PositiveNumber);
  ecalib->add_option("--crop", ec_crop, "Eigenvalue where the soft weight reaches 0")
    ->capture_default_str()
    ->check(CLI::Range(0.0, 0.999999));
  ecalib->add_flag("--vcc", ec_vcc, "Input is VCC k-space; calibrate on the conjugate-symmetric ACS part");
  ecalib->add_flag("--direct", ec_direct, "Direct low-resolution maps from the k-space centre instead");
  ecalib->add_option("--out", ec_out, "Output maps (x, y, coil, set)")->required();

  std::string pc_maps, pc_out, pc_phase, pc_ref;
  auto *phasecal = app.add_subcommand("phasecal", "Phase-centre 2N-channel maps and drop the virtual channels");
  phasecal->add_option("--maps", pc_maps, "Maps over 2N channels")->required();
  phasecal->add_option("--out", pc_out, "Centred maps over N channels")->required();
  phasecal->add_option("--phase", pc_phase, "Output phase map (x, y, set)")->required();
  phasecal->add_option("--align-ref", pc_ref, "Low-resolution reference maps for sign alignment")
    ;

  std::string rc_ksp, rc_maps, rc_pattern = "R=3,acs=24", rc_mode = "real", rc_out, rc_coils;
  double rc_lambda = ForwardModel{}.lambda_tikhonov, rc_lambda_imag = ForwardModel{}.lambda_imag, rc_tol = 1e-6;
  int rc_iters = 100;
  auto *recon = app.add_subcommand("recon", "Iterative reconstruction");
  recon->add_option("--ksp", rc_ksp, "Fully sampled or undersampled k-space")->required();
  recon->add_option("--maps", rc_maps, "Sensitivity maps")->required();
  recon->add_option("--pattern", rc_pattern, "Sampling, e.g. R=3,acs=24,pf=5/8")->capture_default_str();
  recon->add_option("--mode", rc_mode, "Solution variable")
    ->capture_default_str()
    ->check(CLI::IsMember({"complex", "real", "imagreg"}));
  recon->add_option("--lambda", rc_lambda, "Tikhonov weight, relative to ||A^H A||")
    ->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  recon->add_option("--lambda-imag", rc_lambda_imag, "Imaginary-part penalty, relative to ||A^H A||")
    ->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  recon->add_option("--iters", rc_iters, "Maximum CG iterations")->capture_default_str()->check(CLI::PositiveNumber);
  recon->add_option("--tol", rc_tol, "Relative residual tolerance")
    ->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  recon->add_option("--out", rc_out, "Component images (x, y, set)")->required();
  recon->add_option("--coils-out", rc_coils, "Also write the synthesized coil images");

  std::string pj_coils, pj_maps, pj_mode = "complex", pj_out, pj_err, pj_mask;
  auto *projectc = app.add_subcommand("project", "Project coil images onto the span of the maps");
  projectc->add_option("--coils", pj_coils, "Coil images (x, y, coil)")->required();
  projectc->add_option("--maps", pj_maps, "Sensitivity maps")->required();
  projectc->add_option("--mode", pj_mode, "Projection")->capture_default_str()->check(CLI::IsMember({"complex", "real"}));
  projectc->add_option("--mask", pj_mask, "Support mask for the scalar residual");
  projectc->add_option("--out", pj_out, "Projected coil images")->required();
  projectc->add_option("--err", pj_err, "Residual coil images")->required();

  std::string mt_a, mt_b, mt_mask;
  auto *metricsc = app.add_subcommand("metrics", "NRMSE of a against reference b");
  metricsc->add_option("--a", mt_a, "Test tensor")->required();
  metricsc->add_option("--b", mt_b, "Reference tensor")->required();
  metricsc->add_option("--mask", mt_mask, "Mask (x, y)");

  PipelineArgs pl;
  auto *pipe = app.add_subcommand("pipeline", "phantom -> pattern -> vcc -> ecalib -> phasecal -> recon -> metrics");
  add_phantom_flags(pipe, pl.phantom);
  pipe->add_option("--acs", pl.acs, "ACS block size")->capture_default_str()->check(CLI::PositiveNumber);
  pipe->add_option("--kernel", pl.kernel, "Kernel size")->capture_default_str()->check(CLI::PositiveNumber);
  pipe->add_option("--thresh", pl.thresh, "Singular-value threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  pipe->add_option("--crop", pl.crop, "Soft-weight lower eigenvalue")
    ->capture_default_str()
    ->check(CLI::Range(0.0, 0.999999));
  pipe->add_option("--maps", pl.maps, "Number of map sets")->capture_default_str()->check(CLI::PositiveNumber);
  pipe->add_option("--calib", pl.calib, "Map estimation")
    ->capture_default_str()
    ->check(CLI::IsMember({"vcc", "espirit", "direct"}));
  pipe->add_option("-R,--accel", pl.accel, "Acceleration along y")->capture_default_str()->check(CLI::PositiveNumber);
  pipe->add_option("--pf", pl.pf, "Partial-Fourier fraction along x, e.g. 5/8")->capture_default_str();
  pipe->add_option("--mode", pl.mode, "Solution variable")
    ->capture_default_str()
    ->check(CLI::IsMember({"complex", "real", "imagreg"}));
  pipe->add_option("--lambda", pl.lambda, "Tikhonov weight")->capture_default_str()->check(CLI::NonNegativeNumber);
  pipe->add_option("--lambda-imag", pl.lambda_imag, "Imaginary-part penalty")
    ->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  pipe->add_option("--iters", pl.iters, "Maximum CG iterations")->capture_default_str()->check(CLI::PositiveNumber);
  pipe->add_option("--tol", pl.tol, "Relative residual tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
  pipe->add_flag("--skip-recon", pl.skip_recon, "Stop after calibration and projection");
  pipe->add_option("--out", pl.out, "Output directory")->capture_default_str();
  pipe->footer(kRecipes);
  app.footer(kRecipes);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (CLI::CallForHelp const &e) {
    app.exit(e, out, err);
    return 0;
  } catch (CLI::CallForAllHelp const &e) {
    app.exit(e, out, err);
    return 0;
  } catch (CLI::ParseError const &e) {
    app.exit(e, out, err);
    return 1;
  }
  set_max_threads(threads);

  if (phantom->parsed()) {
    PhantomTruth const t = build_phantom(ph);
    write_truth(ph_out, t, simulate_kspace(t));
    return 0;
  }
  if (vcc->parsed()) {
    VccKSpace const v = make_vcc(read_ktensor(vcc_in));
    write_ktensor(vcc_out, v.data);
    fmt::print(out, "coils={}\n", v.data.extent(Dim::Coil));
    return 0;
  }
  if (ecalib->parsed()) {
    KTensor const ksp = read_ktensor(ec_in);
    require_dims(ksp, {Dim::X, Dim::Y, Dim::Coil}, "ecalib input");
    if (ec_direct) {
      if (ec_maps != 1) {
        throw UsageError("direct maps provide a single set; use --maps 1");
      }
      write_maps(ec_out, direct_maps(ksp, ec_acs));
      return 0;
    }
    if (ec_maps > ksp.extent(Dim::Coil)) {
      throw UsageError(fmt::format("--maps {} exceeds the {} channels", ec_maps, ksp.extent(Dim::Coil)));
    }
    KTensor const acs = ec_vcc ? vcc_calibration_block(ksp, ec_acs) : extract_acs(ksp, ec_acs, ec_acs);
    CalibSubspace const sub = calibrate(acs, {ec_kernel, ec_thresh});
    SensitivityMaps const maps = eigen_maps(sub, ksp.extent(Dim::X), ksp.extent(Dim::Y), ec_maps);
    write_maps(ec_out, soft_weight(maps, ec_crop));
    fmt::print(out, "nkernels={}\n", sub.nkernels());
    return 0;
  }
  if (phasecal->parsed()) {
    SensitivityMaps const maps = read_maps(pc_maps);
    CenteredMaps centered = center_phase(maps);
    if (!pc_ref.empty()) {
      centered.maps = align_sign(centered.maps, read_maps(pc_ref));
    }
    write_maps(pc_out, centered.maps);
    write_ktensor(pc_phase, phase_tensor(centered.phase));
    double const valid = static_cast<double>(centered.phase[0].valid.count()) /
                         static_cast<double>(centered.phase[0].valid.size());
    print_kv(out, "valid_fraction", valid);
    return 0;
  }
  if (recon->parsed()) {
    KTensor const ksp = read_ktensor(rc_ksp);
    KTensor const maps = read_maps_tensor(rc_maps);
    SamplingPattern const pattern = parse_pattern(rc_pattern, ksp.extent(Dim::X), ksp.extent(Dim::Y));
    ForwardModel const model{maps, pattern, parse_solve_mode(rc_mode), rc_lambda, rc_lambda_imag};
    ReconResult const res = solve(model, ksp, {rc_iters, rc_tol});
    if (!res.converged) {
      fmt::print(err, "warning: solver stopped at {} iterations without reaching tol\n", res.iterations);
    }
    write_ktensor(rc_out, res.image);
    if (!rc_coils.empty()) {
      write_ktensor(rc_coils, synthesize_coil_images(res.image, maps));
    }
    fmt::print(out, "iterations={}\nconverged={}\n", res.iterations, res.converged ? 1 : 0);
    print_kv(out, "residual", res.residual_history.back());
    return 0;
  }
  if (projectc->parsed()) {
    KTensor const coils = read_ktensor(pj_coils);
    KTensor const maps = read_maps_tensor(pj_maps);
    Mask const mask = pj_mask.empty() ? Mask{} : read_mask(pj_mask);
    Projection const p =
      project(coils, maps, pj_mode == "real" ? ProjectionMode::Real : ProjectionMode::Complex, mask);
    write_ktensor(pj_out, p.projected);
    write_ktensor(pj_err, p.error.per_coil);
    print_kv(out, "residual", p.error.scalar);
    return 0;
  }
  if (metricsc->parsed()) {
    KTensor const a = read_ktensor(mt_a);
    KTensor const b = read_ktensor(mt_b);
    Mask const mask = mt_mask.empty() ? Mask{} : read_mask(mt_mask);
    print_kv(out, "nrmse", nrmse(a, b, mask));
    return 0;
  }
  if (pipe->parsed()) {
    return pipeline(pl, out, err);
  }
  return 1;
}

} // namespace

std::string sha256_file(std::string const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(IoErrc::Open, fmt::format("cannot open {}", path));
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  for (unsigned int i = 0; i < len; i++) {
    hex += fmt::format("{:02x}", md[i]);
  }
  return hex;
}

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"VCC-ESPIRiT sensitivity calibration and phase-constrained reconstruction", "vccrecon"};
  try {
    return dispatch(app, args, out, err);
  } catch (std::invalid_argument const &e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  } catch (DataError const &e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  } catch (std::exception const &e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  }
}

int run(int argc, char **argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

} // namespace vcc::cli
