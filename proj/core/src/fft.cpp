#include "vccrecon/fft.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace vcc {

namespace {

struct PlanKey
{
  std::vector<std::tuple<int, int>> transform; // (n, stride)
  std::vector<std::tuple<int, int>> batch;
  int sign;

  auto operator<=>(PlanKey const &) const = default;
};

// FFTW's planner is not thread-safe; execution of an existing plan on new arrays is.
class PlanCache
{
public:
  ~PlanCache()
  {
    for (auto &[k, p] : plans_) {
      fftwf_destroy_plan(p);
    }
  }

  fftwf_plan get(PlanKey const &key, fftwf_complex *buffer)
  {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) {
      return it->second;
    }
    std::vector<fftwf_iodim> tdims, bdims;
    for (auto [n, s] : key.transform) {
      tdims.push_back({n, s, s});
    }
    for (auto [n, s] : key.batch) {
      bdims.push_back({n, s, s});
    }
    fftwf_plan p = fftwf_plan_guru_dft(
      static_cast<int>(tdims.size()), tdims.data(), static_cast<int>(bdims.size()), bdims.data(), buffer, buffer,
      key.sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) {
      throw std::runtime_error("FFTW failed to create a plan");
    }
    plans_.emplace(key, p);
    return p;
  }

private:
  std::mutex mutex_;
  std::map<PlanKey, fftwf_plan> plans_;
};

PlanCache &plan_cache()
{
  static PlanCache cache;
  return cache;
}

// Centering for even N: fftc = (-1)^(N/2) (-1)^k FFT((-1)^x m), applied per transformed dim.
void modulate(KTensor &t, std::span<Dim const> dims, float global)
{
  std::vector<Index> strides, extents;
  for (Dim d : dims) {
    strides.push_back(t.stride(d));
    extents.push_back(t.extent(d));
  }
  auto data = t.data();
  std::vector<DimExtent> all(t.dims().begin(), t.dims().end());
  // Walk every element and compute the parity of the transformed coordinates.
  for (Index i = 0; i < t.size(); i++) {
    int parity = 0;
    for (std::size_t k = 0; k < strides.size(); k++) {
      parity += static_cast<int>((i / strides[k]) % extents[k]);
    }
    float const sgn = (parity & 1) ? -global : global;
    data[static_cast<std::size_t>(i)] *= sgn;
  }
}

void transform(KTensor &t, std::span<Dim const> dims, int sign)
{
  if (dims.empty()) {
    return;
  }
  PlanKey key;
  key.sign = sign;
  bool transformed[4] = {false, false, false, false};
  int half_sum = 0;
  double n_total = 1.0;
  for (Dim d : dims) {
    if (!t.has(d)) {
      throw DataError(fmt::format("fftc: tensor has no dimension '{}'", dim_name(d)));
    }
    if (transformed[static_cast<int>(d)]) {
      throw DataError(fmt::format("fftc: dimension '{}' listed twice", dim_name(d)));
    }
    Index const n = t.extent(d);
    if (n % 2 != 0) {
      throw DataError(fmt::format("fftc: dimension '{}' has odd extent {}", dim_name(d), n));
    }
    transformed[static_cast<int>(d)] = true;
    half_sum += static_cast<int>(n / 2);
    n_total *= static_cast<double>(n);
    // FFTW wants the slowest dimension first.
    key.transform.insert(key.transform.begin(), {static_cast<int>(n), static_cast<int>(t.stride(d))});
  }
  for (auto const &d : t.dims()) {
    if (!transformed[static_cast<int>(d.name)]) {
      key.batch.emplace_back(static_cast<int>(d.extent), static_cast<int>(t.stride(d.name)));
    }
  }

  auto *buf = reinterpret_cast<fftwf_complex *>(t.data().data());
  fftwf_plan plan = plan_cache().get(key, buf);

  modulate(t, dims, 1.f);
  fftwf_execute_dft(plan, buf, buf);
  float const scale = static_cast<float>(1.0 / std::sqrt(n_total));
  modulate(t, dims, (half_sum % 2) ? -scale : scale);
}

} // namespace

void fftc_inplace(KTensor &t, std::span<Dim const> dims) { transform(t, dims, FFTW_FORWARD); }
void ifftc_inplace(KTensor &t, std::span<Dim const> dims) { transform(t, dims, FFTW_BACKWARD); }

KTensor fftc(KTensor const &t, std::span<Dim const> dims)
{
  KTensor out = t;
  fftc_inplace(out, dims);
  return out;
}

KTensor ifftc(KTensor const &t, std::span<Dim const> dims)
{
  KTensor out = t;
  ifftc_inplace(out, dims);
  return out;
}

} // namespace vcc
