#pragma once

// fft.hpp - thin wrapper over FFTW3 double-precision 1-D transforms.
//
// Plans are cached per thread and per (size, direction). Plan creation and
// destruction go through a global mutex (the FFTW planner is not thread
// safe); execution runs lock-free on thread-owned buffers. FFTW_ESTIMATE
// keeps plan selection deterministic, so results are bit-identical across
// runs and thread counts.

#include "isar/types.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace isar::fft {

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanEntry {
  fftw_plan plan = nullptr;
  fftw_complex* buf = nullptr;
};

class PlanCache {
 public:
  PlanCache() = default;
  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [key, entry] : plans_) {
      fftw_destroy_plan(entry.plan);
      fftw_free(entry.buf);
    }
  }

  const PlanEntry& get(std::size_t n, int sign) {
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 1) | (sign == FFTW_FORWARD ? 0u : 1u);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    PlanEntry entry;
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      entry.buf = fftw_alloc_complex(n);
      entry.plan = fftw_plan_dft_1d(static_cast<int>(n), entry.buf, entry.buf, sign, FFTW_ESTIMATE);
    }
    if (!entry.plan) throw std::runtime_error("fft: plan creation failed");
    return plans_.emplace(key, entry).first->second;
  }

 private:
  std::unordered_map<std::uint64_t, PlanEntry> plans_;
};

inline PlanCache& cache() {
  thread_local PlanCache c;
  return c;
}

inline void execute(std::vector<Complex>& x, int sign) {
  const std::size_t n = x.size();
  if (n < 2) return;
  const PlanEntry& entry = detail::cache().get(n, sign);
  // std::complex<double> is layout-compatible with fftw_complex (double[2]).
  std::memcpy(entry.buf, reinterpret_cast<const double*>(x.data()), n * sizeof(Complex));
  fftw_execute(entry.plan);
  std::memcpy(reinterpret_cast<double*>(x.data()), entry.buf, n * sizeof(Complex));
}

}  // namespace detail

/// Unnormalized forward DFT, in place.
inline void forward_raw(std::vector<Complex>& x) { detail::execute(x, FFTW_FORWARD); }

/// Unnormalized inverse DFT (no 1/N), in place.
inline void inverse_raw(std::vector<Complex>& x) { detail::execute(x, FFTW_BACKWARD); }

/// Unitary transforms: 1/sqrt(N) both directions, so Parseval holds symmetrically.
inline void forward_unitary(std::vector<Complex>& x) {
  detail::execute(x, FFTW_FORWARD);
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : x) v *= s;
}

inline void inverse_unitary(std::vector<Complex>& x) {
  detail::execute(x, FFTW_BACKWARD);
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : x) v *= s;
}

/// Signed DFT bin frequency index for bin m of an N-point transform:
/// m for m < (N+1)/2, m - N otherwise.
inline double signed_bin_index(std::size_t m, std::size_t n) {
  return (m < (n + 1) / 2) ? static_cast<double>(m)
                           : static_cast<double>(m) - static_cast<double>(n);
}

/// Circular convolution of x with kernel on x's grid (kernel zero-padded to
/// x.size()). True discrete convolution scaling: an impulse in x reproduces
/// the kernel exactly.
inline std::vector<Complex> convolve_circular(std::span<const Complex> x,
                                              std::span<const Complex> kernel) {
  if (kernel.size() > x.size())
    throw std::invalid_argument("convolve_circular: kernel longer than signal");
  const std::size_t n = x.size();
  std::vector<Complex> a(x.begin(), x.end());
  std::vector<Complex> b(n, Complex{0.0, 0.0});
  std::copy(kernel.begin(), kernel.end(), b.begin());
  forward_raw(a);
  forward_raw(b);
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
  inverse_raw(a);
  const double s = 1.0 / static_cast<double>(n);
  for (auto& v : a) v *= s;
  return a;
}

}  // namespace isar::fft
