#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "cuechaos/errors.hpp"

namespace cuechaos {

/// Sign of the exponent in the unnormalized DFT
///   out[g] = sum_m in[m] exp(sign * 2 pi i m g / size).
enum class FftSign { kNegative = FFTW_FORWARD, kPositive = FFTW_BACKWARD };

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans live in a thread-local cache, creation goes through this
// mutex.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  FftPlan(std::size_t size, FftSign sign) : size_(size) {
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(size), in_, out_, static_cast<int>(sign),
                             FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }

  void run(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    auto* src = reinterpret_cast<const double*>(in.data());
    for (std::size_t i = 0; i < size_; ++i) {
      in_[i][0] = src[2 * i];
      in_[i][1] = src[2 * i + 1];
    }
    fftw_execute(plan_);
    auto* dst = reinterpret_cast<double*>(out.data());
    for (std::size_t i = 0; i < size_; ++i) {
      dst[2 * i] = out_[i][0];
      dst[2 * i + 1] = out_[i][1];
    }
  }

 private:
  std::size_t size_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

inline FftPlan& cached_plan(std::size_t size, FftSign sign) {
  thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[{size, static_cast<int>(sign)}];
  if (!slot) slot = std::make_unique<FftPlan>(size, sign);
  return *slot;
}

}  // namespace detail

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Unnormalized DFT of `in` (size must be a power of two).
inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in,
                                             FftSign sign) {
  if (!is_power_of_two(in.size())) throw InvalidArgument("dft: size must be a power of two");
  std::vector<std::complex<double>> out(in.size());
  detail::cached_plan(in.size(), sign).run(in, out);
  return out;
}

/// Values of the polynomial sum_m coeffs[m] z^m at z = exp(2 pi i g / size),
/// g = 0..size-1. Coefficients beyond `size` are folded (aliased).
inline std::vector<std::complex<double>> eval_on_roots_of_unity(
    std::span<const std::complex<double>> coeffs, std::size_t size) {
  std::vector<std::complex<double>> padded(size);
  for (std::size_t m = 0; m < coeffs.size(); ++m) padded[m % size] += coeffs[m];
  return dft(padded, FftSign::kPositive);
}

/// Fourier coefficients c_j = (1/size) sum_g samples[g] exp(-2 pi i j g / size)
/// returned for j = -half..half (index j + half), half < size / 2.
inline std::vector<std::complex<double>> fourier_from_samples(
    std::span<const std::complex<double>> samples, std::size_t half) {
  const std::size_t size = samples.size();
  if (2 * half >= size) throw InvalidArgument("fourier_from_samples: half too large");
  const auto raw = dft(samples, FftSign::kNegative);
  std::vector<std::complex<double>> c(2 * half + 1);
  const double inv = 1.0 / static_cast<double>(size);
  for (std::size_t j = 0; j <= half; ++j) {
    c[half + j] = raw[j] * inv;
    if (j > 0) c[half - j] = raw[size - j] * inv;
  }
  return c;
}

/// Linear convolution of two sequences via zero-padded transforms.
inline std::vector<std::complex<double>> convolve(std::span<const std::complex<double>> a,
                                                  std::span<const std::complex<double>> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t size = next_power_of_two(out_len);
  std::vector<std::complex<double>> pa(size), pb(size);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  auto fa = dft(pa, FftSign::kNegative);
  const auto fb = dft(pb, FftSign::kNegative);
  for (std::size_t i = 0; i < size; ++i) fa[i] *= fb[i];
  auto c = dft(fa, FftSign::kPositive);
  c.resize(out_len);
  const double inv = 1.0 / static_cast<double>(size);
  for (auto& v : c) v *= inv;
  return c;
}

}  // namespace cuechaos
