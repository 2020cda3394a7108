#pragma once

// Gaussian reference field X^{(M)}(theta) = sum_{j<=M} Re(Z_j e^{-ij theta}) / sqrt(j)
// with i.i.d. standard complex Z_j, its covariance Sigma^{(M)}, Gaussian
// chaos masses, and the dyadic barrier events.

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "cuechaos/cue_sampler.hpp"
#include "cuechaos/errors.hpp"
#include "cuechaos/rng.hpp"

namespace cuechaos {

/// Sigma^{(M)}(delta) = sum_{j=1}^{M} cos(j delta) / (2j), summed exactly.
inline double covariance_sigma(int m, double delta) {
  if (m < 1) throw InvalidArgument("covariance_sigma: m must be >= 1");
  double s = 0.0;
  for (int j = m; j >= 1; --j) s += std::cos(j * delta) / (2.0 * j);
  return s;
}

struct GaussianDraw {
  int m = 0;
  std::vector<cplx> z;  // Z_1..Z_M
  StreamKey key{};
};

inline GaussianDraw sample_gaussian_draw(int m, RngStream& stream) {
  if (m < 1) throw InvalidArgument("sample_gaussian_draw: m must be >= 1");
  GaussianDraw d;
  d.m = m;
  d.key = stream.key();
  d.z.resize(static_cast<std::size_t>(m));
  for (auto& v : d.z) v = stream.complex_normal();
  return d;
}

/// X^{(M)} on the grid from given Gaussians. Requires grid_size >= 2M.
inline FieldGrid gaussian_field_from_draw(const GaussianDraw& draw, std::size_t grid_size) {
  if (!is_power_of_two(grid_size)) throw InvalidArgument("gaussian field: grid size must be 2^k");
  if (grid_size < 2 * static_cast<std::size_t>(draw.m))
    throw InvalidArgument("gaussian field: grid must resolve all modes (G >= 2M)");
  FieldGrid f;
  f.grid_size = grid_size;
  f.kind = FieldKind::kGaussian;
  f.m = draw.m;
  f.key = draw.key;
  f.values = real_trig_sum_on_grid(draw.m, grid_size, [&](int j) {
    return draw.z[static_cast<std::size_t>(j - 1)] / std::sqrt(static_cast<double>(j));
  });
  return f;
}

inline FieldGrid sample_gaussian_field(int m, std::size_t grid_size, RngStream& stream) {
  return gaussian_field_from_draw(sample_gaussian_draw(m, stream), grid_size);
}

/// X^{(M)}(theta) at a single angle.
inline double gaussian_field_at(const GaussianDraw& draw, int m, double theta) {
  double s = 0.0;
  for (int j = 1; j <= m; ++j)
    s += std::real(draw.z[static_cast<std::size_t>(j - 1)] * std::polar(1.0, -j * theta)) /
         std::sqrt(static_cast<double>(j));
  return s;
}

/// Normalized Gaussian chaos mass (1/G) sum_g exp(beta X(theta_g) - beta^2 Sigma(0) / 2).
inline double gaussian_mass_from_field(const FieldGrid& field, double beta) {
  if (field.kind != FieldKind::kGaussian) throw InvalidArgument("gaussian_mass: not a Gaussian field");
  const double shift = 0.5 * beta * beta * covariance_sigma(field.m, 0.0);
  double s = 0.0;
  for (double v : field.values) s += std::exp(beta * v - shift);
  return s / static_cast<double>(field.values.size());
}

inline double gaussian_mass(int m, double beta, std::size_t grid_size, RngStream& stream) {
  if (!(beta >= 0.0 && beta < 2.0)) throw InvalidArgument("gaussian_mass: beta must be in [0, 2)");
  return gaussian_mass_from_field(sample_gaussian_field(m, grid_size, stream), beta);
}

/// Multi-scale barrier: value(k) <= gamma * Sigma^{(2^k)}(0) + offset(k) for
/// every k in [l, top].
struct BarrierSpec {
  double gamma = 1.0;
  int l = 1;
  int top = 1;
  std::map<int, double> offsets;  // missing scales use 0

  double threshold(int k) const {
    const auto it = offsets.find(k);
    const double off = it == offsets.end() ? 0.0 : it->second;
    return gamma * covariance_sigma(1 << k, 0.0) + off;
  }

  void validate() const {
    if (l < 0 || top < l) throw InvalidArgument("BarrierSpec: need 0 <= l <= top");
    if (top > 30) throw InvalidArgument("BarrierSpec: top scale too large");
    if (!std::isfinite(gamma)) throw InvalidArgument("BarrierSpec: gamma must be finite");
  }
};

/// k_N = floor(log2 N^{1-delta}).
inline int dyadic_top(int n, double delta) {
  if (n < 1 || !(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("dyadic_top: bad arguments");
  // The small guard keeps exact powers like 64^{0.5} = 8 from rounding down.
  return static_cast<int>(std::floor((1.0 - delta) * std::log2(static_cast<double>(n)) + 1e-12));
}

/// `scales` maps k to the truncated field value at truncation 2^k.
inline bool barrier_indicator(const std::map<int, double>& scales, const BarrierSpec& spec) {
  spec.validate();
  for (int k = spec.l; k <= spec.top; ++k) {
    const auto it = scales.find(k);
    if (it == scales.end()) throw InvalidArgument("barrier_indicator: missing scale");
    if (!(it->second <= spec.threshold(k))) return false;
  }
  return true;
}

/// Offsets turning gamma*Sigma^{(2^k)}(0) + offset into the shifted Gaussian
/// barrier Y_{2^k} = (gamma - beta) Sigma^{(2^k)}(0) - beta Sigma^{(2^k)}(delta).
inline std::map<int, double> gaussian_barrier_offsets(const BarrierSpec& spec, double beta,
                                                      double delta) {
  std::map<int, double> out;
  for (int k = spec.l; k <= spec.top; ++k)
    out[k] = -beta * covariance_sigma(1 << k, 0.0) - beta * covariance_sigma(1 << k, delta);
  return out;
}

}  // namespace cuechaos
