#pragma once
/**
 * Spatial Semantic Pointer algebra over real hypervectors.
 *
 * A hypervector of dimension d is stored in the time domain. Its DFT
 * (unnormalized forward transform) has unit-magnitude coefficients for every
 * vector produced by make_axis / fractional_bind / encode_point2d, and the
 * inverse transform carries the 1/d factor, so those vectors have unit
 * Euclidean norm and the binding identity is the unit impulse.
 *
 *   fractional_bind(phi, x, l) = IDFT( DFT(phi)^(x/l) )
 *   bind(a, b)                 = circular convolution of a and b
 *   bundle(vs)                 = element-wise sum
 *   dot_similarity(a, b)       = sum of the Hadamard product
 *
 * The seed-averaged similarity dot(phi(x), phi(x + D)) tends to
 * sin(pi D / l) / (pi D / l) for phasors uniform on (-pi, pi].
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdogm/detail/fft.hpp"
#include "hdogm/errors.hpp"

namespace hdogm {

using detail::Complex;

/// Positive kernel width; same units as the encoded coordinate.
class LengthScale {
 public:
  explicit LengthScale(double l) : l_(l) {
    detail::require(std::isfinite(l) && l > 0.0, "length scale must be finite and > 0");
  }
  double value() const noexcept { return l_; }

 private:
  double l_;
};

class Hypervector {
 public:
  Hypervector() = default;
  explicit Hypervector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) detail::require(std::isfinite(v), "hypervector values must be finite");
  }

  static Hypervector zeros(std::size_t dim) { return Hypervector(std::vector<double>(dim, 0.0)); }

  /// Unit impulse: the identity element of circular convolution.
  static Hypervector identity(std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    if (dim > 0) v[0] = 1.0;
    return Hypervector(std::move(v));
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
  }

  friend bool operator==(const Hypervector&, const Hypervector&) = default;

 private:
  std::vector<double> values_;
};

namespace detail {

// splitmix64 finalizer; used to derive independent per-axis seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// sum_n a[n] b[n] computed from the half spectra of two real length-n vectors.
inline double spectral_dot(std::span<const Complex> a, std::span<const Complex> b, std::size_t n) {
  const std::size_t bins = n / 2 + 1;
  const bool even = (n % 2 == 0);
  double acc = a[0].real() * b[0].real() + a[0].imag() * b[0].imag();
  const std::size_t last = even ? bins - 1 : bins;
  double mid = 0.0;
  for (std::size_t k = 1; k < last; ++k) mid += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  acc += 2.0 * mid;
  if (even && bins > 1) {
    const std::size_t k = bins - 1;
    acc += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  }
  return acc / static_cast<double>(n);
}

inline void check_same_dim(const Hypervector& a, const Hypervector& b) {
  require(a.dim() == b.dim(), "hypervector dimension mismatch: " + std::to_string(a.dim()) +
                                  " vs " + std::to_string(b.dim()));
  require(a.dim() > 0, "hypervectors must be non-empty");
}

}  // namespace detail

/// Random unit-magnitude spectrum with conjugate symmetry (so the time-domain
/// vector is real). Self-conjugate bins (DC, and Nyquist for even dim) have phase 0.
class AxisBasis {
 public:
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// All dim phase angles; phasors()[dim - k] == -phasors()[k].
  std::span<const double> phasors() const noexcept { return phases_; }

  /// Phases of the non-redundant half spectrum (dim/2 + 1 bins).
  std::span<const double> half_phasors() const noexcept {
    return std::span<const double>(phases_).first(dim_ / 2 + 1);
  }

  /// Half spectrum raised to the power `exponent`.
  std::vector<Complex> spectrum(double exponent) const {
    const auto half = half_phasors();
    std::vector<Complex> s(half.size());
    for (std::size_t k = 0; k < half.size(); ++k) s[k] = std::polar(1.0, half[k] * exponent);
    return s;
  }

  Hypervector vector() const {
    return Hypervector(detail::RealFft::get(dim_).inverse(spectrum(1.0)));
  }

  friend bool operator==(const AxisBasis&, const AxisBasis&) = default;

 private:
  friend AxisBasis make_axis(std::size_t dim, std::uint64_t seed);
  AxisBasis(std::size_t dim, std::uint64_t seed, std::vector<double> phases)
      : dim_(dim), seed_(seed), phases_(std::move(phases)) {}

  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> phases_;
};

inline AxisBasis make_axis(std::size_t dim, std::uint64_t seed) {
  detail::require(dim >= 2, "axis dimension must be >= 2");
  constexpr double pi = std::numbers::pi;
  std::vector<double> phases(dim, 0.0);
  // Raw 53-bit draws so the sequence does not depend on the standard
  // library's distribution implementation.
  std::uint64_t state = seed;
  for (std::size_t k = 1; 2 * k < dim; ++k) {
    state = detail::mix_seed(state);
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;  // [0, 1)
    phases[k] = pi - 2.0 * pi * u;                                  // (-pi, pi]
    phases[dim - k] = -phases[k];
  }
  return AxisBasis(dim, seed, std::move(phases));
}

inline Hypervector fractional_bind(const AxisBasis& basis, double x, const LengthScale& l) {
  detail::require(std::isfinite(x), "fractional_bind: coordinate must be finite");
  return Hypervector(detail::RealFft::get(basis.dim()).inverse(basis.spectrum(x / l.value())));
}

inline Hypervector bind(const Hypervector& a, const Hypervector& b) {
  detail::check_same_dim(a, b);
  const auto& fft = detail::RealFft::get(a.dim());
  auto fa = fft.forward(a.values());
  const auto fb = fft.forward(b.values());
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  return Hypervector(fft.inverse(std::move(fa)));
}

/// Inverse of bind with respect to b: bind(unbind(c, b), b) == c.
inline Hypervector unbind(const Hypervector& c, const Hypervector& b) {
  detail::check_same_dim(c, b);
  const auto& fft = detail::RealFft::get(c.dim());
  auto fc = fft.forward(c.values());
  const auto fb = fft.forward(b.values());
  for (std::size_t k = 0; k < fc.size(); ++k) {
    if (std::abs(fb[k]) < 1e-12) {
      throw NumericalDegeneracy("unbind: spectral coefficient " + std::to_string(k) +
                                " of the key is below 1e-12");
    }
    fc[k] /= fb[k];
  }
  return Hypervector(fft.inverse(std::move(fc)));
}

inline Hypervector bundle(std::span<const Hypervector> vs) {
  detail::require(!vs.empty(), "bundle: empty list");
  std::vector<double> sum(vs.front().values().begin(), vs.front().values().end());
  for (const auto& v : vs.subspan(1)) {
    detail::check_same_dim(vs.front(), v);
    const auto vals = v.values();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += vals[i];
  }
  return Hypervector(std::move(sum));
}

inline Hypervector bundle(std::initializer_list<Hypervector> vs) {
  return bundle(std::span<const Hypervector>(vs.begin(), vs.size()));
}

/// Half spectrum of encode_point2d; exposed for mappers that accumulate in
/// the frequency domain.
inline std::vector<Complex> point_spectrum(const AxisBasis& bx, const AxisBasis& by, double x,
                                           double y, const LengthScale& l) {
  const auto px = bx.half_phasors();
  const auto py = by.half_phasors();
  const double sx = x / l.value();
  const double sy = y / l.value();
  std::vector<Complex> s(px.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::polar(1.0, px[k] * sx + py[k] * sy);
  return s;
}

inline Hypervector encode_point2d(const AxisBasis& bx, const AxisBasis& by, double x, double y,
                                  const LengthScale& l) {
  detail::require(bx.dim() == by.dim(), "encode_point2d: axis dimension mismatch");
  detail::require(bx.seed() != by.seed(), "encode_point2d: axes must come from distinct seeds");
  detail::require(std::isfinite(x) && std::isfinite(y), "encode_point2d: non-finite coordinate");
  return Hypervector(detail::RealFft::get(bx.dim()).inverse(point_spectrum(bx, by, x, y, l)));
}

inline double dot_similarity(const Hypervector& a, const Hypervector& b) {
  detail::check_same_dim(a, b);
  const auto av = a.values();
  const auto bv = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return s;
}

}  // namespace hdogm
