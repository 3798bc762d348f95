#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace hdogm::detail {

using Complex = std::complex<double>;

// Real-input DFT over FFTW. Forward transform is unnormalized; the inverse
// scales by 1/n so inverse(forward(x)) == x. Plans are created once per
// length under a lock (the FFTW planner is not reentrant) and executed through
// the new-array interface, which is safe to call concurrently.
class RealFft {
 public:
  static const RealFft& get(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, RealFft> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, RealFft(n)).first;
    return it->second;
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  std::vector<Complex> forward(std::span<const double> x) const {
    std::vector<double> in(x.begin(), x.end());
    std::vector<Complex> out(bins());
    fftw_execute_dft_r2c(forward_, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  // Takes the half spectrum by value: c2r overwrites its input.
  std::vector<double> inverse(std::vector<Complex> spectrum) const {
    std::vector<double> out(n_);
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(spectrum.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : out) v *= scale;
    return out;
  }

  RealFft(RealFft&& other) noexcept
      : n_(other.n_), forward_(other.forward_), inverse_(other.inverse_) {
    other.forward_ = nullptr;
    other.inverse_ = nullptr;
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft& operator=(RealFft&&) = delete;

  ~RealFft() {
    if (forward_) fftw_destroy_plan(forward_);
    if (inverse_) fftw_destroy_plan(inverse_);
  }

 private:
  explicit RealFft(std::size_t n) : n_(n) {
    const int len = static_cast<int>(n);
    std::vector<double> real(n);
    std::vector<Complex> spec(n / 2 + 1);
    auto* spec_ptr = reinterpret_cast<fftw_complex*>(spec.data());
    // FFTW_ESTIMATE keeps plan selection deterministic; FFTW_UNALIGNED lets
    // the plan run on arbitrary std::vector storage.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_r2c_1d(len, real.data(), spec_ptr, flags);
    inverse_ = fftw_plan_dft_c2r_1d(len, spec_ptr, real.data(), flags | FFTW_DESTROY_INPUT);
  }

  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace hdogm::detail
