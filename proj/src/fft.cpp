#include "gesture/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "gesture/core.hpp"

namespace gesture::fft {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Plan::Plan(std::size_t n) : n_(n), bitrev_(n), twiddles_(n / 2) {
  if (!is_power_of_two(n)) throw ValidationError("fft length " + std::to_string(n) + " is not a power of two");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
  }
}

void Plan::execute(std::span<Complex> data, int sign) const {
  if (data.size() != n_) throw std::length_error("fft input length does not match plan");
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex w = twiddles_[k * stride];
        const double wr = w.real();
        const double wi = sign > 0 ? -w.imag() : w.imag();
        const Complex a = data[start + k];
        const Complex x = data[start + k + half];
        // Plain product; std::complex multiplication carries NaN recovery.
        const Complex b(x.real() * wr - x.imag() * wi, x.real() * wi + x.imag() * wr);
        data[start + k] = a + b;
        data[start + k + half] = a - b;
      }
    }
  }
}

}  // namespace gesture::fft
