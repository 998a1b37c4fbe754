#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gesture::fft {

using Complex = std::complex<double>;

/// Iterative radix-2 transform of a power-of-two length, computed in place.
///
/// `sign` is the exponent sign of the kernel: -1 gives the forward DFT
/// X[k] = Σ x[n]·e^{-j2πkn/N}, +1 the unnormalized inverse.
class Plan {
 public:
  explicit Plan(std::size_t n);

  std::size_t size() const { return n_; }
  void execute(std::span<Complex> data, int sign = -1) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddles_;  // e^{-j2πk/N}, k < N/2
};

bool is_power_of_two(std::size_t n);

}  // namespace gesture::fft
