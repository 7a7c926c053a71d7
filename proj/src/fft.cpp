#include "rom/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rom/errors.hpp"

namespace rom {

namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Prime lengths up to this bound get a direct O(p^2) butterfly; larger primes
// go through Bluestein. Small direct blocks inside the Cooley-Tukey recursion
// keep the overall cost at O(N log N).
constexpr std::size_t kDirectPrimeLimit = 61;

std::size_t smallest_prime_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t p = 3; p * p <= n; p += 2) {
    if (n % p == 0) return p;
  }
  return n;
}

void direct_dft(std::vector<cd>& a, int sign) {
  const std::size_t n = a.size();
  std::vector<cd> roots(n);
  for (std::size_t j = 0; j < n; ++j) {
    roots[j] = std::polar(1.0, sign * kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  }
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) acc += a[j] * roots[(j * k) % n];
    out[k] = acc;
  }
  a = std::move(out);
}

// Iterative radix-2 transform; only used on power-of-two scratch buffers
// inside Bluestein's algorithm.
void radix2(std::vector<cd>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<cd> stage_roots(n / 2);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t j = 0; j < half; ++j) {
      stage_roots[j] =
          std::polar(1.0, sign * kTwoPi * static_cast<double>(j) / static_cast<double>(len));
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const cd u = a[i + j];
        const cd v = a[i + j + half] * stage_roots[j];
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

void fft_dispatch(std::vector<cd>& a, int sign);

// Chirp z-transform: turns a length-n DFT into a circular convolution of
// power-of-two length >= 2n-1. The chirp angle uses j^2 mod 2n so the phase
// stays exact for large indices.
void bluestein(std::vector<cd>& a, int sign) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  std::vector<cd> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t j2 = (j * j) % (2 * n);
    chirp[j] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(j2) /
                                   static_cast<double>(n));
  }

  std::vector<cd> u(m, cd{0.0, 0.0});
  std::vector<cd> v(m, cd{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) u[j] = a[j] * chirp[j];
  v[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j) {
    v[j] = std::conj(chirp[j]);
    v[m - j] = std::conj(chirp[j]);
  }

  radix2(u, -1);
  radix2(v, -1);
  for (std::size_t j = 0; j < m; ++j) u[j] *= v[j];
  radix2(u, +1);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = chirp[k] * u[k] * scale;
}

// Mixed-radix Cooley-Tukey step, N = p*m with p the smallest prime factor:
//   X[k] = sum_q w^(q*k) * FFT_m(subsequence q)[k mod m],  w = e^(sign*2*pi*i/N)
void cooley_tukey(std::vector<cd>& a, std::size_t p, int sign) {
  const std::size_t n = a.size();
  const std::size_t m = n / p;

  std::vector<std::vector<cd>> sub(p, std::vector<cd>(m));
  for (std::size_t q = 0; q < p; ++q) {
    for (std::size_t r = 0; r < m; ++r) sub[q][r] = a[q + p * r];
    fft_dispatch(sub[q], sign);
  }

  std::vector<cd> roots(n);
  for (std::size_t j = 0; j < n; ++j) {
    roots[j] = std::polar(1.0, sign * kTwoPi * static_cast<double>(j) / static_cast<double>(n));
  }
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{0.0, 0.0};
    for (std::size_t q = 0; q < p; ++q) acc += roots[(k * q) % n] * sub[q][k % m];
    a[k] = acc;
  }
}

void fft_dispatch(std::vector<cd>& a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  const std::size_t p = smallest_prime_factor(n);
  if (p == n) {
    if (n <= kDirectPrimeLimit) {
      direct_dft(a, sign);
    } else {
      bluestein(a, sign);
    }
    return;
  }
  cooley_tukey(a, p, sign);
}

}  // namespace

Spectrum dft_forward(const Eigen::VectorXd& series, double dt) {
  const Eigen::Index n = series.size();
  if (n < 2) throw std::invalid_argument("dft_forward needs at least 2 samples");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(series[i])) {
      throw std::invalid_argument("dft_forward: non-finite input at index " + std::to_string(i));
    }
  }

  std::vector<cd> buffer(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) buffer[static_cast<std::size_t>(i)] = cd{series[i], 0.0};
  fft_dispatch(buffer, -1);

  Spectrum spectrum;
  spectrum.dt = dt;
  spectrum.coefficients.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) spectrum.coefficients[i] = buffer[static_cast<std::size_t>(i)];
  return spectrum;
}

Eigen::VectorXd dft_inverse(const Spectrum& spectrum) {
  const Eigen::Index n = spectrum.size();
  if (n < 2) throw std::invalid_argument("dft_inverse needs at least 2 coefficients");

  double scale = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) scale = std::max(scale, std::abs(spectrum.coefficients[k]));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index mirror = k == 0 ? 0 : n - k;
    const double deviation =
        std::abs(spectrum.coefficients[k] - std::conj(spectrum.coefficients[mirror]));
    if (deviation > 1e-9 * scale) {
      throw numeric_error("dft_inverse: spectrum is not conjugate-symmetric at bin " +
                          std::to_string(k) + " (deviation " + std::to_string(deviation) +
                          ", scale " + std::to_string(scale) + ")");
    }
  }

  std::vector<cd> buffer(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) buffer[static_cast<std::size_t>(i)] = spectrum.coefficients[i];
  fft_dispatch(buffer, +1);

  double re_max = 0.0;
  double im_max = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd series(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cd value = buffer[static_cast<std::size_t>(i)] * inv_n;
    series[i] = value.real();
    re_max = std::max(re_max, std::abs(value.real()));
    im_max = std::max(im_max, std::abs(value.imag()));
  }
  if (im_max > 1e-9 * std::max(re_max, im_max)) {
    throw numeric_error("dft_inverse: imaginary residue " + std::to_string(im_max) +
                        " exceeds 1e-9 of series scale " + std::to_string(re_max));
  }
  return series;
}

}  // namespace rom
