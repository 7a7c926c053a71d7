#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rom {

/// Full-length discrete Fourier coefficients of a real time series, bin k
/// holding sum_n x[n] * exp(-i*2*pi*k*n/N). Spectra of real input satisfy
/// coefficients[k] == conj(coefficients[N-k]).
struct Spectrum {
  Eigen::VectorXcd coefficients;
  double dt = 1.0;

  Eigen::Index size() const { return coefficients.size(); }
};

/// Forward transform, O(N log N) for any length: mixed-radix Cooley-Tukey
/// with direct small-prime butterflies and a Bluestein chirp transform for
/// large prime factors. Throws std::invalid_argument on non-finite input.
Spectrum dft_forward(const Eigen::VectorXd& series, double dt = 1.0);

/// Inverse transform x[n] = (1/N) * sum_k c[k] * exp(+i*2*pi*k*n/N).
/// Requires conjugate symmetry within 1e-9 relative; the imaginary residue of
/// the result is asserted below 1e-9 relative before being discarded. Throws
/// rom::numeric_error otherwise.
Eigen::VectorXd dft_inverse(const Spectrum& spectrum);

}  // namespace rom
