#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rom/errors.hpp"
#include "rom/fft.hpp"
#include "rom/filter.hpp"
#include "oracles.hpp"

using rom::FilterConfig;
using rom::SnapshotMatrix;
using rom::Spectrum;

namespace {

Eigen::VectorXd random_series(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd series(n);
  for (Eigen::Index i = 0; i < n; ++i) series[i] = dist(rng);
  return series;
}

// Sampled tone amplitude a at integer bin k of an n-point window: the two
// nonzero spectral bins have magnitude a*n/2 and PSD a^2*n/4.
Eigen::VectorXd tone(Eigen::Index n, double dt, double amplitude, double frequency, double t0) {
  Eigen::VectorXd series(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = t0 + dt * static_cast<double>(i + 1);
    series[i] = amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
  }
  return series;
}

}  // namespace

TEST_CASE("constant series transforms to a pure DC bin") {
  const Eigen::Index n = 10;
  const double c = 3.25;
  const Spectrum spectrum = rom::dft_forward(Eigen::VectorXd::Constant(n, c), 1.0);
  CHECK(std::abs(spectrum.coefficients[0] - std::complex<double>(n * c, 0.0)) <
        1e-12 * n * std::abs(c));
  for (Eigen::Index k = 1; k < n; ++k) {
    CHECK(std::abs(spectrum.coefficients[k]) < 1e-12 * n * std::abs(c));
  }
}

TEST_CASE("cosine with three cycles over 16 samples hits bins 3 and 13") {
  Eigen::VectorXd series(16);
  for (Eigen::Index i = 0; i < 16; ++i) {
    series[i] = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / 16.0);
  }
  const Spectrum spectrum = rom::dft_forward(series, 1.0);
  CHECK(std::abs(spectrum.coefficients[3] - 8.0) < 1e-12);
  CHECK(std::abs(spectrum.coefficients[13] - 8.0) < 1e-12);
  for (Eigen::Index k = 0; k < 16; ++k) {
    if (k == 3 || k == 13) continue;
    CHECK(std::abs(spectrum.coefficients[k]) < 1e-12);
  }
}

TEST_CASE("forward transform matches the direct summation oracle") {
  // 12 covers the mixed-radix path, 7 a direct prime, 101 Bluestein, 450 the
  // production window length.
  for (const Eigen::Index n : {7, 12, 16, 100, 101, 450}) {
    for (unsigned seed = 0; seed < 4; ++seed) {
      const Eigen::VectorXd series = random_series(n, 1000 * static_cast<unsigned>(n) + seed);
      const Spectrum spectrum = rom::dft_forward(series, 1.0);
      const Eigen::VectorXcd expected = oracles::brute_dft(series);
      for (Eigen::Index k = 0; k < n; ++k) {
        CHECK(std::abs(spectrum.coefficients[k] - expected[k]) < 1e-10);
      }
    }
  }
}

TEST_CASE("inverse transform round-trips") {
  for (const Eigen::Index n : {2, 5, 100, 101, 256}) {
    const Eigen::VectorXd series = random_series(n, static_cast<unsigned>(n));
    const Eigen::VectorXd back = rom::dft_inverse(rom::dft_forward(series, 1.0));
    CHECK((back - series).norm() < 1e-10 * series.norm());
  }
}

TEST_CASE("real spectra satisfy conjugate symmetry") {
  const Eigen::VectorXd series = random_series(33, 5);
  const Spectrum spectrum = rom::dft_forward(series, 1.0);
  double scale = 0.0;
  for (Eigen::Index k = 0; k < 33; ++k) scale = std::max(scale, std::abs(spectrum.coefficients[k]));
  for (Eigen::Index k = 1; k < 33; ++k) {
    CHECK(std::abs(spectrum.coefficients[k] - std::conj(spectrum.coefficients[33 - k])) <
          1e-12 * scale);
  }
}

TEST_CASE("dc-only spectrum inverts to a constant") {
  Spectrum spectrum;
  spectrum.coefficients = Eigen::VectorXcd::Zero(8);
  spectrum.coefficients[0] = std::complex<double>(8.0 * 1.75, 0.0);
  const Eigen::VectorXd series = rom::dft_inverse(spectrum);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(series[i] == doctest::Approx(1.75).epsilon(1e-12));
}

TEST_CASE("broken conjugate symmetry is rejected") {
  Spectrum spectrum = rom::dft_forward(random_series(16, 9), 1.0);
  spectrum.coefficients[3] += std::complex<double>(0.0, 0.5);
  CHECK_THROWS_AS(rom::dft_inverse(spectrum), rom::numeric_error);
}

TEST_CASE("non-finite input is rejected") {
  Eigen::VectorXd series = random_series(8, 2);
  series[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(rom::dft_forward(series, 1.0), std::invalid_argument);
}

TEST_CASE("psd values and frequencies follow the definition") {
  SUBCASE("constant series") {
    const double c = -2.0;
    const Spectrum spectrum = rom::dft_forward(Eigen::VectorXd::Constant(10, c), 0.01);
    const rom::PsdVector power = rom::psd(spectrum, 10);
    CHECK(power.values[0] == doctest::Approx(10.0 * c * c).epsilon(1e-12));
    for (Eigen::Index k = 1; k < 10; ++k) CHECK(power.values[k] < 1e-20);
    CHECK(power.frequencies_hz[1] == doctest::Approx(1.0 / (10 * 0.01)).epsilon(1e-12));
  }
  SUBCASE("unit tone at bin 3 of 16") {
    Eigen::VectorXd series(16);
    for (Eigen::Index i = 0; i < 16; ++i) {
      series[i] = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / 16.0);
    }
    const rom::PsdVector power = rom::psd(rom::dft_forward(series, 1.0), 16);
    CHECK(power.values[3] == doctest::Approx(4.0).epsilon(1e-12));   // |8|^2 / 16
    CHECK(power.values[13] == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("parseval identity") {
    const Eigen::VectorXd series = random_series(37, 21);
    const rom::PsdVector power = rom::psd(rom::dft_forward(series, 1.0), 37);
    CHECK(power.values.sum() == doctest::Approx(series.squaredNorm()).epsilon(1e-12));
  }
  SUBCASE("length mismatch") {
    const Spectrum spectrum = rom::dft_forward(random_series(8, 1), 1.0);
    CHECK_THROWS_AS(rom::psd(spectrum, 9), std::invalid_argument);
  }
}

TEST_CASE("two-tone row filters down to the strong tone") {
  const Eigen::Index n = 450;
  const double dt = 0.01;
  // PSD = amplitude^2 * n / 4: strong tone at 4.0, weak jitter at 0.001.
  const double strong_amplitude = std::sqrt(4.0 * 4.0 / static_cast<double>(n));
  const double weak_amplitude = std::sqrt(4.0 * 0.001 / static_cast<double>(n));

  SnapshotMatrix snap;
  snap.dt = dt;
  snap.values.resize(1, n);
  snap.values.row(0) = (tone(n, dt, strong_amplitude, 2.0, 0.0) +
                        tone(n, dt, weak_amplitude, 30.0, 0.0))
                           .transpose();

  const SnapshotMatrix filtered = rom::filter_snapshots(snap, {0.005, true});
  const Eigen::VectorXd reference = tone(n, dt, strong_amplitude, 2.0, 0.0);
  CHECK((filtered.values.row(0).transpose() - reference).norm() < 1e-9 * reference.norm());
}

TEST_CASE("threshold zero keeps the snapshot matrix unchanged") {
  SnapshotMatrix snap;
  snap.dt = 0.02;
  snap.values.resize(4, 50);
  for (Eigen::Index i = 0; i < 4; ++i) {
    snap.values.row(i) = random_series(50, 60 + static_cast<unsigned>(i)).transpose();
  }
  const SnapshotMatrix filtered = rom::filter_snapshots(snap, {0.0, true});
  CHECK((filtered.values - snap.values).norm() < 1e-10 * snap.values.norm());
}

TEST_CASE("filtering is idempotent and mean/energy behave") {
  SnapshotMatrix snap;
  snap.dt = 0.01;
  snap.values.resize(6, 128);
  for (Eigen::Index i = 0; i < 6; ++i) {
    snap.values.row(i) =
        (tone(128, 0.01, 0.8, 3.90625, 0.0) + tone(128, 0.01, 0.05, 23.4375, 0.0) +
         random_series(128, 80 + static_cast<unsigned>(i)) * 0.01)
            .transpose();
    snap.values.row(i).array() += 0.4;  // nonzero mean exercises DC handling
  }
  const FilterConfig config{0.02, true};
  const SnapshotMatrix once = rom::filter_snapshots(snap, config);
  const SnapshotMatrix twice = rom::filter_snapshots(once, config);

  SUBCASE("idempotence") {
    CHECK((twice.values - once.values).norm() <= 1e-9 * once.values.norm());
  }
  SUBCASE("mean preservation with keep_dc") {
    for (Eigen::Index i = 0; i < 6; ++i) {
      const double before = snap.values.row(i).mean();
      const double after = once.values.row(i).mean();
      CHECK(std::abs(after - before) <= 1e-10 * std::abs(before));
    }
  }
  SUBCASE("row energy never increases") {
    for (Eigen::Index i = 0; i < 6; ++i) {
      const double before = snap.values.row(i).squaredNorm();
      const double after = once.values.row(i).squaredNorm();
      CHECK(after <= before * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("dc bin is cut only when keep_dc is off") {
  SnapshotMatrix snap;
  snap.dt = 0.1;
  snap.values = Eigen::MatrixXd::Constant(1, 16, 0.5);

  const SnapshotMatrix kept = rom::filter_snapshots(snap, {1e6, true});
  CHECK((kept.values.array() - 0.5).abs().maxCoeff() < 1e-12);

  const SnapshotMatrix cut = rom::filter_snapshots(snap, {1e6, false});
  CHECK(cut.values.array().abs().maxCoeff() < 1e-12);
}

TEST_CASE("row-parallel filtering matches the sequential result bitwise") {
  SnapshotMatrix snap;
  snap.dt = 0.01;
  snap.values.resize(17, 90);
  for (Eigen::Index i = 0; i < 17; ++i) {
    snap.values.row(i) = random_series(90, 300 + static_cast<unsigned>(i)).transpose();
  }
  const FilterConfig config{0.01, true};
  const SnapshotMatrix sequential = rom::filter_snapshots(snap, config, 1);
  const SnapshotMatrix parallel = rom::filter_snapshots(snap, config, 4);
  CHECK(std::memcmp(sequential.values.data(), parallel.values.data(),
                    sizeof(double) * static_cast<std::size_t>(snap.values.size())) == 0);
}

TEST_CASE("psd report rejects out-of-range DOF indices") {
  SnapshotMatrix snap;
  snap.dt = 0.01;
  snap.values = Eigen::MatrixXd::Random(3, 20);
  std::ostringstream out;
  CHECK_THROWS_AS(rom::write_psd_report_csv(out, snap, {3}), std::invalid_argument);
  CHECK_NOTHROW(rom::write_psd_report_csv(out, snap, {0, 2}));
}
