#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "rom/fft.hpp"
#include "rom/pod.hpp"
#include "rom/synth.hpp"

using rom::SnapshotMatrix;
using rom::SyntheticMode;
using rom::SyntheticSpec;

namespace {

SyntheticSpec five_mode_spec(Eigen::Index n_dof) {
  SyntheticSpec spec;
  spec.n_dof = n_dof;
  spec.seed = 99;
  const double amplitudes[5] = {1.0, 0.8, 0.6, 0.4, 0.2};
  for (int m = 0; m < 5; ++m) {
    SyntheticMode mode;
    mode.spatial_profile = rom::sinusoid_profile(n_dof, m + 1);
    mode.amplitude = amplitudes[m];
    mode.frequency_hz = 1.0 + 0.7 * m;
    mode.phase_rad = 0.3 * m;
    spec.modes.push_back(mode);
  }
  return spec;
}

}  // namespace

TEST_CASE("empty spec generates the zero matrix") {
  SyntheticSpec spec;
  spec.n_dof = 4;
  const SnapshotMatrix snap = rom::generate_eulerian(spec, 10, 0.01, 0.0);
  CHECK(snap.values.norm() == 0.0);
  CHECK(snap.n_dof() == 4);
  CHECK(snap.n_time() == 10);
}

TEST_CASE("single basis-profile mode is analytic") {
  SyntheticSpec spec;
  spec.n_dof = 5;
  SyntheticMode mode;
  mode.spatial_profile = rom::basis_profile(5, 0);
  mode.amplitude = 2.0;
  mode.frequency_hz = 3.0;
  mode.phase_rad = 0.0;
  spec.modes.push_back(mode);

  const double dt = 0.01;
  const SnapshotMatrix snap = rom::generate_eulerian(spec, 20, dt, 0.0);
  for (Eigen::Index i = 0; i < snap.n_time(); ++i) {
    const double t = dt * static_cast<double>(i + 1);
    CHECK(snap.values(0, i) ==
          doctest::Approx(2.0 * std::sin(2.0 * std::numbers::pi * 3.0 * t)).epsilon(1e-14));
    for (Eigen::Index r = 1; r < 5; ++r) CHECK(snap.values(r, i) == 0.0);
  }
}

TEST_CASE("numerical rank is bounded by the mode count") {
  const SyntheticSpec spec = five_mode_spec(60);
  const SnapshotMatrix snap = rom::generate_eulerian(spec, 120, 0.01, 0.0);
  const rom::SvdResult svd = rom::compute_svd(snap.values);
  REQUIRE(svd.singular_values.size() > 5);
  for (Eigen::Index i = 5; i < svd.singular_values.size(); ++i) {
    CHECK(svd.singular_values[i] < 1e-10 * svd.singular_values[0]);
  }
}

TEST_CASE("generation is deterministic given the seed") {
  SyntheticSpec spec = five_mode_spec(30);
  spec.jitter_amplitude = 0.05;
  spec.jitter_frequency_hz = 30.0;
  const SnapshotMatrix a = rom::generate_eulerian(spec, 64, 0.01, 0.0);
  const SnapshotMatrix b = rom::generate_eulerian(spec, 64, 0.01, 0.0);
  CHECK(std::memcmp(a.values.data(), b.values.data(),
                    sizeof(double) * static_cast<std::size_t>(a.values.size())) == 0);

  spec.seed += 1;  // a different seed moves the jitter direction
  const SnapshotMatrix c = rom::generate_eulerian(spec, 64, 0.01, 0.0);
  CHECK((a.values - c.values).norm() > 0.0);
}

TEST_CASE("tones land on exact spectral bins for integer cycle counts") {
  // 8 cycles in a 64-sample window at dt = 0.01 -> 12.5 Hz on bin 8.
  SyntheticSpec spec;
  spec.n_dof = 3;
  SyntheticMode mode;
  mode.spatial_profile = rom::basis_profile(3, 1);
  mode.amplitude = 1.5;
  mode.frequency_hz = 12.5;
  mode.phase_rad = 0.4;
  spec.modes.push_back(mode);

  const SnapshotMatrix snap = rom::generate_eulerian(spec, 64, 0.01, 0.0);
  const rom::Spectrum spectrum = rom::dft_forward(snap.values.row(1).transpose(), 0.01);
  const double peak = std::abs(spectrum.coefficients[8]);
  CHECK(peak == doctest::Approx(1.5 * 64.0 / 2.0).epsilon(1e-10));
  for (Eigen::Index k = 0; k < 64; ++k) {
    if (k == 8 || k == 56) continue;
    CHECK(std::abs(spectrum.coefficients[k]) < 1e-9 * peak);
  }
}

TEST_CASE("frequencies at or above Nyquist are rejected") {
  SyntheticSpec spec;
  spec.n_dof = 2;
  spec.jitter_amplitude = 0.1;

  spec.jitter_frequency_hz = 30.0;  // below the 50 Hz Nyquist at dt = 0.01
  CHECK_NOTHROW(rom::generate_eulerian(spec, 8, 0.01, 0.0));

  spec.jitter_frequency_hz = 60.0;
  CHECK_THROWS_AS(rom::generate_eulerian(spec, 8, 0.01, 0.0), std::invalid_argument);

  spec.jitter_frequency_hz = 50.0;  // exactly Nyquist
  CHECK_THROWS_AS(rom::generate_eulerian(spec, 8, 0.01, 0.0), std::invalid_argument);
}

TEST_CASE("duplicate mode frequencies are rejected") {
  SyntheticSpec spec;
  spec.n_dof = 4;
  for (int m = 0; m < 2; ++m) {
    SyntheticMode mode;
    mode.spatial_profile = rom::basis_profile(4, m);
    mode.amplitude = 1.0;
    mode.frequency_hz = 2.0;
    spec.modes.push_back(mode);
  }
  CHECK_THROWS_AS(rom::generate_eulerian(spec, 8, 0.01, 0.0), std::invalid_argument);
}

TEST_CASE("lagrangian generation produces three tagged components") {
  SUBCASE("empty specs give zero matrices with consistent shapes") {
    SyntheticSpec spec;
    spec.n_dof = 6;
    const auto components = rom::generate_lagrangian(spec, spec, spec, 12, 0.01, 0.0);
    CHECK(components[0].field == rom::FieldKind::LagrangianX);
    CHECK(components[1].field == rom::FieldKind::LagrangianY);
    CHECK(components[2].field == rom::FieldKind::LagrangianZ);
    for (const auto& component : components) {
      CHECK(component.n_dof() == 6);
      CHECK(component.n_time() == 12);
      CHECK(component.values.norm() == 0.0);
    }
  }
  SUBCASE("mismatched particle counts are rejected") {
    SyntheticSpec x, y, z;
    x.n_dof = 6;
    y.n_dof = 6;
    z.n_dof = 5;
    CHECK_THROWS_AS(rom::generate_lagrangian(x, y, z, 12, 0.01, 0.0), std::invalid_argument);
  }
  SUBCASE("per-component rank bound") {
    SyntheticSpec spec;
    spec.n_dof = 20;
    for (int m = 0; m < 2; ++m) {
      SyntheticMode mode;
      mode.spatial_profile = rom::sinusoid_profile(20, m + 1);
      mode.amplitude = 1.0 - 0.4 * m;
      mode.frequency_hz = 1.0 + m;
      spec.modes.push_back(mode);
    }
    const auto components = rom::generate_lagrangian(spec, spec, spec, 40, 0.01, 0.0);
    for (const auto& component : components) {
      const rom::SvdResult svd = rom::compute_svd(component.values);
      for (Eigen::Index i = 2; i < svd.singular_values.size(); ++i) {
        CHECK(svd.singular_values[i] < 1e-10 * svd.singular_values[0]);
      }
    }
  }
}

TEST_CASE("random profiles are unit norm and seed-stable") {
  const Eigen::VectorXd a = rom::random_unit_profile(50, 7);
  const Eigen::VectorXd b = rom::random_unit_profile(50, 7);
  const Eigen::VectorXd c = rom::random_unit_profile(50, 8);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a == b);
  CHECK((a - c).norm() > 1e-3);
}
