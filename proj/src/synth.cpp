#include "rom/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rom/rng.hpp"

namespace rom {

namespace {

void check_spec(const SyntheticSpec& spec, double dt) {
  if (spec.n_dof < 1) throw std::invalid_argument("synthetic spec needs n_dof >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("synthetic generation needs dt > 0");
  const double nyquist = 0.5 / dt;
  for (std::size_t m = 0; m < spec.modes.size(); ++m) {
    const auto& mode = spec.modes[m];
    if (mode.spatial_profile.size() != spec.n_dof) {
      throw std::invalid_argument("mode " + std::to_string(m) + " profile has length " +
                                  std::to_string(mode.spatial_profile.size()) + ", expected " +
                                  std::to_string(spec.n_dof));
    }
    if (std::abs(mode.spatial_profile.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("mode " + std::to_string(m) + " profile is not unit-norm");
    }
    if (mode.frequency_hz < 0.0 || mode.frequency_hz >= nyquist) {
      throw std::invalid_argument("mode " + std::to_string(m) + " frequency " +
                                  std::to_string(mode.frequency_hz) + " Hz is at or above Nyquist (" +
                                  std::to_string(nyquist) + " Hz)");
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (spec.modes[k].frequency_hz == mode.frequency_hz) {
        throw std::invalid_argument("mode frequencies must be distinct (modes " +
                                    std::to_string(k) + " and " + std::to_string(m) + ")");
      }
    }
  }
  if (spec.jitter_amplitude < 0.0) throw std::invalid_argument("jitter amplitude must be >= 0");
  if ((spec.jitter_amplitude > 0.0 || spec.jitter_frequency_hz != 0.0) &&
      (spec.jitter_frequency_hz < 0.0 || spec.jitter_frequency_hz >= nyquist)) {
    throw std::invalid_argument("jitter frequency " + std::to_string(spec.jitter_frequency_hz) +
                                " Hz is at or above Nyquist (" + std::to_string(nyquist) + " Hz)");
  }
}

SnapshotMatrix generate(const SyntheticSpec& spec, Eigen::Index n_time, double dt, double t0,
                        FieldKind field) {
  check_spec(spec, dt);
  if (n_time < 2) throw std::invalid_argument("synthetic generation needs n_time >= 2");

  SnapshotMatrix snap;
  snap.t0 = t0;
  snap.dt = dt;
  snap.field = field;
  snap.values = Eigen::MatrixXd::Zero(spec.n_dof, n_time);

  const Eigen::VectorXd jitter_vector =
      spec.jitter_amplitude > 0.0 ? random_unit_profile(spec.n_dof, spec.seed)
                                  : Eigen::VectorXd::Zero(spec.n_dof);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index i = 0; i < n_time; ++i) {
    const double t = snap.time_at(i);
    auto column = snap.values.col(i);
    for (const auto& mode : spec.modes) {
      const double factor = mode.amplitude * std::sin(two_pi * mode.frequency_hz * t + mode.phase_rad);
      column += factor * mode.spatial_profile;
    }
    if (spec.jitter_amplitude > 0.0) {
      const double factor = spec.jitter_amplitude * std::sin(two_pi * spec.jitter_frequency_hz * t);
      column += factor * jitter_vector;
    }
  }
  return snap;
}

}  // namespace

Eigen::VectorXd basis_profile(Eigen::Index n_dof, Eigen::Index k) {
  if (k < 0 || k >= n_dof) throw std::invalid_argument("basis profile index out of range");
  Eigen::VectorXd profile = Eigen::VectorXd::Zero(n_dof);
  profile[k] = 1.0;
  return profile;
}

Eigen::VectorXd sinusoid_profile(Eigen::Index n_dof, Eigen::Index k) {
  if (k < 1) throw std::invalid_argument("sinusoid profile index must be >= 1");
  // Discrete sine shapes sin(pi*k*(j+1)/(n+1)) are mutually orthogonal for
  // distinct k, which keeps generated singular values close to the requested
  // mode amplitudes.
  Eigen::VectorXd profile(n_dof);
  const double scale = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_dof + 1);
  for (Eigen::Index j = 0; j < n_dof; ++j) {
    profile[j] = std::sin(scale * static_cast<double>(j + 1));
  }
  profile.normalize();
  return profile;
}

Eigen::VectorXd random_unit_profile(Eigen::Index n_dof, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::VectorXd profile(n_dof);
  for (Eigen::Index j = 0; j < n_dof; ++j) profile[j] = rng.next_symmetric();
  const double norm = profile.norm();
  if (norm == 0.0) {
    // All-zero draw is possible only for tiny n_dof; fall back to e_0.
    return basis_profile(n_dof, 0);
  }
  return profile / norm;
}

SnapshotMatrix generate_eulerian(const SyntheticSpec& spec, Eigen::Index n_time, double dt,
                                 double t0) {
  return generate(spec, n_time, dt, t0, FieldKind::EulerianScalar);
}

std::array<SnapshotMatrix, 3> generate_lagrangian(const SyntheticSpec& spec_x,
                                                  const SyntheticSpec& spec_y,
                                                  const SyntheticSpec& spec_z, Eigen::Index n_time,
                                                  double dt, double t0) {
  if (spec_x.n_dof != spec_y.n_dof || spec_x.n_dof != spec_z.n_dof) {
    throw std::invalid_argument("Lagrangian component specs must share n_dof (particle count)");
  }
  std::array<SnapshotMatrix, 3> components = {
      generate(spec_x, n_time, dt, t0, FieldKind::LagrangianX),
      generate(spec_y, n_time, dt, t0, FieldKind::LagrangianY),
      generate(spec_z, n_time, dt, t0, FieldKind::LagrangianZ),
  };
  components[0].name = "x";
  components[1].name = "y";
  components[2].name = "z";
  return components;
}

}  // namespace rom
