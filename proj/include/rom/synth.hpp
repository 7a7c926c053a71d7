#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "rom/snapshot.hpp"

namespace rom {

/// One separable space-time term: amplitude * sin(2*pi*f*t + phase) applied
/// to a fixed unit-norm spatial profile.
struct SyntheticMode {
  Eigen::VectorXd spatial_profile;  // unit Euclidean norm, length n_dof
  double amplitude = 0.0;
  double frequency_hz = 0.0;  // must stay below Nyquist, 1/(2*dt)
  double phase_rad = 0.0;
};

/// Recipe for a synthetic snapshot matrix with known low-rank structure.
/// Jitter is a single coherent high-frequency term on a seeded pseudo-random
/// unit vector, so a PSD threshold can remove it exactly.
struct SyntheticSpec {
  Eigen::Index n_dof = 0;
  std::vector<SyntheticMode> modes;
  double jitter_amplitude = 0.0;
  double jitter_frequency_hz = 0.0;
  std::uint64_t seed = 0;
};

// Spatial profile constructors for the config file's profile kinds.
Eigen::VectorXd basis_profile(Eigen::Index n_dof, Eigen::Index k);
Eigen::VectorXd sinusoid_profile(Eigen::Index n_dof, Eigen::Index k);
Eigen::VectorXd random_unit_profile(Eigen::Index n_dof, std::uint64_t seed);

/// Column i equals sum_m amplitude_m * sin(2*pi*f_m*t_i + phase_m) * profile_m
/// plus the jitter term, with t_i = t0 + (i+1)*dt. Deterministic in the spec
/// and seed; bit-identical across runs.
SnapshotMatrix generate_eulerian(const SyntheticSpec& spec, Eigen::Index n_time, double dt,
                                 double t0);

/// Three per-coordinate matrices tagged LagrangianX/Y/Z. The specs must share
/// n_dof (one row per particle).
std::array<SnapshotMatrix, 3> generate_lagrangian(const SyntheticSpec& spec_x,
                                                  const SyntheticSpec& spec_y,
                                                  const SyntheticSpec& spec_z, Eigen::Index n_time,
                                                  double dt, double t0);

}  // namespace rom
