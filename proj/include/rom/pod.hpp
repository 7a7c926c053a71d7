#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "rom/snapshot.hpp"

namespace rom {

/// Economy-size SVD A = left * diag(singular_values) * right^T with a
/// deterministic sign convention: in every left singular vector the entry of
/// largest magnitude is non-negative (ties broken by lowest index).
struct SvdResult {
  Eigen::MatrixXd left;              // n_dof x r
  Eigen::VectorXd singular_values;   // r = min(n_dof, n_time), non-increasing
  Eigen::MatrixXd right;             // n_time x r
};

SvdResult compute_svd(const Eigen::MatrixXd& matrix);
SvdResult compute_svd(const SnapshotMatrix& snapshots);

/// Ratio of the first n singular values' sum to the total sum (first powers,
/// not squares). An all-zero spectrum is defined to have energy 1 for any n.
double cumulative_energy(const Eigen::VectorXd& singular_values, Eigen::Index n);

/// Smallest mode count whose cumulative energy reaches delta, delta in (0, 1].
Eigen::Index select_modes(const Eigen::VectorXd& singular_values, double delta);

/// Truncated orthonormal spatial basis plus the full singular-value spectrum
/// it was cut from.
struct PODBasis {
  Eigen::MatrixXd modes;             // n_dof x n_modes, orthonormal columns
  Eigen::VectorXd singular_values;   // full spectrum of the source matrix
  Eigen::Index source_n_time = 0;

  Eigen::Index n_dof() const { return modes.rows(); }
  Eigen::Index n_modes() const { return modes.cols(); }
};

PODBasis truncate_basis(const SvdResult& svd, Eigen::Index n_modes, Eigen::Index source_n_time);

/// Modal coefficient history C = modes^T * values, one column per instant.
struct ReducedTrajectory {
  Eigen::MatrixXd coefficients;  // n_modes x n_time
  double t0 = 0.0;
  double dt = 0.0;
  FieldKind field = FieldKind::EulerianScalar;
  std::string name = "field";

  Eigen::Index n_modes() const { return coefficients.rows(); }
  Eigen::Index n_time() const { return coefficients.cols(); }
};

ReducedTrajectory project(const SnapshotMatrix& snapshots, const PODBasis& basis);
SnapshotMatrix reconstruct(const PODBasis& basis, const ReducedTrajectory& trajectory);

/// Optional mean-centering: the decomposition usually runs on the raw field,
/// but fluctuation-only bases can be requested by removing the temporal mean
/// first and adding it back after reconstruction.
struct CenteredSnapshots {
  SnapshotMatrix centered;
  Eigen::VectorXd mean;  // per-DOF temporal mean
};

CenteredSnapshots subtract_temporal_mean(const SnapshotMatrix& snapshots);
SnapshotMatrix add_temporal_mean(const SnapshotMatrix& snapshots, const Eigen::VectorXd& mean);

// Basis file layout (little-endian): magic "ROMPOD_1", u64 n_dof,
// u64 n_modes, u64 spectrum length, then the singular values and the mode
// matrix column-major, all f64.
void save_basis(const PODBasis& basis, const std::filesystem::path& path);
PODBasis load_basis(const std::filesystem::path& path);

}  // namespace rom
