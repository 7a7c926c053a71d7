#include "rom/pod.hpp"

#include <Eigen/SVD>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "rom/errors.hpp"

namespace rom {

namespace {

constexpr char kMagic[8] = {'R', 'O', 'M', 'P', 'O', 'D', '_', '1'};

// Flip paired singular vectors so each left vector's largest-magnitude entry
// is non-negative. Serialized bases and models trained on the resulting
// coefficients then agree across platforms and SVD backends.
void apply_sign_convention(Eigen::MatrixXd& left, Eigen::MatrixXd& right) {
  for (Eigen::Index j = 0; j < left.cols(); ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < left.rows(); ++i) {
      const double magnitude = std::abs(left(i, j));
      if (magnitude > best) {
        best = magnitude;
        pivot = i;
      }
    }
    if (left(pivot, j) < 0.0) {
      left.col(j) = -left.col(j);
      right.col(j) = -right.col(j);
    }
  }
}

}  // namespace

SvdResult compute_svd(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw std::invalid_argument("compute_svd needs a non-empty matrix");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw numeric_error("SVD failed to converge");
  }

  SvdResult result;
  result.left = svd.matrixU();
  result.singular_values = svd.singularValues();
  result.right = svd.matrixV();
  apply_sign_convention(result.left, result.right);
  return result;
}

SvdResult compute_svd(const SnapshotMatrix& snapshots) {
  validate(snapshots);
  return compute_svd(snapshots.values);
}

double cumulative_energy(const Eigen::VectorXd& singular_values, Eigen::Index n) {
  if (n < 1 || n > singular_values.size()) {
    throw std::invalid_argument("cumulative_energy: n out of range [1, " +
                                std::to_string(singular_values.size()) + "]");
  }
  const double total = singular_values.sum();
  if (total == 0.0) return 1.0;
  return singular_values.head(n).sum() / total;
}

Eigen::Index select_modes(const Eigen::VectorXd& singular_values, double delta) {
  if (!(delta > 0.0) || delta > 1.0) {
    throw std::invalid_argument("select_modes: delta must lie in (0, 1]");
  }
  if (singular_values.size() < 1) throw std::invalid_argument("select_modes: empty spectrum");

  const double total = singular_values.sum();
  if (total == 0.0) return 1;
  double partial = 0.0;
  for (Eigen::Index n = 1; n <= singular_values.size(); ++n) {
    partial += singular_values[n - 1];
    if (partial / total >= delta) return n;
  }
  return singular_values.size();  // reachable only through rounding; keep everything
}

PODBasis truncate_basis(const SvdResult& svd, Eigen::Index n_modes, Eigen::Index source_n_time) {
  if (n_modes < 1 || n_modes > svd.left.cols()) {
    throw std::invalid_argument("truncate_basis: n_modes out of range [1, " +
                                std::to_string(svd.left.cols()) + "]");
  }
  PODBasis basis;
  basis.modes = svd.left.leftCols(n_modes);
  basis.singular_values = svd.singular_values;
  basis.source_n_time = source_n_time;
  return basis;
}

ReducedTrajectory project(const SnapshotMatrix& snapshots, const PODBasis& basis) {
  if (snapshots.n_dof() != basis.n_dof()) {
    throw std::invalid_argument("project: snapshot n_dof " + std::to_string(snapshots.n_dof()) +
                                " does not match basis n_dof " + std::to_string(basis.n_dof()));
  }
  ReducedTrajectory trajectory;
  trajectory.coefficients = basis.modes.transpose() * snapshots.values;
  trajectory.t0 = snapshots.t0;
  trajectory.dt = snapshots.dt;
  trajectory.field = snapshots.field;
  trajectory.name = snapshots.name;
  return trajectory;
}

SnapshotMatrix reconstruct(const PODBasis& basis, const ReducedTrajectory& trajectory) {
  if (trajectory.n_modes() != basis.n_modes()) {
    throw std::invalid_argument("reconstruct: trajectory has " +
                                std::to_string(trajectory.n_modes()) + " modes, basis has " +
                                std::to_string(basis.n_modes()));
  }
  SnapshotMatrix snapshots;
  snapshots.values = basis.modes * trajectory.coefficients;
  snapshots.t0 = trajectory.t0;
  snapshots.dt = trajectory.dt;
  snapshots.field = trajectory.field;
  snapshots.name = trajectory.name;
  return snapshots;
}

CenteredSnapshots subtract_temporal_mean(const SnapshotMatrix& snapshots) {
  validate(snapshots);
  CenteredSnapshots result;
  result.mean = snapshots.values.rowwise().mean();
  result.centered = snapshots;
  result.centered.values.colwise() -= result.mean;
  return result;
}

SnapshotMatrix add_temporal_mean(const SnapshotMatrix& snapshots, const Eigen::VectorXd& mean) {
  if (mean.size() != snapshots.n_dof()) {
    throw std::invalid_argument("mean vector length " + std::to_string(mean.size()) +
                                " does not match n_dof " + std::to_string(snapshots.n_dof()));
  }
  SnapshotMatrix shifted = snapshots;
  shifted.values.colwise() += mean;
  return shifted;
}

void save_basis(const PODBasis& basis, const std::filesystem::path& path) {
  if (basis.n_modes() < 1) throw std::invalid_argument("cannot save an empty basis");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");

  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t n_dof = static_cast<std::uint64_t>(basis.n_dof());
  const std::uint64_t n_modes = static_cast<std::uint64_t>(basis.n_modes());
  const std::uint64_t spectrum_len = static_cast<std::uint64_t>(basis.singular_values.size());
  out.write(reinterpret_cast<const char*>(&n_dof), sizeof(n_dof));
  out.write(reinterpret_cast<const char*>(&n_modes), sizeof(n_modes));
  out.write(reinterpret_cast<const char*>(&spectrum_len), sizeof(spectrum_len));
  out.write(reinterpret_cast<const char*>(basis.singular_values.data()),
            static_cast<std::streamsize>(spectrum_len * sizeof(double)));
  out.write(reinterpret_cast<const char*>(basis.modes.data()),
            static_cast<std::streamsize>(basis.modes.size() * sizeof(double)));
  out.flush();
  if (!out) throw io_error(path.string() + ": write failed");
}

PODBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string() + ": cannot open for reading");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw io_error(path.string() + ": bad magic (expected ROMPOD_1)");
  }
  std::uint64_t n_dof = 0, n_modes = 0, spectrum_len = 0;
  in.read(reinterpret_cast<char*>(&n_dof), sizeof(n_dof));
  in.read(reinterpret_cast<char*>(&n_modes), sizeof(n_modes));
  in.read(reinterpret_cast<char*>(&spectrum_len), sizeof(spectrum_len));
  if (!in || n_dof == 0 || n_modes == 0 || n_modes > n_dof || spectrum_len < n_modes) {
    throw io_error(path.string() + ": invalid basis header");
  }

  PODBasis basis;
  basis.singular_values.resize(static_cast<Eigen::Index>(spectrum_len));
  basis.modes.resize(static_cast<Eigen::Index>(n_dof), static_cast<Eigen::Index>(n_modes));
  in.read(reinterpret_cast<char*>(basis.singular_values.data()),
          static_cast<std::streamsize>(spectrum_len * sizeof(double)));
  in.read(reinterpret_cast<char*>(basis.modes.data()),
          static_cast<std::streamsize>(basis.modes.size() * sizeof(double)));
  if (!in) throw io_error(path.string() + ": truncated basis payload");
  in.peek();
  if (!in.eof()) throw io_error(path.string() + ": trailing bytes after basis payload");
  basis.source_n_time = static_cast<Eigen::Index>(spectrum_len);
  return basis;
}

}  // namespace rom
