#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

namespace rom {

/// Which physical field a snapshot matrix stores. Lagrangian particle
/// positions are kept as three independent matrices, one per coordinate,
/// with the particle label as the DOF index.
enum class FieldKind : std::uint8_t {
  EulerianScalar = 0,
  LagrangianX = 1,
  LagrangianY = 2,
  LagrangianZ = 3,
};

const char* field_kind_name(FieldKind kind);

/// Full-order field history: one column per time instant, one row per degree
/// of freedom. Column i holds the solution at t0 + (i+1)*dt, i.e. the first
/// stored snapshot is the one taken dt after the initial condition.
/// Immutable by convention once built; safe to share across threads.
struct SnapshotMatrix {
  Eigen::MatrixXd values;  // n_dof x n_time
  double t0 = 0.0;
  double dt = 0.0;
  FieldKind field = FieldKind::EulerianScalar;
  std::string name = "field";

  Eigen::Index n_dof() const { return values.rows(); }
  Eigen::Index n_time() const { return values.cols(); }
  double time_at(Eigen::Index column) const { return t0 + static_cast<double>(column + 1) * dt; }
};

/// Checks all structural invariants (finite entries, dt > 0, n_dof >= 1,
/// n_time >= 1, CSV-safe name). Throws std::invalid_argument naming the
/// first offending entry.
void validate(const SnapshotMatrix& snapshots);

enum class SnapshotFormat { Binary, Csv };

/// Picks Csv for a ".csv" extension, Binary otherwise.
SnapshotFormat format_from_path(const std::filesystem::path& path);

// Binary layout (all little-endian):
//   magic "ROMSNAP1" (8 bytes)
//   u64 n_dof, u64 n_time, f64 t0, f64 dt
//   u8 field tag (0 = Eulerian scalar, 1..3 = Lagrangian x/y/z)
//   u16 name length, then that many bytes of UTF-8
//   n_dof * n_time f64 values, column-major (one column per snapshot)
//
// CSV layout: header "t,<name>_0,...,<name>_{n_dof-1}", one row per time
// instant, values printed with 17 significant digits. Loading infers dt from
// the time column and rejects non-uniform spacing (tolerance 1e-9 * dt).
SnapshotMatrix load_snapshots(const std::filesystem::path& path, SnapshotFormat format);
void save_snapshots(const SnapshotMatrix& snapshots, const std::filesystem::path& path,
                    SnapshotFormat format);

struct SplitSpec {
  Eigen::Index n_train = 0;
  Eigen::Index n_validation = 0;
};

/// First n_train columns become the training set, the next n_validation the
/// validation set. Both inherit dt/field/name; the validation t0 is shifted
/// so its columns keep their original time stamps. The validation part may
/// legitimately end up with zero columns.
std::pair<SnapshotMatrix, SnapshotMatrix> split_train_validation(const SnapshotMatrix& snapshots,
                                                                 const SplitSpec& spec);

}  // namespace rom
