#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <vector>

#include "rom/fft.hpp"
#include "rom/snapshot.hpp"

namespace rom {

/// Per-bin power: values[k] = |coefficients[k]|^2 / N, with
/// frequencies[k] = k / (N * dt).
struct PsdVector {
  Eigen::VectorXd values;
  Eigen::VectorXd frequencies_hz;
};

PsdVector psd(const Spectrum& spectrum, Eigen::Index n_time);

struct FilterConfig {
  double psd_threshold = 0.0;
  bool keep_dc = true;
};

/// Frequency filtering applied row by row: bins whose PSD falls strictly
/// below the threshold are zeroed, always as conjugate pairs (k, N-k) so the
/// output stays real. Bin 0 is preserved whenever keep_dc is set. Rows are
/// independent; with n_threads > 1 they are processed in parallel and the
/// result is bitwise identical to the single-threaded one.
SnapshotMatrix filter_snapshots(const SnapshotMatrix& snapshots, const FilterConfig& config,
                                int n_threads = 1);

/// CSV report "dof_index,bin,frequency_hz,psd" for the selected DOF rows.
void write_psd_report_csv(std::ostream& out, const SnapshotMatrix& snapshots,
                          const std::vector<Eigen::Index>& dof_indices);

}  // namespace rom
