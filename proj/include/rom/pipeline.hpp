#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <vector>

#include "rom/filter.hpp"
#include "rom/lstm.hpp"
#include "rom/pod.hpp"
#include "rom/snapshot.hpp"

namespace rom {

/// Everything the offline phase needs: filtering, truncation rule (exactly
/// one of delta / n_modes), split, and LSTM training parameters.
struct PipelineConfig {
  FilterConfig filter;
  std::optional<double> delta;
  std::optional<Eigen::Index> n_modes;
  SplitSpec split;
  TrainingConfig training;
  // Off by default: the basis spans the raw field. When set, the temporal
  // mean of the filtered training data is removed before the decomposition
  // and restored on every reconstruction.
  bool center_mean = false;
};

void validate(const PipelineConfig& config);

/// Output of the offline phase; immutable once produced.
struct RomArtifacts {
  PODBasis basis;
  LSTMModel model;
  SnapshotMatrix filtered_training;
  PipelineConfig config;
  std::vector<double> loss_history;
  Eigen::VectorXd training_mean;  // empty unless config.center_mean
  double offline_seconds = 0.0;
};

/// Offline phase: filter the first n_train columns, extract the basis from
/// the filtered training data only, project, train. Wall-clock time is
/// recorded in the artifacts.
RomArtifacts offline(const SnapshotMatrix& snapshots, const PipelineConfig& config,
                     int n_threads = 1);

/// Online phase: seed the rollout with the last s training coefficient
/// vectors, roll out n_steps, reconstruct. Time stamps continue the training
/// grid. Pass online_seconds to receive the measured wall-clock time.
SnapshotMatrix online_predict(const RomArtifacts& artifacts, Eigen::Index n_steps,
                              double* online_seconds = nullptr);

/// Training-window reconstruction from projected (not rolled-out)
/// coefficients: pure POD truncation error on the filtered data.
SnapshotMatrix identify(const RomArtifacts& artifacts);

/// 100 * ||fom - rom||_2 / ||fom||_2. Uniform DOF weights by default; pass a
/// non-negative per-DOF weight vector (e.g. cell volumes) for non-uniform
/// grids. Throws on a zero reference norm.
double relative_l2_error(const Eigen::VectorXd& fom_column, const Eigen::VectorXd& rom_column,
                         const Eigen::VectorXd& weights = Eigen::VectorXd());

struct ErrorReport {
  std::vector<double> times;
  std::vector<double> relative_errors_percent;
  Eigen::Index split_boundary = 0;  // first validation column; == length when all-training
  double train_mean = 0.0;
  double train_max = 0.0;
  double validation_mean = 0.0;
  double validation_max = 0.0;
  double offline_seconds = 0.0;
  double online_seconds = 0.0;
};

/// Per-column relative errors plus window aggregates. split_boundary < 0
/// marks every column as training.
ErrorReport error_series(const SnapshotMatrix& fom, const SnapshotMatrix& rom,
                         Eigen::Index split_boundary = -1,
                         const Eigen::VectorXd& weights = Eigen::VectorXd());

/// Ratio of full-order to online wall-clock time.
double speedup(double fom_seconds, double online_seconds);

/// CSV rows "t,relative_error_percent,window" with window in {train, validation}.
void write_error_report_csv(std::ostream& out, const ErrorReport& report);

}  // namespace rom
