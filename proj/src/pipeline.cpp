#include "rom/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "rom/errors.hpp"

namespace rom {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Training matrix in the space the basis was built on (mean removed when
// centering is active).
SnapshotMatrix projection_source(const RomArtifacts& artifacts) {
  if (artifacts.training_mean.size() == 0) return artifacts.filtered_training;
  SnapshotMatrix centered = artifacts.filtered_training;
  centered.values.colwise() -= artifacts.training_mean;
  return centered;
}

SnapshotMatrix restore_mean(const RomArtifacts& artifacts, SnapshotMatrix snapshots) {
  if (artifacts.training_mean.size() != 0) {
    snapshots.values.colwise() += artifacts.training_mean;
  }
  return snapshots;
}

// Coefficient history of the training window in original (unscaled) space,
// with the time row appended when the model was trained with one.
Eigen::MatrixXd training_coefficients(const RomArtifacts& artifacts) {
  ReducedTrajectory trajectory = project(projection_source(artifacts), artifacts.basis);
  Eigen::MatrixXd coefficients = std::move(trajectory.coefficients);
  if (artifacts.config.training.append_time_feature) {
    coefficients.conservativeResize(coefficients.rows() + 1, Eigen::NoChange);
    for (Eigen::Index i = 0; i < coefficients.cols(); ++i) {
      coefficients(coefficients.rows() - 1, i) = artifacts.filtered_training.time_at(i);
    }
  }
  return coefficients;
}

}  // namespace

void validate(const PipelineConfig& config) {
  if (config.delta.has_value() == config.n_modes.has_value()) {
    throw std::invalid_argument("exactly one of delta / n_modes must be set");
  }
  if (config.delta && !(*config.delta > 0.0 && *config.delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1]");
  }
  if (config.n_modes && *config.n_modes < 1) {
    throw std::invalid_argument("n_modes must be >= 1");
  }
  if (config.split.n_train < config.training.sequence_length + 1) {
    throw std::invalid_argument("n_train must be at least sequence_length + 1");
  }
}

RomArtifacts offline(const SnapshotMatrix& snapshots, const PipelineConfig& config,
                     int n_threads) {
  validate(config);
  validate(snapshots);
  const auto start = std::chrono::steady_clock::now();

  auto [training, validation] = split_train_validation(snapshots, config.split);
  (void)validation;

  RomArtifacts artifacts;
  artifacts.config = config;
  artifacts.filtered_training = filter_snapshots(training, config.filter, n_threads);
  if (config.center_mean) {
    artifacts.training_mean = artifacts.filtered_training.values.rowwise().mean();
  }

  const SnapshotMatrix decomposition_input = projection_source(artifacts);
  const SvdResult svd = compute_svd(decomposition_input);
  const Eigen::Index n_modes =
      config.n_modes ? *config.n_modes : select_modes(svd.singular_values, *config.delta);
  if (n_modes > svd.left.cols()) {
    throw std::invalid_argument("requested " + std::to_string(n_modes) +
                                " modes but the training data supports only " +
                                std::to_string(svd.left.cols()));
  }
  artifacts.basis = truncate_basis(svd, n_modes, artifacts.filtered_training.n_time());

  const ReducedTrajectory coefficients = project(decomposition_input, artifacts.basis);
  TrainResult trained = train(coefficients, config.training);
  artifacts.model = std::move(trained.model);
  artifacts.loss_history = std::move(trained.loss_history);

  artifacts.offline_seconds = seconds_since(start);
  return artifacts;
}

SnapshotMatrix online_predict(const RomArtifacts& artifacts, Eigen::Index n_steps,
                              double* online_seconds) {
  if (n_steps < 1) throw std::invalid_argument("online_predict needs n_steps >= 1");
  const auto start = std::chrono::steady_clock::now();

  const Eigen::Index s = artifacts.config.training.sequence_length;
  const Eigen::MatrixXd coefficients = training_coefficients(artifacts);
  if (coefficients.cols() < s) {
    throw std::invalid_argument("training history shorter than the sequence length");
  }

  const Eigen::MatrixXd seed_window = coefficients.rightCols(s);
  Eigen::MatrixXd predicted = predict_rollout(artifacts.model, seed_window, n_steps);
  if (artifacts.config.training.append_time_feature) {
    predicted.conservativeResize(predicted.rows() - 1, Eigen::NoChange);
  }

  ReducedTrajectory trajectory;
  trajectory.coefficients = std::move(predicted);
  trajectory.dt = artifacts.filtered_training.dt;
  // Continue the training grid: prediction column 0 is the instant right
  // after the last training column.
  trajectory.t0 = artifacts.filtered_training.t0 +
                  static_cast<double>(artifacts.filtered_training.n_time()) *
                      artifacts.filtered_training.dt;
  trajectory.field = artifacts.filtered_training.field;
  trajectory.name = artifacts.filtered_training.name;

  SnapshotMatrix prediction = restore_mean(artifacts, reconstruct(artifacts.basis, trajectory));
  if (online_seconds) *online_seconds = seconds_since(start);
  return prediction;
}

SnapshotMatrix identify(const RomArtifacts& artifacts) {
  const SnapshotMatrix source = projection_source(artifacts);
  return restore_mean(artifacts, reconstruct(artifacts.basis, project(source, artifacts.basis)));
}

double relative_l2_error(const Eigen::VectorXd& fom_column, const Eigen::VectorXd& rom_column,
                         const Eigen::VectorXd& weights) {
  if (fom_column.size() != rom_column.size()) {
    throw std::invalid_argument("relative_l2_error: length mismatch");
  }
  double reference_norm;
  double difference_norm;
  if (weights.size() == 0) {
    reference_norm = fom_column.norm();
    difference_norm = (fom_column - rom_column).norm();
  } else {
    if (weights.size() != fom_column.size()) {
      throw std::invalid_argument("relative_l2_error: weight vector length mismatch");
    }
    if (weights.minCoeff() < 0.0) {
      throw std::invalid_argument("relative_l2_error: weights must be non-negative");
    }
    reference_norm = std::sqrt((weights.array() * fom_column.array().square()).sum());
    difference_norm =
        std::sqrt((weights.array() * (fom_column - rom_column).array().square()).sum());
  }
  if (reference_norm == 0.0) {
    throw std::invalid_argument("relative_l2_error: reference column has zero norm");
  }
  return 100.0 * difference_norm / reference_norm;
}

ErrorReport error_series(const SnapshotMatrix& fom, const SnapshotMatrix& rom,
                         Eigen::Index split_boundary, const Eigen::VectorXd& weights) {
  if (fom.n_dof() != rom.n_dof() || fom.n_time() != rom.n_time()) {
    throw std::invalid_argument("error_series: shape mismatch (" + std::to_string(fom.n_dof()) +
                                "x" + std::to_string(fom.n_time()) + " vs " +
                                std::to_string(rom.n_dof()) + "x" + std::to_string(rom.n_time()) +
                                ")");
  }
  const double tolerance = 1e-9 * fom.dt;
  if (std::abs(fom.dt - rom.dt) > tolerance || std::abs(fom.t0 - rom.t0) > tolerance) {
    throw std::invalid_argument("error_series: time grids do not match");
  }

  const Eigen::Index n = fom.n_time();
  ErrorReport report;
  report.split_boundary = split_boundary < 0 ? n : split_boundary;
  if (report.split_boundary > n) throw std::invalid_argument("split boundary exceeds n_time");

  report.times.reserve(static_cast<std::size_t>(n));
  report.relative_errors_percent.reserve(static_cast<std::size_t>(n));

  double train_sum = 0.0;
  double validation_sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double error = relative_l2_error(fom.values.col(j), rom.values.col(j), weights);
    report.times.push_back(fom.time_at(j));
    report.relative_errors_percent.push_back(error);
    if (j < report.split_boundary) {
      train_sum += error;
      report.train_max = std::max(report.train_max, error);
    } else {
      validation_sum += error;
      report.validation_max = std::max(report.validation_max, error);
    }
  }
  if (report.split_boundary > 0) {
    report.train_mean = train_sum / static_cast<double>(report.split_boundary);
  }
  if (n > report.split_boundary) {
    report.validation_mean = validation_sum / static_cast<double>(n - report.split_boundary);
  }
  return report;
}

double speedup(double fom_seconds, double online_seconds) {
  if (!(online_seconds > 0.0)) {
    throw std::invalid_argument("speedup: online time must be > 0");
  }
  return fom_seconds / online_seconds;
}

void write_error_report_csv(std::ostream& out, const ErrorReport& report) {
  out << "t,relative_error_percent,window\n";
  char buffer[40];
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", report.times[i]);
    out << buffer << ",";
    std::snprintf(buffer, sizeof(buffer), "%.17g", report.relative_errors_percent[i]);
    out << buffer << ","
        << (static_cast<Eigen::Index>(i) < report.split_boundary ? "train" : "validation") << "\n";
  }
}

}  // namespace rom
