#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rom/pod.hpp"

namespace rom {

/// Per-dimension affine map onto [-1, 1], fitted on training columns only.
/// A constant dimension (max == min) maps to 0 and inverts back to the
/// constant; the round trip is exact elsewhere.
struct MinMaxScaler {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  Eigen::Index size() const { return min.size(); }
  Eigen::MatrixXd transform(const Eigen::MatrixXd& columns) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& columns) const;
};

MinMaxScaler fit_scaler(const Eigen::MatrixXd& columns);
MinMaxScaler fit_scaler(const ReducedTrajectory& trajectory);

/// One-step-ahead supervised windows over a coefficient history: sample j
/// reads columns j..j+s-1 and predicts column j+s, giving n_time - s samples.
/// Stored step-major for batched training: step_inputs[t] is dim x n_samples.
struct SequenceDataset {
  std::vector<Eigen::MatrixXd> step_inputs;
  Eigen::MatrixXd targets;  // dim x n_samples

  Eigen::Index sequence_length() const { return static_cast<Eigen::Index>(step_inputs.size()); }
  Eigen::Index n_samples() const { return targets.cols(); }
  Eigen::Index dim() const { return targets.rows(); }

  /// Window of one sample, one column per step (dim x s).
  Eigen::MatrixXd window(Eigen::Index sample) const;
};

SequenceDataset make_windows(const Eigen::MatrixXd& coefficients, Eigen::Index sequence_length);
SequenceDataset make_windows(const ReducedTrajectory& trajectory, Eigen::Index sequence_length);

enum class BatchMode { Full };

struct TrainingConfig {
  Eigen::Index sequence_length = 50;
  Eigen::Index hidden_size = 32;
  double learning_rate = 1e-3;
  Eigen::Index epochs = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  BatchMode batch = BatchMode::Full;
  // Appends the raw time stamp as one extra coefficient dimension before
  // scaling, for experiments where the dynamics benefit from a clock input.
  bool append_time_feature = false;
};

struct GateParams {
  Eigen::MatrixXd input_weights;      // H x D
  Eigen::MatrixXd recurrent_weights;  // H x H
  Eigen::VectorXd bias;               // H
};

/// Single-layer LSTM with a linear output head, operating in scaled space.
/// Immutable once trained; safe to share across threads.
struct LSTMModel {
  GateParams input_gate;
  GateParams forget_gate;
  GateParams output_gate;
  GateParams candidate;
  Eigen::MatrixXd output_weights;  // D x H
  Eigen::VectorXd output_bias;     // D
  MinMaxScaler scaler;             // D (min, max) pairs

  Eigen::Index input_size() const { return input_gate.input_weights.cols(); }
  Eigen::Index hidden_size() const { return input_gate.input_weights.rows(); }
};

/// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out)), entries drawn
/// column-major from one SplitMix64 stream), zero biases except the forget
/// gate bias which starts at 1. Deterministic in the seed.
LSTMModel init_model(Eigen::Index input_size, Eigen::Index hidden_size, std::uint64_t seed);

struct CellState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

/// One gated cell step:
///   i = sigmoid(Wi x + Ai h + bi)    f = sigmoid(Wf x + Af h + bf)
///   o = sigmoid(Wo x + Ao h + bo)    g = tanh(Wc x + Ac h + bc)
///   c' = f .* c + i .* g             h' = o .* tanh(c')
CellState cell_forward(const LSTMModel& model, const Eigen::VectorXd& x, const CellState& prev);

/// Runs the cell over the window columns from zero initial state and applies
/// the linear head to the last hidden state. Window and result live in
/// scaled space.
Eigen::VectorXd forward_sequence(const LSTMModel& model, const Eigen::MatrixXd& window);

/// Mean over all n*D squared residuals.
double mse_loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

/// Per-step activations kept for backpropagation through time.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> gate_i, gate_f, gate_o, gate_g;  // H x n each step
  std::vector<Eigen::MatrixXd> cell, cell_tanh, hidden;
  Eigen::MatrixXd predictions;  // D x n
};

ForwardCache forward_batch(const LSTMModel& model, const SequenceDataset& dataset);

struct GateGradients {
  Eigen::MatrixXd input_weights;
  Eigen::MatrixXd recurrent_weights;
  Eigen::VectorXd bias;
};

struct Gradients {
  GateGradients input_gate, forget_gate, output_gate, candidate;
  Eigen::MatrixXd output_weights;
  Eigen::VectorXd output_bias;
};

/// Exact reverse-mode gradients of mse_loss over the dataset, truncated at
/// window boundaries (h and c reset per window).
Gradients backward(const LSTMModel& model, const SequenceDataset& dataset,
                   const ForwardCache& cache);

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  Eigen::Index step = 0;
};

AdamState make_adam_state(const LSTMModel& model);

/// Bias-corrected Adam update applied to every parameter.
void adam_step(LSTMModel& model, const Gradients& gradients, AdamState& state,
               const TrainingConfig& config);

struct TrainResult {
  LSTMModel model;
  std::vector<double> loss_history;  // one entry per epoch, evaluated pre-update
};

/// Fits the scaler on the training trajectory, builds windows, and runs
/// full-batch Adam for the configured number of epochs. Deterministic in
/// (data, config, seed). Throws rom::numeric_error with the epoch index if
/// the loss leaves the finite range.
TrainResult train(const ReducedTrajectory& c_train, const TrainingConfig& config);

/// Closed-loop autoregressive rollout. The seed window (dim x s, original
/// coefficient space) is scaled, fed through the network, and each prediction
/// is appended while the oldest column drops; results are inverse-scaled.
/// Returns dim x n_steps.
Eigen::MatrixXd predict_rollout(const LSTMModel& model, const Eigen::MatrixXd& seed_window,
                                Eigen::Index n_steps);

// Model file layout (little-endian, all payload f64): magic "ROMLSTM1",
// u64 D, u64 H, then per gate in the order input, forget, output, candidate:
// input weights (H x D, column-major), recurrent weights (H x H), bias (H).
// Then the output head (D x H weights column-major, D bias) and D scaler
// (min, max) pairs.
void save_model(const LSTMModel& model, const std::filesystem::path& path);
LSTMModel load_model(const std::filesystem::path& path);

}  // namespace rom
