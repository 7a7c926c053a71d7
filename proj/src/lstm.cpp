#include "rom/lstm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "rom/errors.hpp"
#include "rom/rng.hpp"

namespace rom {

namespace {

constexpr char kMagic[8] = {'R', 'O', 'M', 'L', 'S', 'T', 'M', '1'};

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

Eigen::MatrixXd glorot_matrix(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = bound * rng.next_symmetric();
  }
  return m;
}

GateGradients zero_gate_gradients(const GateParams& gate) {
  return {Eigen::MatrixXd::Zero(gate.input_weights.rows(), gate.input_weights.cols()),
          Eigen::MatrixXd::Zero(gate.recurrent_weights.rows(), gate.recurrent_weights.cols()),
          Eigen::VectorXd::Zero(gate.bias.size())};
}

Gradients zero_gradients(const LSTMModel& model) {
  Gradients g;
  g.input_gate = zero_gate_gradients(model.input_gate);
  g.forget_gate = zero_gate_gradients(model.forget_gate);
  g.output_gate = zero_gate_gradients(model.output_gate);
  g.candidate = zero_gate_gradients(model.candidate);
  g.output_weights = Eigen::MatrixXd::Zero(model.output_weights.rows(), model.output_weights.cols());
  g.output_bias = Eigen::VectorXd::Zero(model.output_bias.size());
  return g;
}

template <typename Derived>
void adam_update(Eigen::MatrixBase<Derived>& param, const Eigen::MatrixBase<Derived>& grad,
                 Eigen::MatrixBase<Derived>& m, Eigen::MatrixBase<Derived>& v,
                 const TrainingConfig& cfg, double correction1, double correction2) {
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
  v = (cfg.adam_beta2 * v.array() + (1.0 - cfg.adam_beta2) * grad.array().square()).matrix();
  param.array() -=
      cfg.learning_rate * (m.array() / correction1) / ((v.array() / correction2).sqrt() + cfg.adam_epsilon);
}

void check_training_config(const TrainingConfig& cfg) {
  if (cfg.sequence_length < 1) throw std::invalid_argument("sequence_length must be >= 1");
  if (cfg.hidden_size < 1) throw std::invalid_argument("hidden_size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(cfg.adam_beta1 > 0.0 && cfg.adam_beta1 < 1.0) ||
      !(cfg.adam_beta2 > 0.0 && cfg.adam_beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must lie in (0, 1)");
  }
  if (!(cfg.adam_epsilon > 0.0)) throw std::invalid_argument("adam_epsilon must be > 0");
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

void write_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_matrix(std::ifstream& in, Eigen::MatrixXd& m, const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw io_error(path.string() + ": truncated model payload");
}

void read_vector(std::ifstream& in, Eigen::VectorXd& v, const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw io_error(path.string() + ": truncated model payload");
}

}  // namespace

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd& columns) const {
  if (columns.rows() != size()) {
    throw std::invalid_argument("scaler fitted on " + std::to_string(size()) +
                                " dimensions, got " + std::to_string(columns.rows()));
  }
  Eigen::MatrixXd scaled(columns.rows(), columns.cols());
  for (Eigen::Index d = 0; d < size(); ++d) {
    const double range = max[d] - min[d];
    if (range == 0.0) {
      scaled.row(d).setZero();
    } else {
      scaled.row(d) = (2.0 * (columns.row(d).array() - min[d]) / range - 1.0).matrix();
    }
  }
  return scaled;
}

Eigen::MatrixXd MinMaxScaler::inverse(const Eigen::MatrixXd& columns) const {
  if (columns.rows() != size()) {
    throw std::invalid_argument("scaler fitted on " + std::to_string(size()) +
                                " dimensions, got " + std::to_string(columns.rows()));
  }
  Eigen::MatrixXd original(columns.rows(), columns.cols());
  for (Eigen::Index d = 0; d < size(); ++d) {
    const double range = max[d] - min[d];
    if (range == 0.0) {
      original.row(d).setConstant(min[d]);
    } else {
      original.row(d) = ((columns.row(d).array() + 1.0) * 0.5 * range + min[d]).matrix();
    }
  }
  return original;
}

MinMaxScaler fit_scaler(const Eigen::MatrixXd& columns) {
  if (columns.rows() < 1 || columns.cols() < 1) {
    throw std::invalid_argument("fit_scaler needs a non-empty matrix");
  }
  MinMaxScaler scaler;
  scaler.min = columns.rowwise().minCoeff();
  scaler.max = columns.rowwise().maxCoeff();
  return scaler;
}

MinMaxScaler fit_scaler(const ReducedTrajectory& trajectory) {
  return fit_scaler(trajectory.coefficients);
}

Eigen::MatrixXd SequenceDataset::window(Eigen::Index sample) const {
  if (sample < 0 || sample >= n_samples()) throw std::invalid_argument("sample index out of range");
  Eigen::MatrixXd w(dim(), sequence_length());
  for (Eigen::Index t = 0; t < sequence_length(); ++t) w.col(t) = step_inputs[t].col(sample);
  return w;
}

SequenceDataset make_windows(const Eigen::MatrixXd& coefficients, Eigen::Index sequence_length) {
  const Eigen::Index n_time = coefficients.cols();
  if (sequence_length < 1) throw std::invalid_argument("sequence_length must be >= 1");
  if (n_time <= sequence_length) {
    throw std::invalid_argument("need n_time > sequence_length (" + std::to_string(n_time) +
                                " <= " + std::to_string(sequence_length) + ")");
  }
  const Eigen::Index n_samples = n_time - sequence_length;

  SequenceDataset dataset;
  dataset.step_inputs.reserve(static_cast<std::size_t>(sequence_length));
  for (Eigen::Index t = 0; t < sequence_length; ++t) {
    dataset.step_inputs.push_back(coefficients.middleCols(t, n_samples));
  }
  dataset.targets = coefficients.middleCols(sequence_length, n_samples);
  return dataset;
}

SequenceDataset make_windows(const ReducedTrajectory& trajectory, Eigen::Index sequence_length) {
  return make_windows(trajectory.coefficients, sequence_length);
}

LSTMModel init_model(Eigen::Index input_size, Eigen::Index hidden_size, std::uint64_t seed) {
  if (input_size < 1 || hidden_size < 1) {
    throw std::invalid_argument("model sizes must be >= 1");
  }
  SplitMix64 rng(seed);
  LSTMModel model;
  for (GateParams* gate : {&model.input_gate, &model.forget_gate, &model.output_gate, &model.candidate}) {
    gate->input_weights = glorot_matrix(hidden_size, input_size, rng);
    gate->recurrent_weights = glorot_matrix(hidden_size, hidden_size, rng);
    gate->bias = Eigen::VectorXd::Zero(hidden_size);
  }
  // Forget gate opens fully at the start so gradients flow through the cell
  // state from the first epochs.
  model.forget_gate.bias.setConstant(1.0);
  model.output_weights = glorot_matrix(input_size, hidden_size, rng);
  model.output_bias = Eigen::VectorXd::Zero(input_size);
  model.scaler.min = Eigen::VectorXd::Zero(input_size);
  model.scaler.max = Eigen::VectorXd::Zero(input_size);
  return model;
}

CellState cell_forward(const LSTMModel& model, const Eigen::VectorXd& x, const CellState& prev) {
  if (x.size() != model.input_size() || prev.h.size() != model.hidden_size() ||
      prev.c.size() != model.hidden_size()) {
    throw std::invalid_argument("cell_forward: dimension mismatch");
  }
  const Eigen::VectorXd i =
      sigmoid(model.input_gate.input_weights * x + model.input_gate.recurrent_weights * prev.h +
              model.input_gate.bias);
  const Eigen::VectorXd f =
      sigmoid(model.forget_gate.input_weights * x + model.forget_gate.recurrent_weights * prev.h +
              model.forget_gate.bias);
  const Eigen::VectorXd o =
      sigmoid(model.output_gate.input_weights * x + model.output_gate.recurrent_weights * prev.h +
              model.output_gate.bias);
  const Eigen::VectorXd g =
      (model.candidate.input_weights * x + model.candidate.recurrent_weights * prev.h +
       model.candidate.bias)
          .array()
          .tanh()
          .matrix();

  CellState next;
  next.c = (f.array() * prev.c.array() + i.array() * g.array()).matrix();
  next.h = (o.array() * next.c.array().tanh()).matrix();
  return next;
}

Eigen::VectorXd forward_sequence(const LSTMModel& model, const Eigen::MatrixXd& window) {
  if (window.rows() != model.input_size() || window.cols() < 1) {
    throw std::invalid_argument("forward_sequence: window must be input_size x s with s >= 1");
  }
  CellState state{Eigen::VectorXd::Zero(model.hidden_size()),
                  Eigen::VectorXd::Zero(model.hidden_size())};
  for (Eigen::Index t = 0; t < window.cols(); ++t) {
    state = cell_forward(model, window.col(t), state);
  }
  return model.output_weights * state.h + model.output_bias;
}

double mse_loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw std::invalid_argument("mse_loss: shape mismatch");
  }
  return (predictions - targets).squaredNorm() / static_cast<double>(predictions.size());
}

ForwardCache forward_batch(const LSTMModel& model, const SequenceDataset& dataset) {
  const Eigen::Index s = dataset.sequence_length();
  const Eigen::Index n = dataset.n_samples();
  const Eigen::Index hidden = model.hidden_size();
  if (dataset.dim() != model.input_size()) {
    throw std::invalid_argument("forward_batch: dataset dim does not match model input size");
  }

  ForwardCache cache;
  cache.gate_i.resize(s);
  cache.gate_f.resize(s);
  cache.gate_o.resize(s);
  cache.gate_g.resize(s);
  cache.cell.resize(s);
  cache.cell_tanh.resize(s);
  cache.hidden.resize(s);

  Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(hidden, n);
  Eigen::MatrixXd c_prev = Eigen::MatrixXd::Zero(hidden, n);
  for (Eigen::Index t = 0; t < s; ++t) {
    const Eigen::MatrixXd& x = dataset.step_inputs[static_cast<std::size_t>(t)];
    cache.gate_i[t] = sigmoid((model.input_gate.input_weights * x +
                               model.input_gate.recurrent_weights * h_prev)
                                  .colwise() +
                              model.input_gate.bias);
    cache.gate_f[t] = sigmoid((model.forget_gate.input_weights * x +
                               model.forget_gate.recurrent_weights * h_prev)
                                  .colwise() +
                              model.forget_gate.bias);
    cache.gate_o[t] = sigmoid((model.output_gate.input_weights * x +
                               model.output_gate.recurrent_weights * h_prev)
                                  .colwise() +
                              model.output_gate.bias);
    cache.gate_g[t] = ((model.candidate.input_weights * x +
                        model.candidate.recurrent_weights * h_prev)
                           .colwise() +
                       model.candidate.bias)
                          .array()
                          .tanh()
                          .matrix();
    cache.cell[t] = (cache.gate_f[t].array() * c_prev.array() +
                     cache.gate_i[t].array() * cache.gate_g[t].array())
                        .matrix();
    cache.cell_tanh[t] = cache.cell[t].array().tanh().matrix();
    cache.hidden[t] = (cache.gate_o[t].array() * cache.cell_tanh[t].array()).matrix();
    h_prev = cache.hidden[t];
    c_prev = cache.cell[t];
  }
  cache.predictions = (model.output_weights * cache.hidden[s - 1]).colwise() + model.output_bias;
  return cache;
}

Gradients backward(const LSTMModel& model, const SequenceDataset& dataset,
                   const ForwardCache& cache) {
  const Eigen::Index s = dataset.sequence_length();
  const Eigen::Index n = dataset.n_samples();

  Gradients grads = zero_gradients(model);

  // d(loss)/d(prediction) for the mean over all n*D squared residuals.
  const Eigen::MatrixXd d_pred =
      2.0 / static_cast<double>(cache.predictions.size()) * (cache.predictions - dataset.targets);
  grads.output_weights = d_pred * cache.hidden[s - 1].transpose();
  grads.output_bias = d_pred.rowwise().sum();

  Eigen::MatrixXd d_h = model.output_weights.transpose() * d_pred;
  Eigen::MatrixXd d_c = Eigen::MatrixXd::Zero(model.hidden_size(), n);

  for (Eigen::Index t = s - 1; t >= 0; --t) {
    const Eigen::MatrixXd& gate_i = cache.gate_i[t];
    const Eigen::MatrixXd& gate_f = cache.gate_f[t];
    const Eigen::MatrixXd& gate_o = cache.gate_o[t];
    const Eigen::MatrixXd& gate_g = cache.gate_g[t];
    const Eigen::MatrixXd& cell_tanh = cache.cell_tanh[t];
    const Eigen::MatrixXd& x = dataset.step_inputs[static_cast<std::size_t>(t)];

    const Eigen::MatrixXd d_o =
        (d_h.array() * cell_tanh.array() * gate_o.array() * (1.0 - gate_o.array())).matrix();
    d_c.array() += d_h.array() * gate_o.array() * (1.0 - cell_tanh.array().square());

    const Eigen::MatrixXd d_i =
        (d_c.array() * gate_g.array() * gate_i.array() * (1.0 - gate_i.array())).matrix();
    const Eigen::MatrixXd d_g =
        (d_c.array() * gate_i.array() * (1.0 - gate_g.array().square())).matrix();
    Eigen::MatrixXd d_f;
    if (t > 0) {
      d_f = (d_c.array() * cache.cell[t - 1].array() * gate_f.array() * (1.0 - gate_f.array()))
                .matrix();
    } else {
      d_f = Eigen::MatrixXd::Zero(model.hidden_size(), n);  // initial cell state is zero
    }

    grads.input_gate.input_weights += d_i * x.transpose();
    grads.forget_gate.input_weights += d_f * x.transpose();
    grads.output_gate.input_weights += d_o * x.transpose();
    grads.candidate.input_weights += d_g * x.transpose();
    grads.input_gate.bias += d_i.rowwise().sum();
    grads.forget_gate.bias += d_f.rowwise().sum();
    grads.output_gate.bias += d_o.rowwise().sum();
    grads.candidate.bias += d_g.rowwise().sum();
    if (t > 0) {
      const Eigen::MatrixXd& h_prev = cache.hidden[t - 1];
      grads.input_gate.recurrent_weights += d_i * h_prev.transpose();
      grads.forget_gate.recurrent_weights += d_f * h_prev.transpose();
      grads.output_gate.recurrent_weights += d_o * h_prev.transpose();
      grads.candidate.recurrent_weights += d_g * h_prev.transpose();

      d_h = model.input_gate.recurrent_weights.transpose() * d_i +
            model.forget_gate.recurrent_weights.transpose() * d_f +
            model.output_gate.recurrent_weights.transpose() * d_o +
            model.candidate.recurrent_weights.transpose() * d_g;
      d_c = (d_c.array() * gate_f.array()).matrix();
    }
  }
  return grads;
}

AdamState make_adam_state(const LSTMModel& model) {
  return {zero_gradients(model), zero_gradients(model), 0};
}

void adam_step(LSTMModel& model, const Gradients& gradients, AdamState& state,
               const TrainingConfig& config) {
  state.step += 1;
  const double correction1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(state.step));

  auto update_gate = [&](GateParams& gate, const GateGradients& grad, GateGradients& m,
                         GateGradients& v) {
    adam_update(gate.input_weights, grad.input_weights, m.input_weights, v.input_weights, config,
                correction1, correction2);
    adam_update(gate.recurrent_weights, grad.recurrent_weights, m.recurrent_weights,
                v.recurrent_weights, config, correction1, correction2);
    adam_update(gate.bias, grad.bias, m.bias, v.bias, config, correction1, correction2);
  };
  update_gate(model.input_gate, gradients.input_gate, state.first_moment.input_gate,
              state.second_moment.input_gate);
  update_gate(model.forget_gate, gradients.forget_gate, state.first_moment.forget_gate,
              state.second_moment.forget_gate);
  update_gate(model.output_gate, gradients.output_gate, state.first_moment.output_gate,
              state.second_moment.output_gate);
  update_gate(model.candidate, gradients.candidate, state.first_moment.candidate,
              state.second_moment.candidate);
  adam_update(model.output_weights, gradients.output_weights, state.first_moment.output_weights,
              state.second_moment.output_weights, config, correction1, correction2);
  adam_update(model.output_bias, gradients.output_bias, state.first_moment.output_bias,
              state.second_moment.output_bias, config, correction1, correction2);
}

TrainResult train(const ReducedTrajectory& c_train, const TrainingConfig& config) {
  check_training_config(config);

  Eigen::MatrixXd coefficients = c_train.coefficients;
  if (config.append_time_feature) {
    coefficients.conservativeResize(coefficients.rows() + 1, Eigen::NoChange);
    for (Eigen::Index i = 0; i < coefficients.cols(); ++i) {
      coefficients(coefficients.rows() - 1, i) = c_train.t0 + static_cast<double>(i + 1) * c_train.dt;
    }
  }
  if (coefficients.cols() <= config.sequence_length) {
    throw std::invalid_argument("training needs n_time > sequence_length");
  }

  const MinMaxScaler scaler = fit_scaler(coefficients);
  const Eigen::MatrixXd scaled = scaler.transform(coefficients);
  const SequenceDataset dataset = make_windows(scaled, config.sequence_length);

  TrainResult result;
  result.model = init_model(coefficients.rows(), config.hidden_size, config.seed);
  result.model.scaler = scaler;
  result.loss_history.reserve(static_cast<std::size_t>(config.epochs));

  AdamState state = make_adam_state(result.model);
  for (Eigen::Index epoch = 0; epoch < config.epochs; ++epoch) {
    const ForwardCache cache = forward_batch(result.model, dataset);
    const double loss = mse_loss(cache.predictions, dataset.targets);
    if (!std::isfinite(loss)) {
      throw numeric_error("training diverged (non-finite loss) at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(loss);
    const Gradients grads = backward(result.model, dataset, cache);
    adam_step(result.model, grads, state, config);
  }
  return result;
}

Eigen::MatrixXd predict_rollout(const LSTMModel& model, const Eigen::MatrixXd& seed_window,
                                Eigen::Index n_steps) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  if (seed_window.rows() != model.input_size() || seed_window.cols() < 1) {
    throw std::invalid_argument("seed window must be input_size x s with s >= 1");
  }
  if (n_steps == 0) return Eigen::MatrixXd(model.input_size(), 0);

  Eigen::MatrixXd window = model.scaler.transform(seed_window);
  Eigen::MatrixXd predictions(model.input_size(), n_steps);
  for (Eigen::Index k = 0; k < n_steps; ++k) {
    const Eigen::VectorXd next = forward_sequence(model, window);
    predictions.col(k) = next;
    // Slide the window: drop the oldest column, append the prediction.
    const Eigen::Index s = window.cols();
    window.leftCols(s - 1) = window.rightCols(s - 1).eval();
    window.col(s - 1) = next;
  }
  return model.scaler.inverse(predictions);
}

void save_model(const LSTMModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");

  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t dim = static_cast<std::uint64_t>(model.input_size());
  const std::uint64_t hidden = static_cast<std::uint64_t>(model.hidden_size());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  out.write(reinterpret_cast<const char*>(&hidden), sizeof(hidden));
  for (const GateParams* gate :
       {&model.input_gate, &model.forget_gate, &model.output_gate, &model.candidate}) {
    write_matrix(out, gate->input_weights);
    write_matrix(out, gate->recurrent_weights);
    write_vector(out, gate->bias);
  }
  write_matrix(out, model.output_weights);
  write_vector(out, model.output_bias);
  for (Eigen::Index d = 0; d < model.scaler.size(); ++d) {
    const double pair[2] = {model.scaler.min[d], model.scaler.max[d]};
    out.write(reinterpret_cast<const char*>(pair), sizeof(pair));
  }
  out.flush();
  if (!out) throw io_error(path.string() + ": write failed");
}

LSTMModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string() + ": cannot open for reading");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw io_error(path.string() + ": bad magic (expected ROMLSTM1)");
  }
  std::uint64_t dim = 0, hidden = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  in.read(reinterpret_cast<char*>(&hidden), sizeof(hidden));
  if (!in || dim == 0 || hidden == 0) throw io_error(path.string() + ": invalid model header");

  LSTMModel model;
  const Eigen::Index d = static_cast<Eigen::Index>(dim);
  const Eigen::Index h = static_cast<Eigen::Index>(hidden);
  for (GateParams* gate :
       {&model.input_gate, &model.forget_gate, &model.output_gate, &model.candidate}) {
    gate->input_weights.resize(h, d);
    gate->recurrent_weights.resize(h, h);
    gate->bias.resize(h);
    read_matrix(in, gate->input_weights, path);
    read_matrix(in, gate->recurrent_weights, path);
    read_vector(in, gate->bias, path);
  }
  model.output_weights.resize(d, h);
  model.output_bias.resize(d);
  read_matrix(in, model.output_weights, path);
  read_vector(in, model.output_bias, path);
  model.scaler.min.resize(d);
  model.scaler.max.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double pair[2];
    in.read(reinterpret_cast<char*>(pair), sizeof(pair));
    if (!in) throw io_error(path.string() + ": truncated scaler payload");
    model.scaler.min[i] = pair[0];
    model.scaler.max[i] = pair[1];
  }
  in.peek();
  if (!in.eof()) throw io_error(path.string() + ": trailing bytes after model payload");
  return model;
}

}  // namespace rom
