// Command-line front end for the snapshot ROM toolkit:
//   rom synth|psd-report|filter|pod|train|predict|evaluate|pipeline
// Exit codes: 0 success, 2 usage/config error, 3 I/O error, 4 numeric failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rom/config.hpp"
#include "rom/errors.hpp"
#include "rom/filter.hpp"
#include "rom/fft.hpp"
#include "rom/lstm.hpp"
#include "rom/pipeline.hpp"
#include "rom/pod.hpp"
#include "rom/snapshot.hpp"
#include "rom/svg.hpp"
#include "rom/synth.hpp"

namespace {

struct GlobalOptions {
  int threads = 1;
  bool quiet = false;
};

std::ostream& info(const GlobalOptions& global) {
  static std::ofstream null_sink;
  if (global.quiet) {
    null_sink.setstate(std::ios::badbit);
    return null_sink;
  }
  return std::cout;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw rom::io_error(path.string() + ": cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw rom::io_error(path.string() + ": write failed");
}

std::vector<Eigen::Index> parse_dof_list(const std::vector<std::string>& raw) {
  std::vector<Eigen::Index> indices;
  for (const std::string& chunk : raw) {
    std::stringstream ss(chunk);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell.empty()) continue;
      try {
        indices.push_back(static_cast<Eigen::Index>(std::stoll(cell)));
      } catch (const std::exception&) {
        throw rom::config_error("invalid DOF index '" + cell + "'");
      }
    }
  }
  if (indices.empty()) throw rom::config_error("at least one DOF index is required");
  return indices;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

void run_synth(const GlobalOptions& global, const std::string& config_path,
               const std::string& out_path) {
  const auto entries = rom::load_config_file(config_path);
  const rom::SynthFileConfig config = rom::parse_synth_config(entries);

  rom::SnapshotMatrix snapshots;
  switch (config.field) {
    case rom::FieldKind::EulerianScalar:
      snapshots = rom::generate_eulerian(config.spec, config.n_time, config.dt, config.t0);
      break;
    default: {
      // Single-component Lagrangian generation: same synthesis, different tag.
      snapshots = rom::generate_eulerian(config.spec, config.n_time, config.dt, config.t0);
      snapshots.field = config.field;
      break;
    }
  }
  snapshots.name = config.name;
  rom::save_snapshots(snapshots, out_path, rom::format_from_path(out_path));
  info(global) << "wrote " << snapshots.n_dof() << "x" << snapshots.n_time() << " "
               << rom::field_kind_name(snapshots.field) << " snapshots to " << out_path << "\n";
}

void run_psd_report(const GlobalOptions& global, const std::string& in_path,
                    const std::vector<std::string>& dof_raw, const std::string& out_path,
                    const std::string& svg_path, double threshold, bool has_threshold) {
  const auto snapshots = rom::load_snapshots(in_path, rom::format_from_path(in_path));
  const auto dofs = parse_dof_list(dof_raw);

  std::ostringstream csv;
  rom::write_psd_report_csv(csv, snapshots, dofs);
  write_text_file(out_path, csv.str());
  info(global) << "wrote PSD report for " << dofs.size() << " DOF(s) to " << out_path << "\n";

  if (!svg_path.empty()) {
    std::vector<rom::SvgSeries> series;
    for (const Eigen::Index dof : dofs) {
      const Eigen::VectorXd row = snapshots.values.row(dof).transpose();
      const rom::Spectrum spectrum = rom::dft_forward(row, snapshots.dt);
      const rom::PsdVector power = rom::psd(spectrum, spectrum.size());
      rom::SvgSeries s;
      s.label = "dof " + std::to_string(dof);
      // Plot up to the Nyquist bin; the upper half mirrors the lower.
      const Eigen::Index half = power.values.size() / 2;
      for (Eigen::Index k = 0; k <= half; ++k) {
        s.x.push_back(power.frequencies_hz[k]);
        s.y.push_back(power.values[k]);
      }
      series.push_back(std::move(s));
    }
    rom::SvgChartOptions options;
    options.title = "PSD per frequency";
    options.x_label = "frequency [Hz]";
    options.y_label = "PSD";
    options.log_y = true;
    if (has_threshold) options.horizontal_line = threshold;
    write_text_file(svg_path, rom::render_line_chart(series, options));
    info(global) << "wrote PSD chart to " << svg_path << "\n";
  }
}

void run_filter(const GlobalOptions& global, const std::string& in_path,
                const std::string& out_path, double threshold, bool keep_dc) {
  const auto snapshots = rom::load_snapshots(in_path, rom::format_from_path(in_path));
  rom::FilterConfig config{threshold, keep_dc};
  const auto filtered = rom::filter_snapshots(snapshots, config, global.threads);
  rom::save_snapshots(filtered, out_path, rom::format_from_path(out_path));
  info(global) << "filtered " << filtered.n_dof() << "x" << filtered.n_time()
               << " snapshots (threshold " << threshold << ", keep_dc " << std::boolalpha
               << keep_dc << ") to " << out_path << "\n";
}

void run_pod(const GlobalOptions& global, const std::string& in_path,
             const std::string& basis_out, double delta, bool has_delta, Eigen::Index n_modes,
             bool has_modes) {
  if (has_delta == has_modes) {
    throw rom::config_error("exactly one of --delta and --modes must be given");
  }
  const auto snapshots = rom::load_snapshots(in_path, rom::format_from_path(in_path));
  const rom::SvdResult svd = rom::compute_svd(snapshots);
  const Eigen::Index selected = has_delta ? rom::select_modes(svd.singular_values, delta) : n_modes;
  if (selected < 1 || selected > svd.left.cols()) {
    throw rom::config_error("mode count " + std::to_string(selected) + " outside [1, " +
                            std::to_string(svd.left.cols()) + "]");
  }
  const rom::PODBasis basis = rom::truncate_basis(svd, selected, snapshots.n_time());
  rom::save_basis(basis, basis_out);
  // The selected mode count is the command's result; print it even in quiet runs.
  std::cout << "modes: " << selected << " (cumulative energy "
            << rom::cumulative_energy(svd.singular_values, selected) << ")\n";
  info(global) << "wrote basis to " << basis_out << "\n";
}

void run_train(const GlobalOptions& global, const std::string& in_path,
               const std::string& basis_path, const std::string& model_out,
               const std::string& config_path, std::string loss_out) {
  const auto entries = rom::load_config_file(config_path);
  const rom::TrainingConfig config = rom::parse_training_config(entries);

  const auto snapshots = rom::load_snapshots(in_path, rom::format_from_path(in_path));
  const rom::PODBasis basis = rom::load_basis(basis_path);
  const rom::ReducedTrajectory coefficients = rom::project(snapshots, basis);

  const rom::TrainResult result = rom::train(coefficients, config);
  rom::save_model(result.model, model_out);

  if (loss_out.empty()) loss_out = model_out + ".loss.csv";
  std::ostringstream csv;
  csv << "epoch,mse\n";
  char buffer[40];
  for (std::size_t epoch = 0; epoch < result.loss_history.size(); ++epoch) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", result.loss_history[epoch]);
    csv << epoch << "," << buffer << "\n";
  }
  write_text_file(loss_out, csv.str());

  info(global) << "trained " << basis.n_modes() << "-dim model (H=" << config.hidden_size
               << ") for " << config.epochs << " epochs; final training MSE "
               << result.loss_history.back() << "\nwrote model to " << model_out
               << ", loss history to " << loss_out << "\n";
}

void run_predict(const GlobalOptions& global, const std::string& model_path,
                 const std::string& basis_path, const std::string& seed_path, Eigen::Index steps,
                 const std::string& out_path, Eigen::Index window) {
  if (steps < 1) throw rom::config_error("--steps must be >= 1");
  const rom::LSTMModel model = rom::load_model(model_path);
  const rom::PODBasis basis = rom::load_basis(basis_path);
  const auto seeds = rom::load_snapshots(seed_path, rom::format_from_path(seed_path));

  const bool time_feature = model.input_size() == basis.n_modes() + 1;
  if (!time_feature && model.input_size() != basis.n_modes()) {
    throw rom::config_error("model input size " + std::to_string(model.input_size()) +
                            " does not match basis mode count " + std::to_string(basis.n_modes()));
  }

  rom::ReducedTrajectory projected = rom::project(seeds, basis);
  Eigen::MatrixXd history = std::move(projected.coefficients);
  if (time_feature) {
    history.conservativeResize(history.rows() + 1, Eigen::NoChange);
    for (Eigen::Index i = 0; i < history.cols(); ++i) {
      history(history.rows() - 1, i) = seeds.time_at(i);
    }
  }

  if (window <= 0) window = history.cols();
  if (window > history.cols()) {
    throw rom::config_error("--window " + std::to_string(window) + " exceeds available history " +
                            std::to_string(history.cols()));
  }

  Eigen::MatrixXd rolled = rom::predict_rollout(model, history.rightCols(window), steps);
  if (time_feature) rolled.conservativeResize(rolled.rows() - 1, Eigen::NoChange);

  rom::ReducedTrajectory trajectory;
  trajectory.coefficients = std::move(rolled);
  trajectory.dt = seeds.dt;
  trajectory.t0 = seeds.t0 + static_cast<double>(seeds.n_time()) * seeds.dt;
  trajectory.field = seeds.field;
  trajectory.name = seeds.name;

  const rom::SnapshotMatrix prediction = rom::reconstruct(basis, trajectory);
  rom::save_snapshots(prediction, out_path, rom::format_from_path(out_path));
  info(global) << "rolled out " << steps << " step(s) from a " << window
               << "-column window; wrote prediction to " << out_path << "\n";
}

void run_evaluate(const GlobalOptions& global, const std::string& fom_path,
                  const std::string& rom_path, const std::string& report_path,
                  const std::string& svg_path, Eigen::Index split_index) {
  const auto fom = rom::load_snapshots(fom_path, rom::format_from_path(fom_path));
  const auto rom_field = rom::load_snapshots(rom_path, rom::format_from_path(rom_path));
  const rom::ErrorReport report = rom::error_series(fom, rom_field, split_index);

  std::ostringstream csv;
  rom::write_error_report_csv(csv, report);
  write_text_file(report_path, csv.str());

  if (!svg_path.empty()) {
    rom::SvgSeries series;
    series.label = "relative error";
    series.x = report.times;
    series.y = report.relative_errors_percent;
    rom::SvgChartOptions options;
    options.title = "Relative error per time instant";
    options.x_label = "t [s]";
    options.y_label = "relative error [%]";
    if (report.split_boundary > 0 &&
        report.split_boundary < static_cast<Eigen::Index>(report.times.size())) {
      options.vertical_line = report.times[static_cast<std::size_t>(report.split_boundary)];
    }
    write_text_file(svg_path, rom::render_line_chart({series}, options));
  }

  info(global) << "train window:      mean " << report.train_mean << "%, max " << report.train_max
               << "%\n";
  if (report.split_boundary < static_cast<Eigen::Index>(report.times.size())) {
    info(global) << "validation window: mean " << report.validation_mean << "%, max "
                 << report.validation_max << "%\n";
  }
  info(global) << "wrote report to " << report_path << "\n";
}

void run_pipeline(const GlobalOptions& global, const std::string& config_path,
                  const std::string& out_dir) {
  const auto entries = rom::load_config_file(config_path);
  const rom::PipelineFileConfig config = rom::parse_pipeline_config(entries);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  rom::SnapshotMatrix snapshots;
  if (config.input_path) {
    snapshots = rom::load_snapshots(*config.input_path, rom::format_from_path(*config.input_path));
  } else {
    const rom::SynthFileConfig& synth = *config.synth;
    snapshots = rom::generate_eulerian(synth.spec, synth.n_time, synth.dt, synth.t0);
    snapshots.field = synth.field;
    snapshots.name = synth.name;
    rom::save_snapshots(snapshots, dir / "snapshots.bin", rom::SnapshotFormat::Binary);
  }

  const rom::RomArtifacts artifacts = rom::offline(snapshots, config.pipeline, global.threads);
  rom::save_snapshots(artifacts.filtered_training, dir / "filtered_train.bin",
                      rom::SnapshotFormat::Binary);
  rom::save_basis(artifacts.basis, dir / "basis.bin");
  rom::save_model(artifacts.model, dir / "model.bin");
  {
    std::ostringstream csv;
    csv << "epoch,mse\n";
    char buffer[40];
    for (std::size_t epoch = 0; epoch < artifacts.loss_history.size(); ++epoch) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", artifacts.loss_history[epoch]);
      csv << epoch << "," << buffer << "\n";
    }
    write_text_file(dir / "loss.csv", csv.str());
  }
  info(global) << "offline phase: " << artifacts.basis.n_modes() << " modes, final MSE "
               << artifacts.loss_history.back() << ", " << artifacts.offline_seconds << " s\n";

  const Eigen::Index n_train = config.pipeline.split.n_train;
  const Eigen::Index n_validation = config.pipeline.split.n_validation;
  const Eigen::Index steps = config.predict_steps > 0 ? config.predict_steps : n_validation;
  if (steps < 1) throw rom::config_error("nothing to predict: set predict_steps or n_validation");

  double online_seconds = 0.0;
  const rom::SnapshotMatrix prediction = rom::online_predict(artifacts, steps, &online_seconds);
  rom::save_snapshots(prediction, dir / "prediction.bin", rom::SnapshotFormat::Binary);
  info(global) << "online phase: " << steps << " step(s), " << online_seconds << " s\n";

  // Error report over [training window | first predicted steps], measured
  // against the filtered reference by default (the model's actual target).
  const rom::SnapshotMatrix identified = rom::identify(artifacts);
  const Eigen::Index report_steps = std::min(steps, n_validation);
  rom::SnapshotMatrix reference;
  if (config.error_vs_unfiltered) {
    reference = snapshots;
  } else {
    reference = rom::filter_snapshots(snapshots, config.pipeline.filter, global.threads);
  }

  rom::SnapshotMatrix fom_eval;
  fom_eval.values = reference.values.leftCols(n_train + report_steps);
  fom_eval.t0 = reference.t0;
  fom_eval.dt = reference.dt;
  fom_eval.field = reference.field;
  fom_eval.name = reference.name;

  rom::SnapshotMatrix rom_eval = fom_eval;
  rom_eval.values.leftCols(n_train) = identified.values;
  rom_eval.values.rightCols(report_steps) = prediction.values.leftCols(report_steps);

  rom::ErrorReport report = rom::error_series(fom_eval, rom_eval, n_train);
  report.offline_seconds = artifacts.offline_seconds;
  report.online_seconds = online_seconds;
  {
    std::ostringstream csv;
    rom::write_error_report_csv(csv, report);
    write_text_file(dir / "report.csv", csv.str());
  }
  {
    rom::SvgSeries series;
    series.label = "relative error";
    series.x = report.times;
    series.y = report.relative_errors_percent;
    rom::SvgChartOptions options;
    options.title = "Relative error per time instant";
    options.x_label = "t [s]";
    options.y_label = "relative error [%]";
    if (report_steps > 0) {
      options.vertical_line = report.times[static_cast<std::size_t>(n_train)];
    }
    write_text_file(dir / "report.svg", rom::render_line_chart({series}, options));
  }

  info(global) << "identification: mean " << report.train_mean << "%, max " << report.train_max
               << "%\n";
  if (report_steps > 0) {
    info(global) << "prediction:     mean " << report.validation_mean << "%, max "
                 << report.validation_max << "% over " << report_steps << " step(s)\n";
  }
  if (config.fom_seconds) {
    info(global) << "speed-up vs full-order solve: "
                 << rom::speedup(*config.fom_seconds, online_seconds) << "x\n";
  }
  info(global) << "artifacts in " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Snapshot compression and forecast toolkit (PSD filtering + POD + LSTM)"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--threads", global.threads, "Worker threads for row-parallel stages")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", global.quiet, "Suppress informational output");

  // synth
  std::string synth_config, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate synthetic snapshots from a config file");
  synth->add_option("--config", synth_config, "Synth config file")->required();
  synth->add_option("--out", synth_out, "Output snapshot file (.csv for text)")->required();

  // psd-report
  std::string psd_in, psd_out, psd_svg;
  std::vector<std::string> psd_dofs;
  double psd_threshold = 0.0;
  auto* psd_report = app.add_subcommand("psd-report", "Per-DOF power spectral density report");
  psd_report->add_option("--in", psd_in, "Input snapshot file")->required();
  psd_report->add_option("--dof", psd_dofs, "DOF indices (repeatable or comma-separated)")
      ->required();
  psd_report->add_option("--out", psd_out, "Output CSV path")->required();
  psd_report->add_option("--svg", psd_svg, "Optional SVG chart path");
  auto* psd_threshold_opt =
      psd_report->add_option("--threshold", psd_threshold, "Threshold line for the chart");

  // filter
  std::string filter_in, filter_out;
  double filter_threshold = 0.0;
  bool filter_keep_dc = true;
  auto* filter = app.add_subcommand("filter", "PSD-thresholded frequency filtering");
  filter->add_option("--in", filter_in, "Input snapshot file")->required();
  filter->add_option("--out", filter_out, "Output snapshot file")->required();
  filter->add_option("--threshold", filter_threshold, "PSD threshold")->required();
  filter->add_option("--keep-dc", filter_keep_dc, "Preserve the mean (bin 0)")
      ->default_val(true);

  // pod
  std::string pod_in, pod_basis_out;
  double pod_delta = 0.0;
  Eigen::Index pod_modes = 0;
  auto* pod = app.add_subcommand("pod", "Extract a truncated orthonormal basis");
  pod->add_option("--in", pod_in, "Input snapshot file")->required();
  pod->add_option("--basis-out", pod_basis_out, "Output basis file")->required();
  auto* pod_delta_opt = pod->add_option("--delta", pod_delta, "Cumulative energy threshold (0,1]");
  auto* pod_modes_opt = pod->add_option("--modes", pod_modes, "Explicit mode count");

  // train
  std::string train_in, train_basis, train_model_out, train_config, train_loss_out;
  auto* train = app.add_subcommand("train", "Train the sequence model on projected coefficients");
  train->add_option("--in", train_in, "Training snapshot file (typically filtered)")->required();
  train->add_option("--basis", train_basis, "Basis file")->required();
  train->add_option("--model-out", train_model_out, "Output model file")->required();
  train->add_option("--config", train_config, "Training config file")->required();
  train->add_option("--loss-out", train_loss_out,
                    "Loss history CSV (default: <model-out>.loss.csv)");

  // predict
  std::string predict_model, predict_basis, predict_seed, predict_out;
  Eigen::Index predict_steps = 0, predict_window = 0;
  auto* predict = app.add_subcommand("predict", "Autoregressive rollout and reconstruction");
  predict->add_option("--model", predict_model, "Model file")->required();
  predict->add_option("--basis", predict_basis, "Basis file")->required();
  predict->add_option("--seed-snapshots", predict_seed, "Snapshots providing the seed window")
      ->required();
  predict->add_option("--steps", predict_steps, "Number of steps to predict")->required();
  predict->add_option("--out", predict_out, "Output snapshot file")->required();
  predict->add_option("--window", predict_window,
                      "Seed window length (default: all seed columns)");

  // evaluate
  std::string eval_fom, eval_rom, eval_report, eval_svg;
  Eigen::Index eval_split = -1;
  auto* evaluate = app.add_subcommand("evaluate", "Relative error report between two field files");
  evaluate->add_option("--fom", eval_fom, "Reference snapshot file")->required();
  evaluate->add_option("--rom", eval_rom, "Reconstructed snapshot file")->required();
  evaluate->add_option("--report", eval_report, "Output CSV path")->required();
  evaluate->add_option("--svg", eval_svg, "Optional SVG chart path");
  evaluate->add_option("--split-index", eval_split,
                       "First validation column (default: all training)");

  // pipeline
  std::string pipeline_config, pipeline_out_dir = ".";
  auto* pipeline = app.add_subcommand(
      "pipeline", "End-to-end run: synth/load, filter, basis, train, predict, evaluate");
  pipeline->add_option("--config", pipeline_config, "Pipeline config file")->required();
  pipeline->add_option("--out-dir", pipeline_out_dir, "Artifact directory (default: .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      run_synth(global, synth_config, synth_out);
    } else if (psd_report->parsed()) {
      run_psd_report(global, psd_in, psd_dofs, psd_out, psd_svg, psd_threshold,
                     psd_threshold_opt->count() > 0);
    } else if (filter->parsed()) {
      run_filter(global, filter_in, filter_out, filter_threshold, filter_keep_dc);
    } else if (pod->parsed()) {
      run_pod(global, pod_in, pod_basis_out, pod_delta, pod_delta_opt->count() > 0, pod_modes,
              pod_modes_opt->count() > 0);
    } else if (train->parsed()) {
      run_train(global, train_in, train_basis, train_model_out, train_config, train_loss_out);
    } else if (predict->parsed()) {
      run_predict(global, predict_model, predict_basis, predict_seed, predict_steps, predict_out,
                  predict_window);
    } else if (evaluate->parsed()) {
      run_evaluate(global, eval_fom, eval_rom, eval_report, eval_svg, eval_split);
    } else if (pipeline->parsed()) {
      run_pipeline(global, pipeline_config, pipeline_out_dir);
    }
  } catch (const rom::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rom::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rom::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
