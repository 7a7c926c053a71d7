#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "rom/pod.hpp"
#include "rom/snapshot.hpp"
#include "rom/synth.hpp"
#include "test_support.hpp"

#ifndef ROM_CLI_PATH
#error "ROM_CLI_PATH must point at the rom executable"
#endif

namespace {

int run(const std::string& arguments) {
  const std::string command = std::string(ROM_CLI_PATH) + " " + arguments;
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSynthConfig =
    "# three-tone fixture\n"
    "n_dof = 8\n"
    "n_time = 64\n"
    "dt = 0.01\n"
    "seed = 5\n"
    "mode = 1.0, 3.125, 0.0, basis:0\n"
    "mode = 0.5, 6.25, 0.3, basis:2\n"
    "jitter_amplitude = 0.01\n"
    "jitter_frequency = 25.0\n";

rom::SnapshotMatrix write_two_tone(const std::filesystem::path& path) {
  rom::SyntheticSpec spec;
  spec.n_dof = 4;
  spec.seed = 9;
  for (int m = 0; m < 2; ++m) {
    rom::SyntheticMode mode;
    mode.spatial_profile = rom::basis_profile(4, m);
    // Weak-tone PSD is 0.01^2 * 64 / 4 = 1.6e-3, below the 0.005 threshold.
    mode.amplitude = m == 0 ? 1.0 : 0.01;
    mode.frequency_hz = m == 0 ? 3.125 : 25.0;
    spec.modes.push_back(mode);
  }
  rom::SnapshotMatrix snap = rom::generate_eulerian(spec, 64, 0.01, 0.0);
  rom::save_snapshots(snap, path, rom::SnapshotFormat::Binary);
  return snap;
}

}  // namespace

TEST_CASE("synth writes loadable snapshots and is seed-stable") {
  testing::TempDir dir;
  const auto config = dir.file("synth.cfg");
  testing::write_file(config, kSynthConfig);

  const auto out = dir.file("field.bin");
  CHECK(run("--quiet synth --config " + config.string() + " --out " + out.string()) == 0);

  const rom::SnapshotMatrix snap = rom::load_snapshots(out, rom::SnapshotFormat::Binary);
  CHECK(snap.n_dof() == 8);
  CHECK(snap.n_time() == 64);

  const auto again = dir.file("field2.bin");
  CHECK(run("--quiet synth --config " + config.string() + " --out " + again.string()) == 0);
  CHECK(testing::read_file(out) == testing::read_file(again));
}

TEST_CASE("synth rejects unknown config keys with the line number") {
  testing::TempDir dir;
  const auto config = dir.file("bad.cfg");
  testing::write_file(config, "n_dof = 4\nn_time = 16\ndt = 0.01\nwat = 1\n");
  const auto err = dir.file("stderr.txt");
  CHECK(run("synth --config " + config.string() + " --out " + dir.file("x.bin").string() +
            " 2> " + err.string()) == 2);
  const std::string message = testing::read_file(err);
  CHECK(message.find("wat") != std::string::npos);
  CHECK(message.find("line 4") != std::string::npos);
}

TEST_CASE("psd-report emits per-bin rows and respects bounds") {
  testing::TempDir dir;
  const auto input = dir.file("two_tone.bin");
  write_two_tone(input);

  SUBCASE("constant field concentrates power in bin zero") {
    rom::SnapshotMatrix constant;
    constant.values = Eigen::MatrixXd::Constant(2, 16, 1.5);
    constant.dt = 0.01;
    const auto const_path = dir.file("const.bin");
    rom::save_snapshots(constant, const_path, rom::SnapshotFormat::Binary);

    const auto csv = dir.file("psd.csv");
    CHECK(run("--quiet psd-report --in " + const_path.string() + " --dof 0 --out " +
              csv.string()) == 0);

    std::stringstream rows(testing::read_file(csv));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "dof_index,bin,frequency_hz,psd");
    int bin = 0;
    while (std::getline(rows, line)) {
      const auto last_comma = line.rfind(',');
      const double value = std::stod(line.substr(last_comma + 1));
      if (bin == 0) {
        CHECK(value == doctest::Approx(16.0 * 1.5 * 1.5));
      } else {
        CHECK(value < 1e-20);
      }
      ++bin;
    }
    CHECK(bin == 16);
  }

  SUBCASE("two-tone fixture shows exactly two off-DC pairs") {
    const auto csv = dir.file("psd.csv");
    const auto svg = dir.file("psd.svg");
    CHECK(run("--quiet psd-report --in " + input.string() + " --dof 0,1 --out " + csv.string() +
              " --svg " + svg.string() + " --threshold 0.005") == 0);

    // DOF 0 carries the strong tone, DOF 1 the weak one; count nonzero bins.
    std::stringstream rows(testing::read_file(csv));
    std::string line;
    std::getline(rows, line);
    int significant = 0;
    while (std::getline(rows, line)) {
      const auto last_comma = line.rfind(',');
      if (std::stod(line.substr(last_comma + 1)) > 1e-12) ++significant;
    }
    CHECK(significant == 4);  // two conjugate pairs across the two rows

    const std::string chart = testing::read_file(svg);
    CHECK(chart.find("<polyline") != std::string::npos);
    CHECK(chart.find("class=\"threshold\"") != std::string::npos);
  }

  SUBCASE("out-of-range index exits 2") {
    CHECK(run("--quiet psd-report --in " + input.string() + " --dof 4 --out " +
              dir.file("oops.csv").string()) == 2);
  }
}

TEST_CASE("filter honors the threshold and the exit contract") {
  testing::TempDir dir;
  const auto input = dir.file("two_tone.bin");
  const rom::SnapshotMatrix original = write_two_tone(input);

  SUBCASE("threshold zero is the identity") {
    const auto out = dir.file("same.bin");
    CHECK(run("--quiet filter --in " + input.string() + " --out " + out.string() +
              " --threshold 0") == 0);
    const rom::SnapshotMatrix filtered = rom::load_snapshots(out, rom::SnapshotFormat::Binary);
    CHECK((filtered.values - original.values).norm() <= 1e-10 * original.values.norm());
  }
  SUBCASE("mid threshold removes the weak tone") {
    const auto out = dir.file("clean.bin");
    CHECK(run("--quiet filter --in " + input.string() + " --out " + out.string() +
              " --threshold 0.005") == 0);
    const rom::SnapshotMatrix filtered = rom::load_snapshots(out, rom::SnapshotFormat::Binary);
    CHECK(filtered.values.row(1).norm() < 1e-12);        // weak tone row zeroed
    CHECK(filtered.values.row(0).norm() > 1.0);          // strong tone untouched
  }
  SUBCASE("missing input exits 3") {
    CHECK(run("--quiet filter --in " + dir.file("absent.bin").string() + " --out " +
              dir.file("y.bin").string() + " --threshold 0") == 3);
  }
}

TEST_CASE("pod selects modes by energy or explicit count") {
  testing::TempDir dir;
  const auto input = dir.file("two_tone.bin");
  write_two_tone(input);
  const auto basis_path = dir.file("basis.bin");

  SUBCASE("delta on a rank-2 fixture") {
    // Singular values sit at ratio [1, 0.01]: E(1) = 0.9901, so delta = 0.995
    // needs both modes.
    const auto stdout_path = dir.file("stdout.txt");
    CHECK(run("pod --in " + input.string() + " --basis-out " + basis_path.string() +
              " --delta 0.995 > " + stdout_path.string()) == 0);
    const std::string text = testing::read_file(stdout_path);
    CHECK(text.find("modes: 2") != std::string::npos);
    CHECK(rom::load_basis(basis_path).n_modes() == 2);
  }
  SUBCASE("explicit mode count") {
    CHECK(run("--quiet pod --in " + input.string() + " --basis-out " + basis_path.string() +
              " --modes 3") == 0);
    CHECK(rom::load_basis(basis_path).n_modes() == 3);
  }
  SUBCASE("both flags exit 2") {
    CHECK(run("--quiet pod --in " + input.string() + " --basis-out " + basis_path.string() +
              " --delta 0.9 --modes 3") == 2);
  }
  SUBCASE("neither flag exits 2") {
    CHECK(run("--quiet pod --in " + input.string() + " --basis-out " + basis_path.string()) == 2);
  }
}

TEST_CASE("train fits the constant fixture and is reproducible") {
  testing::TempDir dir;

  rom::SnapshotMatrix constant;
  constant.values = Eigen::MatrixXd::Constant(3, 24, 2.0);
  constant.dt = 0.01;
  const auto input = dir.file("const.bin");
  rom::save_snapshots(constant, input, rom::SnapshotFormat::Binary);

  const auto basis_path = dir.file("basis.bin");
  REQUIRE(run("--quiet pod --in " + input.string() + " --basis-out " + basis_path.string() +
              " --modes 1") == 0);

  const auto train_cfg = dir.file("train.cfg");
  testing::write_file(train_cfg,
                      "sequence_length = 4\nhidden_size = 4\nlearning_rate = 1e-3\n"
                      "epochs = 50\ntrain_seed = 9\n");

  const auto model_path = dir.file("model.bin");
  const auto loss_path = dir.file("loss.csv");
  CHECK(run("--quiet train --in " + input.string() + " --basis " + basis_path.string() +
            " --model-out " + model_path.string() + " --config " + train_cfg.string() +
            " --loss-out " + loss_path.string()) == 0);

  // Constant coefficients scale to zero, so the loss starts and stays tiny.
  std::stringstream rows(testing::read_file(loss_path));
  std::string line;
  std::getline(rows, line);
  CHECK(line == "epoch,mse");
  double last = 1.0;
  int epochs = 0;
  while (std::getline(rows, line)) {
    last = std::stod(line.substr(line.find(',') + 1));
    ++epochs;
  }
  CHECK(epochs == 50);
  CHECK(last < 1e-8);

  SUBCASE("same seed gives identical model bytes") {
    const auto second = dir.file("model2.bin");
    CHECK(run("--quiet train --in " + input.string() + " --basis " + basis_path.string() +
              " --model-out " + second.string() + " --config " + train_cfg.string()) == 0);
    CHECK(testing::read_file(model_path) == testing::read_file(second));
  }
  SUBCASE("zero epochs exit 2") {
    const auto bad_cfg = dir.file("bad.cfg");
    testing::write_file(bad_cfg,
                        "sequence_length = 4\nhidden_size = 4\nlearning_rate = 1e-3\n"
                        "epochs = 0\n");
    CHECK(run("--quiet train --in " + input.string() + " --basis " + basis_path.string() +
              " --model-out " + dir.file("m.bin").string() + " --config " + bad_cfg.string()) ==
          2);
  }
}

TEST_CASE("predict rolls out and respects the steps contract") {
  testing::TempDir dir;

  rom::SnapshotMatrix constant;
  constant.values = Eigen::MatrixXd::Constant(3, 24, 2.0);
  constant.dt = 0.01;
  const auto input = dir.file("const.bin");
  rom::save_snapshots(constant, input, rom::SnapshotFormat::Binary);

  const auto basis_path = dir.file("basis.bin");
  REQUIRE(run("--quiet pod --in " + input.string() + " --basis-out " + basis_path.string() +
              " --modes 1") == 0);
  const auto train_cfg = dir.file("train.cfg");
  testing::write_file(train_cfg,
                      "sequence_length = 4\nhidden_size = 4\nlearning_rate = 1e-3\nepochs = 20\n");
  const auto model_path = dir.file("model.bin");
  REQUIRE(run("--quiet train --in " + input.string() + " --basis " + basis_path.string() +
              " --model-out " + model_path.string() + " --config " + train_cfg.string()) == 0);

  SUBCASE("one step produces one column continuing the grid") {
    const auto out = dir.file("pred.bin");
    CHECK(run("--quiet predict --model " + model_path.string() + " --basis " +
              basis_path.string() + " --seed-snapshots " + input.string() +
              " --steps 1 --window 4 --out " + out.string()) == 0);
    const rom::SnapshotMatrix prediction = rom::load_snapshots(out, rom::SnapshotFormat::Binary);
    CHECK(prediction.n_time() == 1);
    CHECK(prediction.time_at(0) == doctest::Approx(0.25));  // column 24 of the source grid
    CHECK((prediction.values.array() - 2.0).abs().maxCoeff() < 1e-6);
  }
  SUBCASE("zero steps exit 2") {
    CHECK(run("--quiet predict --model " + model_path.string() + " --basis " +
              basis_path.string() + " --seed-snapshots " + input.string() + " --steps 0 --out " +
              dir.file("p.bin").string()) == 2);
  }
}

TEST_CASE("evaluate reports errors and validates shapes") {
  testing::TempDir dir;
  const auto fom_path = dir.file("fom.bin");
  const rom::SnapshotMatrix fom = write_two_tone(fom_path);

  SUBCASE("identical inputs give an all-zero report") {
    const auto report = dir.file("report.csv");
    CHECK(run("--quiet evaluate --fom " + fom_path.string() + " --rom " + fom_path.string() +
              " --report " + report.string()) == 0);
    std::stringstream rows(testing::read_file(report));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "t,relative_error_percent,window");
    int count = 0;
    while (std::getline(rows, line)) {
      const auto first = line.find(',');
      const auto second = line.find(',', first + 1);
      CHECK(std::stod(line.substr(first + 1, second - first - 1)) == 0.0);
      ++count;
    }
    CHECK(count == 64);
  }
  SUBCASE("split index draws the divider in the SVG") {
    const auto report = dir.file("report.csv");
    const auto svg = dir.file("report.svg");
    CHECK(run("--quiet evaluate --fom " + fom_path.string() + " --rom " + fom_path.string() +
              " --report " + report.string() + " --svg " + svg.string() + " --split-index 50") ==
          0);
    CHECK(testing::read_file(svg).find("class=\"divider\"") != std::string::npos);
    CHECK(testing::read_file(report).find(",validation") != std::string::npos);
  }
  SUBCASE("shape mismatch exits 2") {
    rom::SnapshotMatrix shorter = fom;
    shorter.values = fom.values.leftCols(32).eval();
    const auto rom_path = dir.file("short.bin");
    rom::save_snapshots(shorter, rom_path, rom::SnapshotFormat::Binary);
    CHECK(run("--quiet evaluate --fom " + fom_path.string() + " --rom " + rom_path.string() +
              " --report " + dir.file("r.csv").string()) == 2);
  }
}

TEST_CASE("pipeline runs end to end deterministically") {
  testing::TempDir dir;
  const auto config = dir.file("pipeline.cfg");
  testing::write_file(config,
                      "n_dof = 12\n"
                      "n_time = 100\n"
                      "dt = 0.01\n"
                      "seed = 4\n"
                      "mode = 1.0, 2.5, 0.0, basis:0\n"
                      "mode = 0.5, 5.0, 0.4, basis:5\n"
                      "jitter_amplitude = 0.02\n"
                      "jitter_frequency = 20.0\n"
                      "psd_threshold = 0.005\n"
                      "delta = 0.99\n"
                      "n_train = 80\n"
                      "n_validation = 20\n"
                      "predict_steps = 10\n"
                      "sequence_length = 8\n"
                      "hidden_size = 8\n"
                      "learning_rate = 5e-3\n"
                      "epochs = 150\n"
                      "train_seed = 2\n"
                      "fom_seconds = 1000\n");

  const auto first = dir.file("run1");
  const auto second = dir.file("run2");
  CHECK(run("--quiet pipeline --config " + config.string() + " --out-dir " + first.string()) == 0);
  CHECK(run("--quiet pipeline --config " + config.string() + " --out-dir " + second.string()) == 0);

  for (const char* artifact : {"snapshots.bin", "filtered_train.bin", "basis.bin", "model.bin",
                               "loss.csv", "prediction.bin", "report.csv", "report.svg"}) {
    CAPTURE(artifact);
    CHECK(std::filesystem::exists(first / artifact));
    CHECK(testing::read_file(first / artifact) == testing::read_file(second / artifact));
  }

  const rom::SnapshotMatrix prediction =
      rom::load_snapshots(first / "prediction.bin", rom::SnapshotFormat::Binary);
  CHECK(prediction.n_time() == 10);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("definitely-not-a-command 2> /dev/null") == 2);
  CHECK(run("filter --in x 2> /dev/null") == 2);  // missing required options
}
