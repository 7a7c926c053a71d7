#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rom/pipeline.hpp"
#include "rom/synth.hpp"

namespace rom {

/// One "key = value" line of a config file; '#' starts a comment.
struct ConfigEntry {
  int line = 0;
  std::string key;
  std::string value;
};

std::vector<ConfigEntry> parse_config_text(const std::string& text);
std::vector<ConfigEntry> load_config_file(const std::filesystem::path& path);

/// Validated view over parsed entries. Construction rejects unknown keys and
/// duplicates of non-repeatable keys, naming the offending line.
class ConfigView {
 public:
  ConfigView(std::vector<ConfigEntry> entries, const std::set<std::string>& allowed_keys,
             const std::set<std::string>& repeatable_keys = {});

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  Eigen::Index get_index(const std::string& key) const;
  Eigen::Index get_index(const std::string& key, Eigen::Index fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// All values of a repeatable key, in file order.
  std::vector<ConfigEntry> all_of(const std::string& key) const;

 private:
  const ConfigEntry& require(const std::string& key) const;
  std::vector<ConfigEntry> entries_;
};

/// Recipe parsed from a synth config: the spec plus sampling and labeling.
/// Modes are given as "mode = amplitude,frequency,phase,profile" with profile
/// one of basis:<k>, sinusoid:<k>, random. Random profiles for mode m draw
/// from a SplitMix64 stream seeded with seed + m + 1; the jitter direction
/// uses the seed itself.
struct SynthFileConfig {
  SyntheticSpec spec;
  Eigen::Index n_time = 0;
  double dt = 0.0;
  double t0 = 0.0;
  FieldKind field = FieldKind::EulerianScalar;
  std::string name = "field";
};

SynthFileConfig parse_synth_config(const std::vector<ConfigEntry>& entries);

/// Training parameters parsed from a config file (keys sequence_length,
/// hidden_size, learning_rate, epochs, adam_beta1, adam_beta2, adam_epsilon,
/// train_seed, batch, append_time_feature).
TrainingConfig parse_training_config(const std::vector<ConfigEntry>& entries);

/// Full pipeline recipe: either an input path or synth keys, plus filtering,
/// truncation, split, training, and evaluation settings.
struct PipelineFileConfig {
  std::optional<std::filesystem::path> input_path;
  std::optional<SynthFileConfig> synth;
  PipelineConfig pipeline;
  Eigen::Index predict_steps = 0;  // 0 means "use n_validation"
  bool error_vs_unfiltered = false;
  std::optional<double> fom_seconds;
};

PipelineFileConfig parse_pipeline_config(const std::vector<ConfigEntry>& entries);

FieldKind parse_field_kind(const std::string& text);

}  // namespace rom
