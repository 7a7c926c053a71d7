#include "rom/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rom/errors.hpp"

namespace rom {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

double to_double(const ConfigEntry& entry) {
  const char* begin = entry.value.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw config_error("line " + std::to_string(entry.line) + ": value for '" + entry.key +
                       "' is not a number: '" + entry.value + "'");
  }
  return value;
}

Eigen::Index to_index(const ConfigEntry& entry) {
  const double value = to_double(entry);
  const auto index = static_cast<Eigen::Index>(value);
  if (static_cast<double>(index) != value) {
    throw config_error("line " + std::to_string(entry.line) + ": value for '" + entry.key +
                       "' is not an integer: '" + entry.value + "'");
  }
  return index;
}

bool to_bool(const ConfigEntry& entry) {
  std::string lowered = entry.value;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "true" || lowered == "1" || lowered == "yes" || lowered == "on") return true;
  if (lowered == "false" || lowered == "0" || lowered == "no" || lowered == "off") return false;
  throw config_error("line " + std::to_string(entry.line) + ": value for '" + entry.key +
                     "' is not a boolean: '" + entry.value + "'");
}

// Synthetic spec keys shared between the synth command and the pipeline file.
const std::set<std::string> kSynthKeys = {"n_dof",          "n_time", "dt",
                                          "t0",             "seed",   "jitter_amplitude",
                                          "jitter_frequency", "mode",   "field",
                                          "name"};

const std::set<std::string> kTrainingKeys = {
    "sequence_length", "hidden_size", "learning_rate",       "epochs", "adam_beta1",
    "adam_beta2",      "adam_epsilon", "train_seed",          "batch",  "append_time_feature"};

SyntheticSpec build_spec(const ConfigView& view, Eigen::Index n_dof) {
  SyntheticSpec spec;
  spec.n_dof = n_dof;
  spec.seed = view.get_u64("seed", 0);
  spec.jitter_amplitude = view.get_double("jitter_amplitude", 0.0);
  spec.jitter_frequency_hz = view.get_double("jitter_frequency", 0.0);

  Eigen::Index mode_index = 0;
  for (const ConfigEntry& entry : view.all_of("mode")) {
    std::vector<std::string> parts;
    std::stringstream ss(entry.value);
    std::string cell;
    while (std::getline(ss, cell, ',')) parts.push_back(trim(cell));
    if (parts.size() != 4) {
      throw config_error("line " + std::to_string(entry.line) +
                         ": mode needs \"amplitude,frequency,phase,profile\", got '" +
                         entry.value + "'");
    }

    SyntheticMode mode;
    auto parse_part = [&](const std::string& text, const char* what) {
      const char* begin = text.c_str();
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin || *end != '\0') {
        throw config_error("line " + std::to_string(entry.line) + ": mode " + what +
                           " is not a number: '" + text + "'");
      }
      return value;
    };
    mode.amplitude = parse_part(parts[0], "amplitude");
    mode.frequency_hz = parse_part(parts[1], "frequency");
    mode.phase_rad = parse_part(parts[2], "phase");

    const std::string& profile = parts[3];
    if (profile == "random") {
      mode.spatial_profile = random_unit_profile(n_dof, spec.seed + static_cast<std::uint64_t>(mode_index) + 1);
    } else if (profile.rfind("basis:", 0) == 0) {
      mode.spatial_profile = basis_profile(n_dof, static_cast<Eigen::Index>(std::atoll(profile.c_str() + 6)));
    } else if (profile.rfind("sinusoid:", 0) == 0) {
      mode.spatial_profile = sinusoid_profile(n_dof, static_cast<Eigen::Index>(std::atoll(profile.c_str() + 9)));
    } else {
      throw config_error("line " + std::to_string(entry.line) + ": unknown profile kind '" +
                         profile + "' (expected basis:<k>, sinusoid:<k>, or random)");
    }
    spec.modes.push_back(std::move(mode));
    ++mode_index;
  }
  return spec;
}

SynthFileConfig build_synth_config(const ConfigView& view) {
  SynthFileConfig config;
  config.n_time = view.get_index("n_time");
  config.dt = view.get_double("dt");
  config.t0 = view.get_double("t0", 0.0);
  config.field = parse_field_kind(view.get_string("field", "eulerian"));
  config.name = view.get_string("name", "field");
  config.spec = build_spec(view, view.get_index("n_dof"));
  return config;
}

TrainingConfig build_training_config(const ConfigView& view) {
  TrainingConfig config;
  config.sequence_length = view.get_index("sequence_length");
  config.hidden_size = view.get_index("hidden_size");
  config.learning_rate = view.get_double("learning_rate");
  config.epochs = view.get_index("epochs");
  config.adam_beta1 = view.get_double("adam_beta1", 0.9);
  config.adam_beta2 = view.get_double("adam_beta2", 0.999);
  config.adam_epsilon = view.get_double("adam_epsilon", 1e-8);
  config.seed = view.get_u64("train_seed", 0);
  config.append_time_feature = view.get_bool("append_time_feature", false);
  const std::string batch = view.get_string("batch", "full");
  if (batch != "full") {
    throw config_error("batch must be 'full' (got '" + batch + "')");
  }
  config.batch = BatchMode::Full;
  return config;
}

}  // namespace

std::vector<ConfigEntry> parse_config_text(const std::string& text) {
  std::vector<ConfigEntry> entries;
  std::stringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto equals = content.find('=');
    if (equals == std::string::npos) {
      throw config_error("line " + std::to_string(line_number) + ": expected \"key = value\", got '" +
                         content + "'");
    }
    ConfigEntry entry;
    entry.line = line_number;
    entry.key = trim(content.substr(0, equals));
    entry.value = trim(content.substr(equals + 1));
    if (entry.key.empty()) {
      throw config_error("line " + std::to_string(line_number) + ": empty key");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<ConfigEntry> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path.string() + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ConfigView::ConfigView(std::vector<ConfigEntry> entries, const std::set<std::string>& allowed_keys,
                       const std::set<std::string>& repeatable_keys)
    : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const ConfigEntry& entry : entries_) {
    if (!allowed_keys.contains(entry.key)) {
      throw config_error("line " + std::to_string(entry.line) + ": unknown key '" + entry.key + "'");
    }
    if (!repeatable_keys.contains(entry.key) && !seen.insert(entry.key).second) {
      throw config_error("line " + std::to_string(entry.line) + ": duplicate key '" + entry.key + "'");
    }
  }
}

bool ConfigView::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const ConfigEntry& e) { return e.key == key; });
}

const ConfigEntry& ConfigView::require(const std::string& key) const {
  for (const ConfigEntry& entry : entries_) {
    if (entry.key == key) return entry;
  }
  throw config_error("missing required key '" + key + "'");
}

std::string ConfigView::get_string(const std::string& key) const { return require(key).value; }

std::string ConfigView::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? require(key).value : fallback;
}

double ConfigView::get_double(const std::string& key) const { return to_double(require(key)); }

double ConfigView::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(require(key)) : fallback;
}

Eigen::Index ConfigView::get_index(const std::string& key) const { return to_index(require(key)); }

Eigen::Index ConfigView::get_index(const std::string& key, Eigen::Index fallback) const {
  return has(key) ? to_index(require(key)) : fallback;
}

std::uint64_t ConfigView::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const ConfigEntry& entry = require(key);
  const char* begin = entry.value.c_str();
  char* end = nullptr;
  const unsigned long long value = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw config_error("line " + std::to_string(entry.line) + ": value for '" + entry.key +
                       "' is not an unsigned integer: '" + entry.value + "'");
  }
  return value;
}

bool ConfigView::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? to_bool(require(key)) : fallback;
}

std::vector<ConfigEntry> ConfigView::all_of(const std::string& key) const {
  std::vector<ConfigEntry> matches;
  for (const ConfigEntry& entry : entries_) {
    if (entry.key == key) matches.push_back(entry);
  }
  return matches;
}

FieldKind parse_field_kind(const std::string& text) {
  if (text == "eulerian") return FieldKind::EulerianScalar;
  if (text == "lagrangian-x") return FieldKind::LagrangianX;
  if (text == "lagrangian-y") return FieldKind::LagrangianY;
  if (text == "lagrangian-z") return FieldKind::LagrangianZ;
  throw config_error("unknown field kind '" + text +
                     "' (expected eulerian, lagrangian-x, lagrangian-y, lagrangian-z)");
}

SynthFileConfig parse_synth_config(const std::vector<ConfigEntry>& entries) {
  const ConfigView view(entries, kSynthKeys, {"mode"});
  return build_synth_config(view);
}

TrainingConfig parse_training_config(const std::vector<ConfigEntry>& entries) {
  const ConfigView view(entries, kTrainingKeys);
  return build_training_config(view);
}

PipelineFileConfig parse_pipeline_config(const std::vector<ConfigEntry>& entries) {
  std::set<std::string> allowed = kSynthKeys;
  allowed.insert(kTrainingKeys.begin(), kTrainingKeys.end());
  for (const char* key : {"input", "psd_threshold", "keep_dc", "delta", "n_modes", "n_train",
                          "n_validation", "predict_steps", "error_reference", "fom_seconds",
                          "center_mean"}) {
    allowed.insert(key);
  }
  const ConfigView view(entries, allowed, {"mode"});

  PipelineFileConfig config;
  if (view.has("input")) {
    config.input_path = view.get_string("input");
  } else {
    config.synth = build_synth_config(view);
  }

  config.pipeline.filter.psd_threshold = view.get_double("psd_threshold");
  config.pipeline.filter.keep_dc = view.get_bool("keep_dc", true);
  if (view.has("delta")) config.pipeline.delta = view.get_double("delta");
  if (view.has("n_modes")) config.pipeline.n_modes = view.get_index("n_modes");
  if (config.pipeline.delta.has_value() == config.pipeline.n_modes.has_value()) {
    throw config_error("exactly one of 'delta' and 'n_modes' must be set");
  }
  config.pipeline.split.n_train = view.get_index("n_train");
  config.pipeline.split.n_validation = view.get_index("n_validation");
  config.pipeline.center_mean = view.get_bool("center_mean", false);
  config.pipeline.training = build_training_config(view);
  config.predict_steps = view.get_index("predict_steps", 0);

  const std::string reference = view.get_string("error_reference", "filtered");
  if (reference == "unfiltered") {
    config.error_vs_unfiltered = true;
  } else if (reference != "filtered") {
    throw config_error("error_reference must be 'filtered' or 'unfiltered' (got '" + reference +
                       "')");
  }
  if (view.has("fom_seconds")) config.fom_seconds = view.get_double("fom_seconds");
  return config;
}

}  // namespace rom
