#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sentseq/model.hpp"
#include "sentseq/trainer.hpp"

namespace sentseq {

struct DataSettings {
  TokenizeOptions tokenize;  // lowercase on, digit normalization off
  int min_count = 1;
};

// Everything a run needs; serialized flat into config files, logs, and
// checkpoints.
struct RunSettings {
  ModelConfig model;
  TrainSettings train;
  DataSettings data;
  std::uint64_t seed = 42;

  void validate() const {
    model.validate();
    train.validate();
    if (data.min_count < 1) throw ConfigError("data.min_count must be >= 1");
  }
};

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// One `key = value` assignment; unknown keys and unparsable values throw.
void apply_setting(RunSettings& s, const std::string& key, const std::string& value);

// Flat config file: `key = value` lines, `#` comments, blank lines ignored.
void apply_config_text(RunSettings& s, const std::string& text,
                       const std::string& origin = "<config>");
void apply_config_file(RunSettings& s, const std::string& path);

// Canonical serialization: fixed key order, stable value formatting.
std::vector<std::pair<std::string, std::string>> settings_kv(const RunSettings& s);
std::string serialize_settings(const RunSettings& s);

// Named hyperparameter presets (the four published configurations plus two
// small ones sized for synthetic-corpus runs).
RunSettings preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace sentseq
