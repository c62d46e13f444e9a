#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sentseq/config.hpp"
#include "sentseq/vocab.hpp"

namespace sentseq {

// Self-describing model snapshot: text header (config, labels, vocabulary,
// shapes) followed by little-endian float32 parameter blocks in declaration
// order. save -> load -> save is byte-identical.
struct Checkpoint {
  RunSettings settings;
  LabelSet labels;
  std::vector<std::string> vocab_tokens;
  int epoch = 0;
  double val_weighted_f1 = 0;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

Checkpoint checkpoint_from_model(const Model& model, const RunSettings& settings,
                                 const LabelSet& labels, const Vocabulary& vocab,
                                 int epoch, double val_weighted_f1);

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& bytes, const std::string& origin);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Rebuilds the model with the stored config and overwrites every named
// tensor; name or shape mismatches are corruption.
Model model_from_checkpoint(const Checkpoint& ckpt);
Vocabulary vocab_from_checkpoint(const Checkpoint& ckpt);

}  // namespace sentseq
