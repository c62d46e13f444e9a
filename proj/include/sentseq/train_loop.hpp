#pragma once

#include <iosfwd>

#include "sentseq/checkpoint.hpp"
#include "sentseq/metrics.hpp"

namespace sentseq {

struct EpochStats {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double val_weighted_f1 = 0;
};

struct TrainOutcome {
  Checkpoint best;
  int best_epoch = 0;
  double best_val_f1 = 0;
  std::vector<EpochStats> epochs;
};

// Full training run: per epoch, shuffle whole-abstract batches, take Adam
// steps on (sequence loss + beta * expectation-linear penalty) at the
// decayed learning rate, evaluate weighted F1 on the validation split, and
// keep the checkpoint of the best validation epoch. epochs=0 returns the
// initialized model evaluated once. `log` (optional) receives one parseable
// record per line.
TrainOutcome train_model(const RunSettings& settings, const Corpus& train_corpus,
                         const Corpus& val_corpus, const EmbeddingTable* pretrained,
                         std::ostream* log);

// Viterbi predictions for every abstract, inference-mode forward.
std::vector<std::vector<int>> predict_paths(const Model& model,
                                            const std::vector<EncodedAbstract>& abstracts);

EvalReport evaluate_model(const Model& model, const Corpus& corpus,
                          const Vocabulary& vocab);

}  // namespace sentseq
