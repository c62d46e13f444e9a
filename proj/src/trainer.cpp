#include "sentseq/train_loop.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sentseq {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::vector<std::vector<int>> predict_paths(const Model& model,
                                            const std::vector<EncodedAbstract>& abstracts) {
  std::vector<std::vector<int>> out;
  out.reserve(abstracts.size());
  Graph g;
  Graph::NoGradGuard guard(g);
  for (const auto& a : abstracts) {
    auto emissions = model.forward(g, a.token_ids, ForwardMode{});
    out.push_back(model.decode(emissions));
  }
  return out;
}

EvalReport evaluate_model(const Model& model, const Corpus& corpus,
                          const Vocabulary& vocab) {
  if (!corpus.fully_labeled())
    throw DataError("evaluation corpus has unlabeled sentences");
  auto encoded = encode_corpus(corpus, vocab);
  auto pred = predict_paths(model, encoded);
  std::vector<std::vector<int>> gold;
  gold.reserve(encoded.size());
  for (const auto& a : encoded) gold.push_back(a.labels);
  return evaluate_paths(pred, gold, corpus.label_set);
}

TrainOutcome train_model(const RunSettings& settings0, const Corpus& train_corpus,
                         const Corpus& val_corpus, const EmbeddingTable* pretrained,
                         std::ostream* log) {
  if (train_corpus.label_set.names() != val_corpus.label_set.names())
    throw DataError("label-set mismatch between train and validation corpora");
  if (!train_corpus.fully_labeled() || !val_corpus.fully_labeled())
    throw DataError("training corpora must be fully labeled");

  RunSettings settings = settings0;
  settings.model.num_labels = train_corpus.label_set.size();
  if (pretrained) {
    if (settings.model.emb_dim > 0 && settings.model.emb_dim != pretrained->dim)
      throw ConfigError("emb.dim " + std::to_string(settings.model.emb_dim) +
                        " does not match embedding table dim " +
                        std::to_string(pretrained->dim));
    settings.model.emb_dim = pretrained->dim;
  } else if (settings.model.emb_dim < 1) {
    throw ConfigError("emb.dim must be set when no embedding file is given");
  }
  settings.validate();

  const Vocabulary vocab = build_vocab(train_corpus, settings.data.min_count);
  Model model = Model::init(settings.model, vocab.size(), settings.seed);
  if (pretrained) {
    if (pretrained->vocab_size() != vocab.size())
      throw ContractError("embedding table was built for a different vocabulary");
    model.embedding.value() = pretrained->matrix.value();
  }

  const auto train_enc = encode_corpus(train_corpus, vocab);
  auto trainable = model.trainable_params();
  auto adam = AdamStateT<float>::init(trainable);

  TrainOutcome outcome;
  outcome.best_epoch = -1;
  outcome.best_val_f1 = -1;
  int epochs_since_best = 0;

  auto snapshot = [&](int epoch, double val_f1) {
    outcome.best = checkpoint_from_model(model, settings, train_corpus.label_set, vocab,
                                         epoch, val_f1);
    outcome.best_epoch = epoch;
    outcome.best_val_f1 = val_f1;
  };

  if (settings.train.epochs == 0) {
    const double val_f1 = evaluate_model(model, val_corpus, vocab).weighted_f1;
    snapshot(0, val_f1);
    if (log)
      (*log) << "epoch\tindex=0\tlr=" << fmt("%.8g", epoch_lr(0, settings.train))
             << "\ttrain_loss=nan\tval_wf1=" << fmt("%.4f", val_f1) << "\n";
    if (log) (*log) << "best\tepoch=0\tval_wf1=" << fmt("%.4f", val_f1) << "\n";
    return outcome;
  }

  Graph g;
  for (int epoch = 0; epoch < settings.train.epochs; ++epoch) {
    const double lr = epoch_lr(epoch, settings.train);
    const auto batches =
        make_batches(train_corpus, settings.train.batch_size,
                     splitmix64(settings.seed ^ (0x9e3779b97f4a7c15ULL +
                                                 static_cast<std::uint64_t>(epoch))));
    Rng dropout_rng(splitmix64(settings.seed ^ 0xd120u) + static_cast<std::uint64_t>(epoch));

    double loss_sum = 0;
    long abstracts_seen = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      std::vector<const EncodedAbstract*> batch;
      batch.reserve(batches[b].size());
      for (int idx : batches[b]) batch.push_back(&train_enc[static_cast<std::size_t>(idx)]);

      g.clear();
      model.zero_grads();
      auto obj = batch_objective(g, model, batch, &dropout_rng);
      auto loss = total_loss(g, model, obj);
      const double loss_value = loss.item();
      if (!std::isfinite(loss_value))
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(b));
      g.backward(loss);
      if (settings.train.grad_clip > 0)
        clip_gradients(trainable, settings.train.grad_clip);
      adam_step(trainable, adam, lr);

      loss_sum += loss_value * static_cast<double>(batch.size());
      abstracts_seen += static_cast<long>(batch.size());
    }
    g.clear();

    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.train_loss = loss_sum / static_cast<double>(abstracts_seen);
    stats.val_weighted_f1 = evaluate_model(model, val_corpus, vocab).weighted_f1;
    outcome.epochs.push_back(stats);
    if (log)
      (*log) << "epoch\tindex=" << epoch << "\tlr=" << fmt("%.8g", lr)
             << "\ttrain_loss=" << fmt("%.6f", stats.train_loss)
             << "\tval_wf1=" << fmt("%.4f", stats.val_weighted_f1) << "\n";

    if (stats.val_weighted_f1 > outcome.best_val_f1) {
      snapshot(epoch, stats.val_weighted_f1);
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= settings.train.patience) {
        if (log) (*log) << "early_stop\tepoch=" << epoch << "\n";
        break;
      }
    }
  }

  if (log)
    (*log) << "best\tepoch=" << outcome.best_epoch
           << "\tval_wf1=" << fmt("%.4f", outcome.best_val_f1) << "\n";
  return outcome;
}

}  // namespace sentseq
