#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sentseq/checkpoint.hpp"
#include "sentseq/modelcheck.hpp"
#include "sentseq/synthetic.hpp"
#include "sentseq/train_loop.hpp"

namespace {

using namespace sentseq;

// Mirrors every record to the log file and stdout; one record per line.
class RunLog {
 public:
  explicit RunLog(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::app);
      if (!file_) throw DataError("cannot open log file: " + path);
    }
  }
  void line(const std::string& record) {
    std::cout << record << "\n";
    if (file_.is_open()) file_ << record << "\n";
  }
  std::ostream* stream() { return &tee_; }

 private:
  struct Tee : std::streambuf {
    RunLog* owner = nullptr;
    std::string pending;
    int overflow(int c) override {
      if (c == '\n') {
        owner->line(pending);
        pending.clear();
      } else {
        pending.push_back(static_cast<char>(c));
      }
      return c;
    }
  };

  std::ofstream file_;
  struct TeeStream : std::ostream {
    Tee buf;
    explicit TeeStream(RunLog* owner) : std::ostream(&buf) { buf.owner = owner; }
  } tee_{this};
};

struct CommonOpts {
  std::string preset_name;
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::vector<std::string> ablations;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> lr0;
  std::optional<int> emb_dim;
  std::optional<int> min_count;
  bool digits_to_zero = false;
  bool no_lowercase = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--preset", opts.preset_name,
                  "named hyperparameter preset (pubmed-rnn, pubmed-cnn, nicta-rnn, "
                  "nicta-cnn, tiny-rnn, tiny-cnn)");
  cmd->add_option("--config", opts.config_path, "flat key=value config file");
  cmd->add_option("--set", opts.overrides, "explicit key=value override (repeatable)");
  cmd->add_option("--ablate", opts.ablations,
                  "drop a component: context, seq-opt, attention, dropout-reg")
      ->check(CLI::IsMember({"context", "seq-opt", "attention", "dropout-reg"}));
  cmd->add_option("--seed", opts.seed, "run seed");
  cmd->add_option("--epochs", opts.epochs, "training epochs");
  cmd->add_option("--batch-size", opts.batch_size, "abstracts per optimizer step");
  cmd->add_option("--lr0", opts.lr0, "initial learning rate");
  cmd->add_option("--emb-dim", opts.emb_dim, "word vector size (0 adopts the file's)");
  cmd->add_option("--min-count", opts.min_count, "vocabulary frequency cutoff");
  cmd->add_flag("--digits-to-zero", opts.digits_to_zero,
                "map digit characters to 0 while tokenizing");
  cmd->add_flag("--no-lowercase", opts.no_lowercase, "keep the original casing");
}

RunSettings resolve_settings(const CommonOpts& opts) {
  RunSettings s = opts.preset_name.empty() ? RunSettings{} : preset(opts.preset_name);
  if (!opts.config_path.empty()) apply_config_file(s, opts.config_path);
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    apply_setting(s, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  if (opts.seed) s.seed = *opts.seed;
  if (opts.epochs) s.train.epochs = *opts.epochs;
  if (opts.batch_size) s.train.batch_size = *opts.batch_size;
  if (opts.lr0) s.train.lr0 = *opts.lr0;
  if (opts.emb_dim) s.model.emb_dim = *opts.emb_dim;
  if (opts.min_count) s.data.min_count = *opts.min_count;
  if (opts.digits_to_zero) s.data.tokenize.digits_to_zero = true;
  if (opts.no_lowercase) s.data.tokenize.lowercase = false;
  for (const auto& name : opts.ablations) {
    if (name == "context") s.model.context.use_context = false;
    else if (name == "seq-opt") s.model.use_crf = false;
    else if (name == "attention") s.model.encoder.use_attention = false;
    else if (name == "dropout-reg") s.model.use_el_reg = false;
  }
  return s;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

int cmd_train(const CommonOpts& opts, const std::string& train_path,
              const std::string& val_path, const std::string& emb_path,
              const std::string& out_path, std::string log_path) {
  RunSettings settings = resolve_settings(opts);
  if (log_path.empty()) log_path = out_path + ".log";
  RunLog log(log_path);

  ParseOptions popts;
  popts.tokenize = settings.data.tokenize;
  popts.split = Split::Train;
  Corpus train_corpus = parse_rct(train_path, popts);
  popts.known_labels = &train_corpus.label_set;
  popts.split = Split::Validation;
  Corpus val_corpus = parse_rct(val_path, popts);
  if (const auto reduced = train_corpus.multi_label_reduced + val_corpus.multi_label_reduced)
    std::cerr << "warning: reduced " << reduced
              << " multi-label sentences to their first label\n";

  log.line("run\tcommand=train\tpreset=" +
           (opts.preset_name.empty() ? std::string("-") : opts.preset_name) +
           "\tablations=" + (opts.ablations.empty() ? "-" : join(opts.ablations, ",")));
  {
    std::string cfg_line = "config";
    RunSettings logged = settings;
    logged.model.num_labels = train_corpus.label_set.size();
    for (const auto& [k, v] : settings_kv(logged)) cfg_line += "\t" + k + "=" + v;
    log.line(cfg_line);
  }
  log.line("labels\t" + join(train_corpus.label_set.names(), "\t"));

  EmbeddingTable table;
  const EmbeddingTable* table_ptr = nullptr;
  if (!emb_path.empty()) {
    const Vocabulary vocab = build_vocab(train_corpus, settings.data.min_count);
    CoverageReport coverage;
    table = load_pretrained(emb_path, vocab, settings.seed, settings.model.emb_dim,
                            &coverage);
    table_ptr = &table;
    log.line("vocab\tsize=" + std::to_string(vocab.size()) +
             "\tcoverage=" + coverage.to_string());
  } else {
    std::cerr << "warning: no embedding file given; using seeded random "
                 "initialization (dim "
              << settings.model.emb_dim << ")\n";
  }

  auto outcome = train_model(settings, train_corpus, val_corpus, table_ptr, log.stream());
  save_checkpoint(outcome.best, out_path);
  log.line("checkpoint\tpath=" + out_path);
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& test_path,
                 const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(model_path);
  Model model = model_from_checkpoint(ckpt);
  Vocabulary vocab = vocab_from_checkpoint(ckpt);

  ParseOptions popts;
  popts.tokenize = ckpt.settings.data.tokenize;
  popts.known_labels = &ckpt.labels;
  popts.split = Split::Test;
  Corpus test_corpus = parse_rct(test_path, popts);

  EvalReport report = evaluate_model(model, test_corpus, vocab);
  std::cout << format_report(report);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write metrics file: " + out_path);
    out << machine_report(report);
  }
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& in_path,
                const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(model_path);
  Model model = model_from_checkpoint(ckpt);
  Vocabulary vocab = vocab_from_checkpoint(ckpt);

  ParseOptions popts;
  popts.tokenize = ckpt.settings.data.tokenize;
  popts.known_labels = &ckpt.labels;
  popts.allow_unlabeled = true;
  popts.split = Split::Test;
  Corpus corpus = parse_rct(in_path, popts);

  auto encoded = encode_corpus(corpus, vocab);
  auto paths = predict_paths(model, encoded);
  for (std::size_t a = 0; a < corpus.abstracts.size(); ++a)
    corpus.abstracts[a].labels = paths[a];

  const std::string text = serialize_corpus(corpus);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write predictions: " + out_path);
    out << text;
  }
  return 0;
}

int cmd_export_transitions(const std::string& model_path, const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(model_path);
  if (!ckpt.settings.model.use_crf)
    throw ConfigError("checkpoint was trained without the label-sequence layer; "
                      "no transition matrix to export");
  Model model = model_from_checkpoint(ckpt);
  const std::string text =
      format_transition_report(model.transitions().value(), ckpt.labels);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write transition report: " + out_path);
    out << text;
  }
  return 0;
}

int cmd_grad_check(std::uint64_t seed) {
  double worst = 0;
  char buf[160];
  for (const auto& outcome : run_model_grad_checks(seed)) {
    std::snprintf(buf, sizeof(buf),
                  "case=%-16s params=%-5ld checked=%-6zu max_rel_err=%.3e worst=%s",
                  outcome.name.c_str(), outcome.param_count, outcome.result.checked,
                  outcome.result.max_rel_err, outcome.result.worst_param.c_str());
    std::cout << buf << "\n";
    worst = std::max(worst, outcome.result.max_rel_err);
  }
  std::snprintf(buf, sizeof(buf), "max_rel_err=%.3e threshold=1e-03", worst);
  std::cout << buf << "\n";
  if (worst >= 1e-3) {
    std::cerr << "gradient check failed\n";
    return 3;
  }
  return 0;
}

int cmd_make_synthetic(const std::string& out_path, int abstracts, std::uint64_t seed,
                       double ambiguity) {
  SyntheticOptions opts;
  opts.num_abstracts = abstracts;
  opts.seed = seed;
  opts.ambiguity = ambiguity;
  Corpus corpus = make_synthetic(opts);
  save_corpus(corpus, out_path);
  std::cout << "wrote " << corpus.abstracts.size() << " abstracts ("
            << corpus.sentence_count() << " sentences) to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical sequential sentence classification toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string train_path, val_path, test_path, emb_path, model_path, in_path;
  std::string out_path, log_path;
  int abstracts = 100;
  std::uint64_t seed = 42;
  double ambiguity = 0.0;

  auto* train = app.add_subcommand("train", "train a model and keep the best epoch");
  train->add_option("--train", train_path, "training corpus")->required();
  train->add_option("--val", val_path, "validation corpus")->required();
  train->add_option("--emb", emb_path, "word2vec text embeddings");
  train->add_option("--out", out_path, "checkpoint output path")->required();
  train->add_option("--log", log_path, "training log path (default: <out>.log)");
  add_common(train, opts);

  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a test corpus");
  evaluate->add_option("--model", model_path, "checkpoint path")->required();
  evaluate->add_option("--test", test_path, "test corpus")->required();
  evaluate->add_option("--out", out_path, "machine-readable metrics output");

  auto* predict = app.add_subcommand("predict", "label a corpus (labels optional)");
  predict->add_option("--model", model_path, "checkpoint path")->required();
  predict->add_option("--in", in_path, "input corpus")->required();
  predict->add_option("--out", out_path, "annotated output path (default: stdout)");

  auto* export_cmd =
      app.add_subcommand("export-transitions", "write the learned transition table");
  export_cmd->add_option("--model", model_path, "checkpoint path")->required();
  export_cmd->add_option("--out", out_path, "report path (default: stdout)");

  auto* grad = app.add_subcommand("grad-check",
                                  "finite-difference check of every model gradient");
  grad->add_option("--seed", seed, "seed for the checked configurations");

  auto* synth = app.add_subcommand("make-synthetic", "generate a grammar-based corpus");
  synth->add_option("--out", out_path, "corpus output path")->required();
  synth->add_option("--abstracts", abstracts, "number of abstracts");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--ambiguity", ambiguity,
                    "fraction of B/O sentences drawn from the shared pool");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (train->parsed())
      return cmd_train(opts, train_path, val_path, emb_path, out_path, log_path);
    if (evaluate->parsed()) return cmd_evaluate(model_path, test_path, out_path);
    if (predict->parsed()) return cmd_predict(model_path, in_path, out_path);
    if (export_cmd->parsed()) return cmd_export_transitions(model_path, out_path);
    if (grad->parsed()) return cmd_grad_check(seed);
    if (synth->parsed()) return cmd_make_synthetic(out_path, abstracts, seed, ambiguity);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
