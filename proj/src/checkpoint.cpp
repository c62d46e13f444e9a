#include "sentseq/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sentseq {

namespace {

constexpr const char* kMagic = "sentseq-checkpoint v1";

std::uint64_t tokens_fingerprint(const std::vector<std::string>& tokens) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](char c) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  };
  for (const auto& t : tokens) {
    for (char c : t) mix(c);
    mix('\n');
  }
  return h;
}

[[noreturn]] void corrupt(const std::string& origin, const std::string& why) {
  throw DataError(origin + ": corrupt checkpoint: " + why);
}

}  // namespace

Checkpoint checkpoint_from_model(const Model& model, const RunSettings& settings,
                                 const LabelSet& labels, const Vocabulary& vocab,
                                 int epoch, double val_weighted_f1) {
  Checkpoint ckpt;
  ckpt.settings = settings;
  ckpt.settings.model = model.cfg;
  ckpt.labels = labels;
  ckpt.vocab_tokens = vocab.tokens();
  ckpt.epoch = epoch;
  ckpt.val_weighted_f1 = val_weighted_f1;
  for (const auto& [name, p] : model.params)
    ckpt.tensors.emplace_back(name, p.detached_copy());
  return ckpt;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "[config]\n";
  for (const auto& [k, v] : settings_kv(ckpt.settings)) out << k << " = " << v << "\n";
  out << "[labels]\n" << ckpt.labels.size() << "\n";
  for (const auto& name : ckpt.labels.names()) out << name << "\n";
  out << "[vocab]\n" << ckpt.vocab_tokens.size() << "\n";
  for (const auto& tok : ckpt.vocab_tokens) out << tok << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(tokens_fingerprint(ckpt.vocab_tokens)));
  out << "[meta]\n";
  out << "epoch = " << ckpt.epoch << "\n";
  out << "val_weighted_f1 = " << format_double(ckpt.val_weighted_f1) << "\n";
  out << "vocab_fingerprint = " << buf << "\n";
  out << "[tensors]\n" << ckpt.tensors.size() << "\n";
  for (const auto& [name, t] : ckpt.tensors) {
    out << name << " " << t.ndim();
    for (int d : t.shape()) out << " " << d;
    out << "\n";
  }
  out << "[data]\n";
  std::string text = out.str();
  for (const auto& [name, t] : ckpt.tensors) {
    static_assert(sizeof(float) == 4);
    const std::size_t bytes = t.numel() * 4;
    const std::size_t off = text.size();
    text.resize(off + bytes);
    std::memcpy(text.data() + off, t.value().data(), bytes);
  }
  return text;
}

Checkpoint parse_checkpoint(const std::string& bytes, const std::string& origin) {
  std::istringstream in(bytes);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) corrupt(origin, std::string("truncated at ") + what);
    return line;
  };
  auto expect = [&](const std::string& want) {
    if (next_line(want.c_str()) != want)
      corrupt(origin, "expected '" + want + "', got '" + line + "'");
  };

  expect(kMagic);
  expect("[config]");
  Checkpoint ckpt;
  while (std::getline(in, line)) {
    if (line == "[labels]") break;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) corrupt(origin, "bad config line '" + line + "'");
    try {
      apply_setting(ckpt.settings, line.substr(0, eq), line.substr(eq + 3));
    } catch (const ConfigError& e) {
      corrupt(origin, e.what());
    }
  }

  const int n_labels = std::atoi(next_line("label count").c_str());
  if (n_labels < 2) corrupt(origin, "label count < 2");
  std::vector<std::string> label_names;
  for (int i = 0; i < n_labels; ++i) label_names.push_back(next_line("label"));
  try {
    ckpt.labels = LabelSet(label_names);
  } catch (const DataError& e) {
    corrupt(origin, e.what());
  }

  expect("[vocab]");
  const long n_vocab = std::atol(next_line("vocab count").c_str());
  if (n_vocab < 2) corrupt(origin, "vocab count < 2");
  ckpt.vocab_tokens.reserve(static_cast<std::size_t>(n_vocab));
  for (long i = 0; i < n_vocab; ++i) ckpt.vocab_tokens.push_back(next_line("vocab token"));

  expect("[meta]");
  std::uint64_t stored_fp = 0;
  for (int i = 0; i < 3; ++i) {
    next_line("meta");
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) corrupt(origin, "bad meta line '" + line + "'");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 3);
    if (key == "epoch") ckpt.epoch = std::atoi(value.c_str());
    else if (key == "val_weighted_f1") ckpt.val_weighted_f1 = std::strtod(value.c_str(), nullptr);
    else if (key == "vocab_fingerprint") stored_fp = std::strtoull(value.c_str(), nullptr, 16);
    else corrupt(origin, "unknown meta key '" + key + "'");
  }
  if (stored_fp != tokens_fingerprint(ckpt.vocab_tokens))
    corrupt(origin, "vocabulary fingerprint mismatch");

  expect("[tensors]");
  const int n_tensors = std::atoi(next_line("tensor count").c_str());
  if (n_tensors < 1) corrupt(origin, "no tensors");
  std::vector<std::pair<std::string, Shape>> specs;
  for (int i = 0; i < n_tensors; ++i) {
    std::istringstream ls(next_line("tensor spec"));
    std::string name;
    int ndim = 0;
    if (!(ls >> name >> ndim) || ndim < 1 || ndim > 2)
      corrupt(origin, "bad tensor spec '" + line + "'");
    Shape shape(static_cast<std::size_t>(ndim));
    for (int d = 0; d < ndim; ++d)
      if (!(ls >> shape[static_cast<std::size_t>(d)]) || shape[static_cast<std::size_t>(d)] < 1)
        corrupt(origin, "bad shape in tensor spec '" + line + "'");
    specs.emplace_back(name, shape);
  }
  expect("[data]");

  std::size_t off = static_cast<std::size_t>(in.tellg());
  for (auto& [name, shape] : specs) {
    const std::size_t count = shape_numel(shape);
    const std::size_t nbytes = count * 4;
    if (off + nbytes > bytes.size())
      corrupt(origin, "tensor data truncated at '" + name + "'");
    std::vector<float> vals(count);
    std::memcpy(vals.data(), bytes.data() + off, nbytes);
    off += nbytes;
    ckpt.tensors.emplace_back(name, Tensor::of(shape, std::move(vals)));
  }
  if (off != bytes.size()) corrupt(origin, "trailing bytes after tensor data");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str(), path);
}

Vocabulary vocab_from_checkpoint(const Checkpoint& ckpt) {
  return Vocabulary(ckpt.vocab_tokens);
}

Model model_from_checkpoint(const Checkpoint& ckpt) {
  RunSettings settings = ckpt.settings;
  settings.validate();
  Model model = Model::init(settings.model, static_cast<int>(ckpt.vocab_tokens.size()),
                            settings.seed);
  if (model.params.size() != ckpt.tensors.size())
    throw DataError("corrupt checkpoint: expected " + std::to_string(model.params.size()) +
                    " tensors, found " + std::to_string(ckpt.tensors.size()));
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    auto& [name, p] = model.params[i];
    const auto& [ckpt_name, t] = ckpt.tensors[i];
    if (name != ckpt_name)
      throw DataError("corrupt checkpoint: tensor '" + ckpt_name + "' where '" + name +
                      "' was expected");
    if (t.shape() != p.shape())
      throw DataError("corrupt checkpoint: tensor '" + name + "' has shape " +
                      shape_str(t.shape()) + ", expected " + shape_str(p.shape()));
    p.value() = t.value();
  }
  return model;
}

}  // namespace sentseq
