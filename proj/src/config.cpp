#include "sentseq/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sentseq {

std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

int parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const std::uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  }
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(parse_int(trim(item), key));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated int list");
  return out;
}

std::string int_list_str(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

void apply_setting(RunSettings& s, const std::string& key, const std::string& value) {
  auto& m = s.model;
  if (key == "seed") s.seed = parse_u64(value, key);
  else if (key == "encoder.kind") {
    if (value == "rnn") m.encoder.kind = EncoderKind::Rnn;
    else if (value == "cnn") m.encoder.kind = EncoderKind::Cnn;
    else throw ConfigError("encoder.kind: expected rnn or cnn, got '" + value + "'");
  } else if (key == "encoder.cell") {
    if (value == "lstm") m.encoder.cell = RnnCell::Lstm;
    else if (value == "gru") m.encoder.cell = RnnCell::Gru;
    else throw ConfigError("encoder.cell: expected lstm or gru, got '" + value + "'");
  } else if (key == "encoder.d_hs") m.encoder.d_hs = parse_int(value, key);
  else if (key == "encoder.windows") m.encoder.windows = parse_int_list(value, key);
  else if (key == "encoder.d_c") m.encoder.d_c = parse_int(value, key);
  else if (key == "attention.enabled") m.encoder.use_attention = parse_bool(value, key);
  else if (key == "attention.d_a") m.encoder.d_a = parse_int(value, key);
  else if (key == "attention.r") m.encoder.r = parse_int(value, key);
  else if (key == "context.enabled") m.context.use_context = parse_bool(value, key);
  else if (key == "context.d_hd") m.context.d_hd = parse_int(value, key);
  else if (key == "context.ffn_hidden") m.context.ffn_hidden = parse_int(value, key);
  else if (key == "crf.enabled") m.use_crf = parse_bool(value, key);
  else if (key == "crf.emission_softmax") m.emission_softmax = parse_bool(value, key);
  else if (key == "crf.boundary") m.crf_boundary = parse_bool(value, key);
  else if (key == "reg.dropout") m.dropout = parse_double(value, key);
  else if (key == "reg.beta") m.beta = parse_double(value, key);
  else if (key == "reg.el_enabled") m.use_el_reg = parse_bool(value, key);
  else if (key == "emb.dim") m.emb_dim = parse_int(value, key);
  else if (key == "emb.trainable") m.emb_trainable = parse_bool(value, key);
  else if (key == "labels.count") m.num_labels = parse_int(value, key);
  else if (key == "train.lr0") s.train.lr0 = parse_double(value, key);
  else if (key == "train.lr_decay") s.train.lr_decay = parse_double(value, key);
  else if (key == "train.epochs") s.train.epochs = parse_int(value, key);
  else if (key == "train.patience") s.train.patience = parse_int(value, key);
  else if (key == "train.batch_size") s.train.batch_size = parse_int(value, key);
  else if (key == "train.grad_clip") s.train.grad_clip = parse_double(value, key);
  else if (key == "data.lowercase") s.data.tokenize.lowercase = parse_bool(value, key);
  else if (key == "data.digits_to_zero") s.data.tokenize.digits_to_zero = parse_bool(value, key);
  else if (key == "data.min_count") s.data.min_count = parse_int(value, key);
  else throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(RunSettings& s, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected `key = value`");
    try {
      apply_setting(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunSettings& s, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(s, buf.str(), path);
}

std::vector<std::pair<std::string, std::string>> settings_kv(const RunSettings& s) {
  const auto& m = s.model;
  std::vector<std::pair<std::string, std::string>> kv;
  auto b = [](bool v) { return v ? "true" : "false"; };
  kv.emplace_back("seed", std::to_string(s.seed));
  kv.emplace_back("encoder.kind", m.encoder.kind == EncoderKind::Rnn ? "rnn" : "cnn");
  kv.emplace_back("encoder.cell", m.encoder.cell == RnnCell::Lstm ? "lstm" : "gru");
  kv.emplace_back("encoder.d_hs", std::to_string(m.encoder.d_hs));
  kv.emplace_back("encoder.windows", int_list_str(m.encoder.windows));
  kv.emplace_back("encoder.d_c", std::to_string(m.encoder.d_c));
  kv.emplace_back("attention.enabled", b(m.encoder.use_attention));
  kv.emplace_back("attention.d_a", std::to_string(m.encoder.d_a));
  kv.emplace_back("attention.r", std::to_string(m.encoder.r));
  kv.emplace_back("context.enabled", b(m.context.use_context));
  kv.emplace_back("context.d_hd", std::to_string(m.context.d_hd));
  kv.emplace_back("context.ffn_hidden", std::to_string(m.context.ffn_hidden));
  kv.emplace_back("crf.enabled", b(m.use_crf));
  kv.emplace_back("crf.emission_softmax", b(m.emission_softmax));
  kv.emplace_back("crf.boundary", b(m.crf_boundary));
  kv.emplace_back("reg.dropout", format_double(m.dropout));
  kv.emplace_back("reg.beta", format_double(m.beta));
  kv.emplace_back("reg.el_enabled", b(m.use_el_reg));
  kv.emplace_back("emb.dim", std::to_string(m.emb_dim));
  kv.emplace_back("emb.trainable", b(m.emb_trainable));
  kv.emplace_back("labels.count", std::to_string(m.num_labels));
  kv.emplace_back("train.lr0", format_double(s.train.lr0));
  kv.emplace_back("train.lr_decay", format_double(s.train.lr_decay));
  kv.emplace_back("train.epochs", std::to_string(s.train.epochs));
  kv.emplace_back("train.patience", std::to_string(s.train.patience));
  kv.emplace_back("train.batch_size", std::to_string(s.train.batch_size));
  kv.emplace_back("train.grad_clip", format_double(s.train.grad_clip));
  kv.emplace_back("data.lowercase", b(s.data.tokenize.lowercase));
  kv.emplace_back("data.digits_to_zero", b(s.data.tokenize.digits_to_zero));
  kv.emplace_back("data.min_count", std::to_string(s.data.min_count));
  return kv;
}

std::string serialize_settings(const RunSettings& s) {
  std::string out;
  for (const auto& [k, v] : settings_kv(s)) out += k + " = " + v + "\n";
  return out;
}

RunSettings preset(const std::string& name) {
  RunSettings s;
  auto set = [&](const char* k, const char* v) { apply_setting(s, k, v); };
  if (name == "pubmed-rnn") {
    set("encoder.kind", "rnn");
    set("encoder.cell", "lstm");
    set("encoder.d_hs", "200");
    set("context.d_hd", "200");
    set("attention.d_a", "200");
    set("attention.r", "15");
    set("reg.beta", "0.01");
    set("reg.dropout", "0.5");
    set("emb.dim", "200");
  } else if (name == "pubmed-cnn") {
    set("encoder.kind", "cnn");
    set("encoder.windows", "2,3,4,5");
    set("encoder.d_c", "200");
    set("context.d_hd", "200");
    set("attention.d_a", "100");
    set("attention.r", "1");
    set("reg.beta", "0.001");
    set("reg.dropout", "0.5");
    set("emb.dim", "200");
  } else if (name == "nicta-rnn") {
    set("encoder.kind", "rnn");
    set("encoder.cell", "gru");
    set("encoder.d_hs", "200");
    set("context.d_hd", "200");
    set("attention.d_a", "250");
    set("attention.r", "5");
    set("reg.beta", "0.01");
    set("reg.dropout", "0.6");
    set("emb.dim", "200");
  } else if (name == "nicta-cnn") {
    set("encoder.kind", "cnn");
    set("encoder.windows", "2,3,4,5");
    set("encoder.d_c", "150");
    set("context.d_hd", "300");
    set("attention.d_a", "75");
    set("attention.r", "4");
    set("reg.beta", "0.01");
    set("reg.dropout", "0.6");
    set("emb.dim", "200");
  } else if (name == "tiny-rnn") {
    set("encoder.kind", "rnn");
    set("encoder.cell", "lstm");
    set("encoder.d_hs", "24");
    set("context.d_hd", "24");
    set("context.ffn_hidden", "24");
    set("attention.d_a", "12");
    set("attention.r", "2");
    set("reg.beta", "0.01");
    set("reg.dropout", "0.2");
    set("emb.dim", "32");
    set("train.lr0", "0.01");
    set("train.batch_size", "4");
  } else if (name == "tiny-cnn") {
    set("encoder.kind", "cnn");
    set("encoder.windows", "2,3");
    set("encoder.d_c", "16");
    set("context.d_hd", "24");
    set("context.ffn_hidden", "24");
    set("attention.d_a", "12");
    set("attention.r", "2");
    set("reg.beta", "0.01");
    set("reg.dropout", "0.2");
    set("emb.dim", "32");
    set("train.lr0", "0.01");
    set("train.batch_size", "4");
  } else {
    throw ConfigError("unknown preset '" + name + "'; available: " +
                      [] {
                        std::string all;
                        for (const auto& n : preset_names()) {
                          if (!all.empty()) all += ", ";
                          all += n;
                        }
                        return all;
                      }());
  }
  return s;
}

std::vector<std::string> preset_names() {
  return {"pubmed-rnn", "pubmed-cnn", "nicta-rnn", "nicta-cnn", "tiny-rnn", "tiny-cnn"};
}

}  // namespace sentseq
