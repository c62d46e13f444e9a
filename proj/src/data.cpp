#include "sentseq/data.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sentseq/rng.hpp"

namespace sentseq {

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw DataError("label set needs at least 2 labels");
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j])
        throw DataError("duplicate label '" + names_[i] + "' in label set");
}

int LabelSet::add(const std::string& name) {
  if (auto idx = find(name)) return *idx;
  names_.push_back(name);
  return static_cast<int>(names_.size()) - 1;
}

std::optional<int> LabelSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

const std::string& LabelSet::name(int index) const {
  if (index < 0 || index >= size())
    throw ContractError("label index " + std::to_string(index) + " out of range");
  return names_[static_cast<std::size_t>(index)];
}

std::size_t Corpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& a : abstracts) n += a.sentences.size();
  return n;
}

bool Corpus::fully_labeled() const {
  for (const auto& a : abstracts)
    for (int l : a.labels)
      if (l < 0) return false;
  return true;
}

std::vector<std::string> tokenize(const std::string& sentence,
                                  const TokenizeOptions& opts) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&]() {
    if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  };
  for (char ch : sentence) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
      continue;
    }
    char c = ch;
    if (opts.lowercase) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (opts.digits_to_zero && c >= '0' && c <= '9') c = '0';
    cur.push_back(c);
  }
  flush();
  if (tokens.empty()) throw DataError("empty sentence: no tokens after whitespace split");
  return tokens;
}

namespace {

void finish_abstract(Corpus& corpus, Abstract& cur, bool& open,
                     const std::string& origin, std::size_t line_no) {
  if (!open) return;
  if (cur.sentences.empty())
    throw DataError(origin + ":" + std::to_string(line_no) + ": abstract '" + cur.id +
                    "' has no sentences");
  corpus.abstracts.push_back(std::move(cur));
  cur = Abstract{};
  open = false;
}

}  // namespace

Corpus parse_rct_text(const std::string& content, const ParseOptions& opts,
                      const std::string& origin) {
  Corpus corpus;
  corpus.split = opts.split;
  if (opts.known_labels) corpus.label_set = *opts.known_labels;

  Abstract cur;
  bool open = false;
  std::size_t line_no = 0;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("###", 0) == 0) {
      finish_abstract(corpus, cur, open, origin, line_no);
      cur.id = line.substr(3);
      open = true;
      continue;
    }
    if (line.empty()) {
      finish_abstract(corpus, cur, open, origin, line_no);
      continue;
    }
    if (!open)
      throw DataError(origin + ":" + std::to_string(line_no) +
                      ": sentence line outside an abstract (missing ### header)");
    const auto tab = line.find('\t');
    int label = -1;
    std::string text;
    if (tab == std::string::npos) {
      if (!opts.allow_unlabeled)
        throw DataError(origin + ":" + std::to_string(line_no) +
                        ": malformed line, expected LABEL<TAB>text");
      text = line;
    } else {
      std::string label_name = line.substr(0, tab);
      text = line.substr(tab + 1);
      const auto sep = label_name.find_first_of(",|");
      if (sep != std::string::npos) {
        label_name = label_name.substr(0, sep);
        ++corpus.multi_label_reduced;
      }
      if (opts.known_labels) {
        auto idx = corpus.label_set.find(label_name);
        if (!idx)
          throw DataError(origin + ":" + std::to_string(line_no) + ": unknown label '" +
                          label_name + "'");
        label = *idx;
      } else {
        label = corpus.label_set.add(label_name);
      }
    }
    std::vector<std::string> tokens;
    try {
      tokens = tokenize(text, opts.tokenize);
    } catch (const DataError& e) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    cur.raw.push_back(std::move(text));
    cur.sentences.push_back(std::move(tokens));
    cur.labels.push_back(label);
  }
  finish_abstract(corpus, cur, open, origin, line_no + 1);
  if (corpus.abstracts.empty())
    throw DataError(origin + ": empty corpus, no abstracts found");
  return corpus;
}

Corpus parse_rct(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rct_text(buf.str(), opts, path);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& a : corpus.abstracts) {
    out += "###" + a.id + "\n";
    for (std::size_t i = 0; i < a.raw.size(); ++i) {
      const int label = a.labels[i];
      if (label >= 0) {
        out += corpus.label_set.name(label);
        out += '\t';
      }
      out += a.raw[i];
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path);
  out << serialize_corpus(corpus);
}

std::vector<std::vector<int>> make_batches(const Corpus& corpus,
                                           int max_abstracts_per_batch,
                                           std::uint64_t seed) {
  if (max_abstracts_per_batch < 1)
    throw ContractError("max_abstracts_per_batch must be >= 1");
  std::vector<int> order(corpus.abstracts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  if (corpus.split == Split::Train) {
    Rng rng(seed);
    rng.shuffle(order);
  }
  std::vector<std::vector<int>> batches;
  for (std::size_t i = 0; i < order.size();
       i += static_cast<std::size_t>(max_abstracts_per_batch)) {
    const auto end =
        std::min(order.size(), i + static_cast<std::size_t>(max_abstracts_per_batch));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace sentseq
