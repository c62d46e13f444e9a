#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sentseq/error.hpp"

namespace sentseq {

// Ordered label inventory. Index order is meaningful: checkpoints, emission
// vectors, and the transition matrix all use it.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> names);

  int add(const std::string& name);            // returns index, appends if new
  std::optional<int> find(const std::string& name) const;
  const std::string& name(int index) const;
  const std::vector<std::string>& names() const { return names_; }
  int size() const { return static_cast<int>(names_.size()); }
  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> names_;
};

struct TokenizeOptions {
  bool lowercase = true;
  bool digits_to_zero = false;
};

// One abstract: parallel sentence/label sequences, raw text retained for
// faithful re-serialization. label -1 marks an unlabeled sentence
// (prediction input only).
struct Abstract {
  std::string id;
  std::vector<std::string> raw;                   // original sentence text
  std::vector<std::vector<std::string>> sentences;  // token lists
  std::vector<int> labels;

  int size() const { return static_cast<int>(sentences.size()); }
};

enum class Split { Train, Validation, Test };

struct Corpus {
  std::vector<Abstract> abstracts;
  LabelSet label_set;
  Split split = Split::Train;
  // Sentences whose label field listed several labels (comma or pipe
  // separated); the first one wins and this counts the reductions.
  std::size_t multi_label_reduced = 0;

  std::size_t sentence_count() const;
  bool fully_labeled() const;
};

// Whitespace split + lowercasing (+ optional digit normalization).
std::vector<std::string> tokenize(const std::string& sentence,
                                  const TokenizeOptions& opts = {});

struct ParseOptions {
  TokenizeOptions tokenize;
  const LabelSet* known_labels = nullptr;  // validate against when set
  bool allow_unlabeled = false;            // lines without a tab become label -1
  Split split = Split::Train;
};

// Corpus file format: `###<id>` header line, then one `LABEL\t<text>` line
// per sentence, abstracts separated by a blank line. CRLF tolerated.
Corpus parse_rct(const std::string& path, const ParseOptions& opts = {});
Corpus parse_rct_text(const std::string& content, const ParseOptions& opts = {},
                      const std::string& origin = "<string>");

std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

// Batches of whole abstracts (indices into corpus.abstracts). Training
// splits are shuffled by seed; eval splits keep file order.
std::vector<std::vector<int>> make_batches(const Corpus& corpus,
                                           int max_abstracts_per_batch,
                                           std::uint64_t seed);

}  // namespace sentseq
