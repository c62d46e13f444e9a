#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentseq/data.hpp"
#include "sentseq/tensor.hpp"

namespace sentseq {

inline constexpr int kPadIndex = 0;
inline constexpr int kUnkIndex = 1;
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";

class Vocabulary {
 public:
  Vocabulary();  // just PAD and UNK
  explicit Vocabulary(std::vector<std::string> tokens);  // must start PAD, UNK

  int index_of(const std::string& token) const;  // UNK when absent
  bool contains(const std::string& token) const;
  const std::string& token(int index) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  int size() const { return static_cast<int>(tokens_.size()); }

  // FNV-1a over newline-joined tokens; checkpoint integrity check.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void rebuild_index();
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Tokens occurring >= min_count times, ordered by (count desc, token asc)
// after the reserved PAD/UNK entries.
Vocabulary build_vocab(const Corpus& corpus, int min_count = 1);

struct EmbeddingTable {
  Tensor matrix;  // {dim, |V|}, column per token
  int dim = 0;
  bool trainable = false;

  int vocab_size() const { return matrix.dim(1); }
};

struct CoverageReport {
  int covered = 0;
  int total = 0;  // vocab size minus PAD/UNK
  std::string to_string() const;
};

// All columns ~ uniform(-0.25, 0.25) except PAD (zeros).
EmbeddingTable random_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed);

// word2vec text format: header `<count> <dim>`, then `<word> <v1> ... <vdim>`
// per line. In-vocabulary words take file vectors, PAD is zeros, everything
// else is seeded uniform(-0.25, 0.25). expected_dim 0 adopts the file's dim.
EmbeddingTable load_pretrained(const std::string& path, const Vocabulary& vocab,
                               std::uint64_t seed, int expected_dim = 0,
                               CoverageReport* coverage = nullptr);

// Sentence embedding matrix {dim, N}: column j is the vector of token j.
template <typename T>
TensorT<T> embed_tokens(GraphT<T>& g, const TensorT<T>& matrix, const Vocabulary& vocab,
                        const std::vector<std::string>& tokens) {
  std::vector<int> idx;
  idx.reserve(tokens.size());
  for (const auto& t : tokens) idx.push_back(vocab.index_of(t));
  return g.gather_cols(matrix, idx);
}

inline Tensor embed(GraphT<float>& g, const EmbeddingTable& table, const Vocabulary& vocab,
                    const std::vector<std::string>& tokens) {
  return embed_tokens<float>(g, table.matrix, vocab, tokens);
}

}  // namespace sentseq
