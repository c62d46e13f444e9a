#include "sentseq/vocab.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sentseq/rng.hpp"

namespace sentseq {

Vocabulary::Vocabulary() : tokens_{kPadToken, kUnkToken} { rebuild_index(); }

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2 || tokens_[0] != kPadToken || tokens_[1] != kUnkToken)
    throw DataError("vocabulary must start with the reserved PAD and UNK tokens");
  rebuild_index();
  if (index_.size() != tokens_.size()) throw DataError("duplicate token in vocabulary");
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    index_.emplace(tokens_[i], static_cast<int>(i));
}

int Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkIndex : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) > 0;
}

const std::string& Vocabulary::token(int index) const {
  if (index < 0 || index >= size())
    throw ContractError("vocab index " + std::to_string(index) + " out of range");
  return tokens_[static_cast<std::size_t>(index)];
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](char c) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  };
  for (const auto& t : tokens_) {
    for (char c : t) mix(c);
    mix('\n');
  }
  return h;
}

Vocabulary build_vocab(const Corpus& corpus, int min_count) {
  if (min_count < 1) throw ContractError("min_count must be >= 1");
  if (corpus.abstracts.empty()) throw DataError("cannot build vocabulary from empty corpus");
  std::map<std::string, long> counts;  // ordered map gives the lexicographic tie-break
  for (const auto& a : corpus.abstracts)
    for (const auto& sent : a.sentences)
      for (const auto& tok : sent) ++counts[tok];

  std::vector<std::pair<std::string, long>> kept;
  for (const auto& [tok, cnt] : counts)
    if (cnt >= min_count) kept.emplace_back(tok, cnt);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens{kPadToken, kUnkToken};
  tokens.reserve(kept.size() + 2);
  for (auto& [tok, cnt] : kept) tokens.push_back(std::move(tok));
  return Vocabulary(std::move(tokens));
}

std::string CoverageReport::to_string() const {
  const double pct = total > 0 ? 100.0 * covered / total : 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d/%d (%.1f%%)", covered, total, pct);
  return buf;
}

namespace {

void fill_random_column(Tensor& matrix, int col, int dim, const Rng& base) {
  Rng rng = base.fork(static_cast<std::uint64_t>(col));
  for (int i = 0; i < dim; ++i)
    matrix.at(i, col) = static_cast<float>(rng.uniform(-0.25, 0.25));
}

}  // namespace

EmbeddingTable random_embeddings(const Vocabulary& vocab, int dim, std::uint64_t seed) {
  if (dim < 1) throw ContractError("embedding dim must be >= 1");
  EmbeddingTable table;
  table.dim = dim;
  table.matrix = Tensor::zeros({dim, vocab.size()});
  Rng base(seed);
  for (int c = kUnkIndex; c < vocab.size(); ++c)  // PAD stays zero
    fill_random_column(table.matrix, c, dim, base);
  return table;
}

EmbeddingTable load_pretrained(const std::string& path, const Vocabulary& vocab,
                               std::uint64_t seed, int expected_dim,
                               CoverageReport* coverage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file: " + path);

  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty embedding file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  long declared_count = 0;
  int dim = 0;
  {
    std::istringstream hs(header);
    std::string rest;
    if (!(hs >> declared_count >> dim) || declared_count < 0 || dim < 1 || (hs >> rest))
      throw DataError(path + ":1: malformed word2vec header, expected `<count> <dim>`");
  }
  if (expected_dim > 0 && dim != expected_dim)
    throw DataError(path + ": embedding dim " + std::to_string(dim) +
                    " does not match configured dim " + std::to_string(expected_dim));

  EmbeddingTable table;
  table.dim = dim;
  table.matrix = Tensor::zeros({dim, vocab.size()});

  std::vector<bool> covered(static_cast<std::size_t>(vocab.size()), false);
  std::string line;
  std::size_t line_no = 1;
  long parsed = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    ++parsed;
    const bool in_vocab = vocab.contains(word);
    const int col = in_vocab ? vocab.index_of(word) : -1;
    int got = 0;
    float v = 0;
    while (ls >> v) {
      if (got < dim && col >= 0) table.matrix.at(got, col) = v;
      ++got;
    }
    if (got != dim)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " values for '" + word + "', got " +
                      std::to_string(got));
    if (col >= 0 && col != kPadIndex && col != kUnkIndex)
      covered[static_cast<std::size_t>(col)] = true;
  }
  if (declared_count != parsed)
    throw DataError(path + ": header declares " + std::to_string(declared_count) +
                    " vectors, file has " + std::to_string(parsed));

  Rng base(seed);
  int n_covered = 0;
  for (int c = kUnkIndex; c < vocab.size(); ++c) {
    if (c != kUnkIndex && covered[static_cast<std::size_t>(c)]) {
      ++n_covered;
      continue;
    }
    fill_random_column(table.matrix, c, dim, base);
  }
  if (coverage) {
    coverage->covered = n_covered;
    coverage->total = vocab.size() - 2;
  }
  return table;
}

}  // namespace sentseq
