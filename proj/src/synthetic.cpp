#include "sentseq/synthetic.hpp"

#include <array>
#include <cstdio>

#include "sentseq/rng.hpp"

namespace sentseq {

namespace {

constexpr int kPoolSize = 24;
const std::array<const char*, 5> kLabelNames = {"BACKGROUND", "OBJECTIVE", "METHODS",
                                                "RESULTS", "CONCLUSIONS"};
const std::array<const char*, 5> kPrefixes = {"bg", "ob", "me", "re", "co"};
const std::array<const char*, 8> kFiller = {"the", "of",  "and", "in",
                                            "to",  "with", "for", "on"};

std::string pool_token(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

std::string make_sentence(Rng& rng, const char* prefix) {
  const int len = rng.range_int(5, 9);
  std::string text;
  for (int i = 0; i < len; ++i) {
    if (i) text += ' ';
    if (rng.bernoulli(0.3))
      text += kFiller[static_cast<std::size_t>(rng.range_int(0, kFiller.size() - 1))];
    else
      text += pool_token(prefix, rng.range_int(0, kPoolSize - 1));
  }
  return text;
}

}  // namespace

Corpus make_synthetic(const SyntheticOptions& opts) {
  if (opts.num_abstracts < 1) throw ContractError("num_abstracts must be >= 1");
  if (opts.ambiguity < 0 || opts.ambiguity > 1)
    throw ContractError("ambiguity must be in [0, 1]");

  Corpus corpus;
  corpus.split = opts.split;
  for (const char* name : kLabelNames) corpus.label_set.add(name);

  Rng rng(splitmix64(opts.seed ^ 0x5eeded'c0ffeeULL));
  const bool ambiguous_mode = opts.ambiguity > 0;
  for (int a = 0; a < opts.num_abstracts; ++a) {
    Abstract abs;
    char id[16];
    std::snprintf(id, sizeof(id), "SYN%06d", a + 1);
    abs.id = id;
    for (int section = 0; section < 5; ++section) {
      // In ambiguous mode the B and O sections have fixed length 2 so the
      // sentence position fully determines the gold label; pairwise
      // transition scores cannot count positions, a sequence encoder can.
      const bool fixed = ambiguous_mode && section <= 1;
      const int len = fixed ? 2 : 1 + (rng.bernoulli(0.25) ? 1 : 0);
      for (int i = 0; i < len; ++i) {
        const char* prefix = kPrefixes[static_cast<std::size_t>(section)];
        if (ambiguous_mode && section <= 1 && rng.bernoulli(opts.ambiguity))
          prefix = "bo";  // pool shared between BACKGROUND and OBJECTIVE
        abs.raw.push_back(make_sentence(rng, prefix));
        abs.sentences.push_back(tokenize(abs.raw.back()));
        abs.labels.push_back(section);
      }
    }
    corpus.abstracts.push_back(std::move(abs));
  }
  return corpus;
}

}  // namespace sentseq
