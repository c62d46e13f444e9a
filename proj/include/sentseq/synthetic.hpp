#pragma once

#include <cstdint>

#include "sentseq/data.hpp"

namespace sentseq {

// Grammar-generated corpora: every abstract walks the canonical
// BACKGROUND -> OBJECTIVE -> METHODS -> RESULTS -> CONCLUSIONS section order
// with label-specific vocabularies, so the sentence -> label mapping is
// learnable by construction.
//
// ambiguity > 0 makes that fraction of BACKGROUND/OBJECTIVE sentences draw
// their content from a pool shared by both labels, and pins both sections to
// exactly two sentences: content alone can no longer separate the two
// labels, but the sentence position determines the gold label exactly.
struct SyntheticOptions {
  int num_abstracts = 100;
  std::uint64_t seed = 1;
  double ambiguity = 0.0;  // probability a B/O sentence uses the shared pool
  Split split = Split::Train;
};

Corpus make_synthetic(const SyntheticOptions& opts);

}  // namespace sentseq
