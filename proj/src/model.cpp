#include "sentseq/model.hpp"

namespace sentseq {

std::vector<EncodedAbstract> encode_corpus(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<EncodedAbstract> out;
  out.reserve(corpus.abstracts.size());
  for (const auto& a : corpus.abstracts) {
    EncodedAbstract enc;
    enc.source = &a;
    enc.labels = a.labels;
    enc.token_ids.reserve(a.sentences.size());
    for (const auto& sent : a.sentences) {
      std::vector<int> ids;
      ids.reserve(sent.size());
      for (const auto& tok : sent) ids.push_back(vocab.index_of(tok));
      enc.token_ids.push_back(std::move(ids));
    }
    out.push_back(std::move(enc));
  }
  return out;
}

long ModelConfig::param_count(int vocab_size) const {
  const auto& e = encoder;
  long total = 0;
  if (emb_trainable) total += static_cast<long>(emb_dim) * vocab_size;

  if (e.kind == EncoderKind::Rnn) {
    const long in = emb_dim + e.d_hs;
    const long per_dir = e.cell == RnnCell::Lstm
                             ? 4L * e.d_hs * in + 4L * e.d_hs
                             : 3L * e.d_hs * in + 3L * e.d_hs;
    total += 2 * per_dir;
  } else {
    for (int w : e.windows) total += static_cast<long>(e.d_c) * w * emb_dim + e.d_c;
  }

  if (e.use_attention)
    total += static_cast<long>(e.d_a) * e.d_out() + e.d_a +
             static_cast<long>(e.r) * e.d_a;

  const long pooled = e.pooled_dim();
  bool projected = false;
  if (context.use_context) {
    const long in = pooled + context.d_hd;
    total += 2 * (4L * context.d_hd * in + 4L * context.d_hd);
  } else if (pooled != 2L * context.d_hd) {
    total += 2L * context.d_hd * pooled + 2L * context.d_hd;
    projected = true;
  }

  const long head_in = (context.use_context || projected) ? 2L * context.d_hd : pooled;
  const long ffn = context.ffn_width();
  total += ffn * head_in + ffn + static_cast<long>(num_labels) * ffn + num_labels;

  if (use_crf) {
    total += static_cast<long>(num_labels) * num_labels;
    if (crf_boundary) total += 2L * num_labels;
  }
  return total;
}

}  // namespace sentseq
