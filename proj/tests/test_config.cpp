#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sentseq/config.hpp"
#include "sentseq/synthetic.hpp"

using namespace sentseq;

TEST_CASE("settings serialize and re-apply to the same canonical form") {
  RunSettings s = preset("nicta-cnn");
  s.seed = 77;
  s.train.epochs = 12;
  const std::string text = serialize_settings(s);

  RunSettings restored;
  apply_config_text(restored, text);
  CHECK(serialize_settings(restored) == text);
}

TEST_CASE("presets carry the published hyperparameters") {
  RunSettings pr = preset("pubmed-rnn");
  CHECK(pr.model.encoder.kind == EncoderKind::Rnn);
  CHECK(pr.model.encoder.cell == RnnCell::Lstm);
  CHECK(pr.model.encoder.d_hs == 200);
  CHECK(pr.model.context.d_hd == 200);
  CHECK(pr.model.encoder.d_a == 200);
  CHECK(pr.model.encoder.r == 15);
  CHECK(pr.model.beta == 0.01);
  CHECK(pr.model.dropout == 0.5);
  CHECK(pr.model.emb_dim == 200);

  RunSettings pc = preset("pubmed-cnn");
  CHECK(pc.model.encoder.kind == EncoderKind::Cnn);
  CHECK(pc.model.encoder.windows == std::vector<int>{2, 3, 4, 5});
  CHECK(pc.model.encoder.d_c == 200);
  CHECK(pc.model.encoder.d_a == 100);
  CHECK(pc.model.encoder.r == 1);
  CHECK(pc.model.beta == 0.001);

  RunSettings nr = preset("nicta-rnn");
  CHECK(nr.model.encoder.cell == RnnCell::Gru);
  CHECK(nr.model.encoder.d_a == 250);
  CHECK(nr.model.encoder.r == 5);
  CHECK(nr.model.dropout == 0.6);

  RunSettings nc = preset("nicta-cnn");
  CHECK(nc.model.context.d_hd == 300);
  CHECK(nc.model.encoder.d_a == 75);
  CHECK(nc.model.encoder.d_c == 150);
  CHECK(nc.model.encoder.r == 4);
  CHECK(nc.model.beta == 0.01);
  CHECK(nc.model.dropout == 0.6);

  CHECK_THROWS_WITH_AS(preset("nope"), doctest::Contains("unknown preset"), ConfigError);
}

TEST_CASE("unknown keys and malformed values are config errors") {
  RunSettings s;
  CHECK_THROWS_WITH_AS(apply_setting(s, "bogus.key", "1"),
                       doctest::Contains("bogus.key"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "train.epochs", "many"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "reg.dropout", "0.5.5"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "encoder.kind", "transformer"), ConfigError);
  CHECK_THROWS_WITH_AS(apply_config_text(s, "key_without_value\n", "cfg"),
                       doctest::Contains("cfg:1"), ConfigError);
}

TEST_CASE("config text supports comments and blank lines; later keys win") {
  RunSettings s;
  apply_config_text(s,
                    "# hidden sizes\n"
                    "encoder.d_hs = 64\n"
                    "\n"
                    "encoder.d_hs = 32  # revised\n");
  CHECK(s.model.encoder.d_hs == 32);
}

TEST_CASE("format_double picks the shortest round-trip form") {
  CHECK(format_double(0.003) == "0.003");
  CHECK(format_double(0.9) == "0.9");
  CHECK(format_double(1e-8) == "1e-08");
  CHECK(format_double(0.1 + 0.2) != "0.3");  // not the same double
}

TEST_CASE("validate catches out-of-range settings") {
  RunSettings s = preset("tiny-rnn");
  s.model.num_labels = 5;
  s.validate();
  s.model.dropout = 1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.model.dropout = 0.5;
  s.train.lr_decay = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("synthetic corpus: canonical order, determinism, round trip") {
  SyntheticOptions opts;
  opts.num_abstracts = 20;
  opts.seed = 33;
  Corpus c = make_synthetic(opts);
  CHECK(c.abstracts.size() == 20);
  CHECK(c.label_set.names() ==
        std::vector<std::string>{"BACKGROUND", "OBJECTIVE", "METHODS", "RESULTS",
                                 "CONCLUSIONS"});
  for (const auto& a : c.abstracts) {
    // labels walk the sections in order, each section 1..2 sentences
    int prev = -1;
    int run = 0;
    for (int y : a.labels) {
      if (y == prev) {
        ++run;
        CHECK(run <= 2);
      } else {
        CHECK(y == prev + 1);
        prev = y;
        run = 1;
      }
    }
    CHECK(prev == 4);
    // clean mode: content tokens (two letters + two digits) carry their
    // section's prefix
    auto is_pool_token = [](const std::string& tok) {
      return tok.size() == 4 && std::isdigit(static_cast<unsigned char>(tok[2])) &&
             std::isdigit(static_cast<unsigned char>(tok[3]));
    };
    for (std::size_t i = 0; i < a.sentences.size(); ++i) {
      const char* prefix = std::array<const char*, 5>{"bg", "ob", "me", "re",
                                                      "co"}[static_cast<std::size_t>(
          a.labels[i])];
      for (const auto& tok : a.sentences[i])
        if (is_pool_token(tok)) CHECK(tok.substr(0, 2) == prefix);
    }
  }

  Corpus again = make_synthetic(opts);
  CHECK(serialize_corpus(again) == serialize_corpus(c));
  Corpus reparsed = parse_rct_text(serialize_corpus(c));
  CHECK(serialize_corpus(reparsed) == serialize_corpus(c));
}

TEST_CASE("synthetic ambiguity fixes B/O sections at two and mixes the shared pool") {
  SyntheticOptions opts;
  opts.num_abstracts = 200;
  opts.seed = 8;
  opts.ambiguity = 0.3;
  Corpus c = make_synthetic(opts);
  bool saw_shared = false;
  for (const auto& a : c.abstracts) {
    int b_len = 0, o_len = 0;
    for (std::size_t i = 0; i < a.sentences.size(); ++i) {
      if (a.labels[i] == 0) ++b_len;
      if (a.labels[i] == 1) ++o_len;
      if (a.labels[i] <= 1)
        for (const auto& tok : a.sentences[i])
          if (tok.size() == 4 && tok.substr(0, 2) == "bo") saw_shared = true;
      if (a.labels[i] >= 2)
        for (const auto& tok : a.sentences[i])
          CHECK((tok.size() != 4 || tok.substr(0, 2) != "bo"));
    }
    CHECK(b_len == 2);
    CHECK(o_len == 2);
  }
  CHECK(saw_shared);
}
