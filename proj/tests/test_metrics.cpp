#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "sentseq/metrics.hpp"

using namespace sentseq;

TEST_CASE("perfect predictions give 100 everywhere and a diagonal confusion") {
  LabelSet labels({"A", "B", "C"});
  std::vector<std::vector<int>> gold{{0, 1, 2}, {2, 2, 1}};
  auto rep = evaluate_paths(gold, gold, labels);
  CHECK(rep.weighted_f1 == doctest::Approx(100.0));
  CHECK(rep.accuracy == doctest::Approx(100.0));
  for (const auto& s : rep.per_label) {
    CHECK(s.precision == doctest::Approx(100.0));
    CHECK(s.recall == doctest::Approx(100.0));
    CHECK(s.f1 == doctest::Approx(100.0));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(rep.confusion[static_cast<std::size_t>(i * 3 + j)] == 0);
  CHECK(rep.total == 6);
}

TEST_CASE("published per-label F1s and supports average to the published total") {
  const std::vector<double> f1s{79.2, 72.0, 96.3, 96.0, 97.1};
  const std::vector<long> supports{3077, 2333, 9884, 9713, 4571};
  const double weighted = support_weighted_mean(f1s, supports);
  CHECK(weighted == doctest::Approx(92.6).epsilon(0.0006));  // 92.6 +/- 0.05
}

TEST_CASE("confusion-matrix arithmetic: recall comes from column sums") {
  // the published 5x5 confusion counts, rows predicted / columns true
  LabelSet labels({"B", "C", "M", "O", "R"});
  const long counts[5][5] = {{2460, 4, 69, 537, 7},
                             {4, 4413, 11, 1, 142},
                             {37, 11, 9657, 27, 152},
                             {632, 0, 68, 1630, 3},
                             {2, 95, 362, 1, 9253}};
  std::vector<int> pred, gold;
  for (int p = 0; p < 5; ++p)
    for (int t = 0; t < 5; ++t)
      for (long k = 0; k < counts[p][t]; ++k) {
        pred.push_back(p);
        gold.push_back(t);
      }
  auto rep = evaluate_paths({pred}, {gold}, labels);

  long col_sum_b = 0;
  for (int p = 0; p < 5; ++p) col_sum_b += counts[p][0];
  CHECK(col_sum_b == 3135);
  CHECK(rep.per_label[0].support == col_sum_b);
  CHECK(rep.per_label[0].recall ==
        doctest::Approx(100.0 * 2460.0 / static_cast<double>(col_sum_b)).epsilon(1e-9));

  // supports equal column sums; confusion entries sum to the total
  long total = 0;
  for (int p = 0; p < 5; ++p)
    for (int t = 0; t < 5; ++t) total += counts[p][t];
  CHECK(rep.total == total);
  long diag = 0;
  for (int c = 0; c < 5; ++c) diag += counts[c][c];
  CHECK(rep.correct == diag);
  CHECK(rep.accuracy == doctest::Approx(100.0 * diag / static_cast<double>(total)));
}

TEST_CASE("weighted F1 is invariant under label reordering") {
  LabelSet labels({"A", "B", "C"});
  std::vector<std::vector<int>> pred{{0, 1, 2, 1, 0, 2, 2}};
  std::vector<std::vector<int>> gold{{0, 1, 1, 1, 2, 2, 0}};
  auto rep = evaluate_paths(pred, gold, labels);

  LabelSet reordered({"C", "A", "B"});
  auto remap = [](const std::vector<int>& v) {
    std::vector<int> out;
    for (int x : v) out.push_back(x == 2 ? 0 : x + 1);
    return out;
  };
  auto rep2 = evaluate_paths({remap(pred[0])}, {remap(gold[0])}, reordered);
  CHECK(rep.weighted_f1 == doctest::Approx(rep2.weighted_f1).epsilon(1e-12));
  CHECK(rep.accuracy == doctest::Approx(rep2.accuracy).epsilon(1e-12));
}

TEST_CASE("zero-support labels are excluded from the weighted average and flagged") {
  LabelSet labels({"A", "B", "GHOST"});
  std::vector<std::vector<int>> pred{{0, 1, 0, 1}};
  std::vector<std::vector<int>> gold{{0, 1, 1, 1}};
  auto rep = evaluate_paths(pred, gold, labels);
  CHECK(rep.zero_division);
  CHECK(rep.per_label[2].support == 0);
  // weighted f1 equals the two-label average
  const double expect = support_weighted_mean({rep.per_label[0].f1, rep.per_label[1].f1},
                                              {rep.per_label[0].support,
                                               rep.per_label[1].support});
  CHECK(rep.weighted_f1 == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("format_report is stable and mentions the weighted F1 exactly once") {
  LabelSet labels({"YES", "NO"});
  std::vector<std::vector<int>> pred{{0, 1, 0}};
  std::vector<std::vector<int>> gold{{0, 1, 1}};
  auto rep = evaluate_paths(pred, gold, labels);
  const std::string text = format_report(rep);
  const std::string expected =
      "Label         P      R     F1  Support\n"
      "YES        50.0  100.0   66.7        1\n"
      "NO        100.0   50.0   66.7        2\n"
      "Total      83.3   66.7   66.7        3\n"
      "Accuracy   66.7\n"
      "\n"
      "Confusion (rows: predicted, columns: true)\n"
      "           Y     N\n"
      "     Y     1     1\n"
      "     N     0     1\n";
  CHECK(text == expected);

  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = text.find("Total", pos)) != std::string::npos; ++pos)
    ++count;
  CHECK(count == 1);
}

TEST_CASE("machine report round-trips at printed precision") {
  LabelSet labels({"A", "B"});
  std::vector<std::vector<int>> pred{{0, 1, 0, 0}};
  std::vector<std::vector<int>> gold{{0, 1, 1, 0}};
  auto rep = evaluate_paths(pred, gold, labels);
  auto kv = parse_machine_report(machine_report(rep));
  CHECK(kv.at("weighted_f1") == doctest::Approx(rep.weighted_f1).epsilon(1e-4));
  CHECK(kv.at("accuracy") == doctest::Approx(rep.accuracy).epsilon(1e-4));
  CHECK(kv.at("total") == rep.total);
  CHECK(kv.at("label.A.support") == rep.per_label[0].support);
  CHECK(kv.at("confusion.A.B") == 1);
  CHECK(kv.count("weighted_f1") == 1);
}

TEST_CASE("evaluate rejects mismatched path lists") {
  LabelSet labels({"A", "B"});
  CHECK_THROWS_AS(evaluate_paths({{0}}, {{0}, {1}}, labels), ContractError);
  CHECK_THROWS_AS(evaluate_paths({{0, 1}}, {{0}}, labels), ContractError);
  CHECK_THROWS_AS(evaluate_paths({{5}}, {{0}}, labels), ContractError);
}
