#pragma once

#include <map>
#include <string>
#include <vector>

#include "sentseq/data.hpp"

namespace sentseq {

struct LabelScore {
  std::string label;
  double precision = 0;  // percentages, 0..100
  double recall = 0;
  double f1 = 0;
  long support = 0;      // gold count
};

struct EvalReport {
  std::vector<LabelScore> per_label;
  double weighted_precision = 0;
  double weighted_recall = 0;
  double weighted_f1 = 0;
  double accuracy = 0;
  long total = 0;
  long correct = 0;
  bool zero_division = false;        // some label had an empty denominator
  std::vector<long> confusion;       // l*l row-major; rows: predicted, cols: true
  std::vector<std::string> labels;
};

// Per-label precision/recall/F1 plus support-weighted aggregates from
// index-aligned predicted and gold label paths.
EvalReport evaluate_paths(const std::vector<std::vector<int>>& pred,
                          const std::vector<std::vector<int>>& gold,
                          const LabelSet& labels);

// Support-weighted average; zero-weight entries are excluded.
double support_weighted_mean(const std::vector<double>& values,
                             const std::vector<long>& supports);

// Fixed-width table with one decimal, plus the confusion matrix.
std::string format_report(const EvalReport& report);

// Flat `key = value` block, one metric per line.
std::string machine_report(const EvalReport& report);
std::map<std::string, double> parse_machine_report(const std::string& text);

}  // namespace sentseq
