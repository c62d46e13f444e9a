#include "sentseq/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace sentseq {

double support_weighted_mean(const std::vector<double>& values,
                             const std::vector<long>& supports) {
  if (values.size() != supports.size())
    throw ContractError("weighted mean: value/weight length mismatch");
  double num = 0;
  long denom = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += values[i] * static_cast<double>(supports[i]);
    denom += supports[i];
  }
  return denom == 0 ? 0.0 : num / static_cast<double>(denom);
}

EvalReport evaluate_paths(const std::vector<std::vector<int>>& pred,
                          const std::vector<std::vector<int>>& gold,
                          const LabelSet& labels) {
  if (pred.size() != gold.size())
    throw ContractError("evaluate: " + std::to_string(pred.size()) + " predicted vs " +
                        std::to_string(gold.size()) + " gold paths");
  const int l = labels.size();
  EvalReport rep;
  rep.labels = labels.names();
  rep.confusion.assign(static_cast<std::size_t>(l) * l, 0);
  for (std::size_t a = 0; a < pred.size(); ++a) {
    if (pred[a].size() != gold[a].size())
      throw ContractError("evaluate: path length mismatch in abstract " + std::to_string(a));
    for (std::size_t i = 0; i < pred[a].size(); ++i) {
      const int p = pred[a][i], g = gold[a][i];
      if (p < 0 || p >= l || g < 0 || g >= l)
        throw ContractError("evaluate: label index out of range");
      ++rep.confusion[static_cast<std::size_t>(p * l + g)];
      ++rep.total;
      if (p == g) ++rep.correct;
    }
  }

  std::vector<double> f1s, precs, recs;
  std::vector<long> supports;
  for (int c = 0; c < l; ++c) {
    long tp = rep.confusion[static_cast<std::size_t>(c * l + c)];
    long pred_c = 0, gold_c = 0;
    for (int k = 0; k < l; ++k) {
      pred_c += rep.confusion[static_cast<std::size_t>(c * l + k)];
      gold_c += rep.confusion[static_cast<std::size_t>(k * l + c)];
    }
    LabelScore s;
    s.label = labels.name(c);
    s.support = gold_c;
    if (pred_c == 0 || gold_c == 0) rep.zero_division = true;
    s.precision = pred_c == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(pred_c);
    s.recall = gold_c == 0 ? 0.0 : 100.0 * static_cast<double>(tp) / static_cast<double>(gold_c);
    s.f1 = (s.precision + s.recall) == 0 ? 0.0
                                         : 2 * s.precision * s.recall / (s.precision + s.recall);
    rep.per_label.push_back(s);
    f1s.push_back(s.f1);
    precs.push_back(s.precision);
    recs.push_back(s.recall);
    supports.push_back(s.support);
  }
  rep.weighted_f1 = support_weighted_mean(f1s, supports);
  rep.weighted_precision = support_weighted_mean(precs, supports);
  rep.weighted_recall = support_weighted_mean(recs, supports);
  rep.accuracy = rep.total == 0 ? 0.0 : 100.0 * static_cast<double>(rep.correct) /
                                            static_cast<double>(rep.total);
  return rep;
}

namespace {

// Initial letters when unique, full names otherwise.
std::vector<std::string> display_names(const std::vector<std::string>& labels) {
  std::vector<std::string> initials;
  for (const auto& name : labels) initials.push_back(name.substr(0, 1));
  for (std::size_t i = 0; i < initials.size(); ++i)
    for (std::size_t j = i + 1; j < initials.size(); ++j)
      if (initials[i] == initials[j]) return labels;
  return initials;
}

}  // namespace

std::string format_report(const EvalReport& report) {
  std::size_t name_w = 8;
  for (const auto& s : report.per_label) name_w = std::max(name_w, s.label.size() + 2);
  std::ostringstream out;
  char buf[64];
  auto pad_name = [&](const std::string& s) {
    out << s;
    for (std::size_t i = s.size(); i < name_w; ++i) out << ' ';
  };
  pad_name("Label");
  out << "      P      R     F1  Support\n";
  for (const auto& s : report.per_label) {
    pad_name(s.label);
    std::snprintf(buf, sizeof(buf), "  %5.1f  %5.1f  %5.1f  %7ld\n", s.precision,
                  s.recall, s.f1, s.support);
    out << buf;
  }
  pad_name("Total");
  std::snprintf(buf, sizeof(buf), "  %5.1f  %5.1f  %5.1f  %7ld\n",
                report.weighted_precision, report.weighted_recall, report.weighted_f1,
                report.total);
  out << buf;
  std::snprintf(buf, sizeof(buf), "Accuracy  %5.1f\n", report.accuracy);
  out << buf;
  if (report.zero_division) out << "(some labels had zero support or zero predictions)\n";

  const int l = static_cast<int>(report.labels.size());
  const auto names = display_names(report.labels);
  std::size_t cell = 6;
  for (const auto& n : names) cell = std::max(cell, n.size() + 2);
  out << "\nConfusion (rows: predicted, columns: true)\n";
  auto pad_cell = [&](const std::string& s) {
    for (std::size_t i = s.size(); i < cell; ++i) out << ' ';
    out << s;
  };
  pad_cell("");
  for (const auto& n : names) pad_cell(n);
  out << '\n';
  for (int i = 0; i < l; ++i) {
    pad_cell(names[static_cast<std::size_t>(i)]);
    for (int j = 0; j < l; ++j)
      pad_cell(std::to_string(report.confusion[static_cast<std::size_t>(i * l + j)]));
    out << '\n';
  }
  return out.str();
}

std::string machine_report(const EvalReport& report) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  out << "total = " << report.total << "\n";
  out << "accuracy = " << num(report.accuracy) << "\n";
  out << "weighted_precision = " << num(report.weighted_precision) << "\n";
  out << "weighted_recall = " << num(report.weighted_recall) << "\n";
  out << "weighted_f1 = " << num(report.weighted_f1) << "\n";
  out << "zero_division = " << (report.zero_division ? 1 : 0) << "\n";
  for (const auto& s : report.per_label) {
    out << "label." << s.label << ".precision = " << num(s.precision) << "\n";
    out << "label." << s.label << ".recall = " << num(s.recall) << "\n";
    out << "label." << s.label << ".f1 = " << num(s.f1) << "\n";
    out << "label." << s.label << ".support = " << s.support << "\n";
  }
  const int l = static_cast<int>(report.labels.size());
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      out << "confusion." << report.labels[static_cast<std::size_t>(i)] << "."
          << report.labels[static_cast<std::size_t>(j)] << " = "
          << report.confusion[static_cast<std::size_t>(i * l + j)] << "\n";
  return out.str();
}

std::map<std::string, double> parse_machine_report(const std::string& text) {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = std::strtod(line.c_str() + eq + 3, nullptr);
  }
  return out;
}

}  // namespace sentseq
