#include <algorithm>
#include <cstdio>
#include <sstream>

#include "sentseq/crf.hpp"

namespace sentseq {

std::string format_transition_report(const std::vector<float>& trans,
                                     const LabelSet& labels) {
  const int l = labels.size();
  if (static_cast<int>(trans.size()) != l * l)
    throw ContractError("transition matrix size does not match label set");
  std::size_t width = 8;
  for (const auto& name : labels.names()) width = std::max(width, name.size() + 2);

  std::ostringstream out;
  auto pad_to = [&](const std::string& s) {
    out << s;
    for (std::size_t i = s.size(); i < width; ++i) out << ' ';
  };
  pad_to("");
  for (int j = 0; j < l; ++j) pad_to(labels.name(j));
  out << '\n';
  char buf[32];
  for (int i = 0; i < l; ++i) {
    pad_to(labels.name(i));
    for (int j = 0; j < l; ++j) {
      std::snprintf(buf, sizeof(buf), "%.2f", trans[static_cast<std::size_t>(i * l + j)]);
      pad_to(buf);
    }
    out << '\n';
  }
  return out.str();
}

TransitionReport parse_transition_report(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  while (std::getline(in, header) && header.find_first_not_of(" \t\r") == std::string::npos) {
  }
  TransitionReport rep;
  {
    std::istringstream hs(header);
    std::string name;
    while (hs >> name) rep.labels.push_back(name);
  }
  const int l = static_cast<int>(rep.labels.size());
  if (l == 0) throw DataError("transition report: empty header");
  rep.matrix.assign(static_cast<std::size_t>(l * l), 0.0f);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (row >= l) throw DataError("transition report: too many rows");
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    if (name != rep.labels[static_cast<std::size_t>(row)])
      throw DataError("transition report: row label '" + name + "' does not match header");
    for (int j = 0; j < l; ++j)
      if (!(ls >> rep.matrix[static_cast<std::size_t>(row * l + j)]))
        throw DataError("transition report: row '" + name + "' is short");
    ++row;
  }
  if (row != l) throw DataError("transition report: expected " + std::to_string(l) + " rows");
  return rep;
}

}  // namespace sentseq
