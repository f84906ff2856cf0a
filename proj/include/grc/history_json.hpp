#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "grc/grc_functional.hpp"

namespace grc {

inline void to_json(nlohmann::json& j, const RepairRecord& r) {
  j = nlohmann::json{{"t", r.t}, {"cluster", r.cluster}, {"node", r.node}, {"helpers", r.helpers}, {"seed", r.seed}};
}

inline void from_json(const nlohmann::json& j, RepairRecord& r) {
  j.at("t").get_to(r.t);
  j.at("cluster").get_to(r.cluster);
  j.at("node").get_to(r.node);
  j.at("helpers").get_to(r.helpers);
  j.at("seed").get_to(r.seed);
}

/// One JSON object per line.
inline void write_history(std::ostream& os, const std::vector<RepairRecord>& history) {
  for (const auto& r : history) os << nlohmann::json(r).dump() << '\n';
}

inline std::vector<RepairRecord> read_history(std::istream& is) {
  std::vector<RepairRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(nlohmann::json::parse(line).get<RepairRecord>());
  }
  return out;
}

}  // namespace grc
