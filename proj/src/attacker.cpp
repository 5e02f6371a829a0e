#include "coalcheck/attacker.hpp"

#include <algorithm>
#include <stdexcept>

namespace coalcheck {

const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::Less: return "less";
    case Comparison::Greater: return "greater";
    case Comparison::Equal: return "equal";
    case Comparison::Incomparable: return "incomparable";
  }
  return "?";
}

Comparison compare(const CapabilityReport& a, const CapabilityReport& b) {
  std::set<std::string> ua(a.properties.begin(), a.properties.end());
  std::set<std::string> ub(b.properties.begin(), b.properties.end());
  if (ua != ub) throw std::invalid_argument("capability reports over different property sets");
  bool a_in_b = std::includes(b.capabilities.begin(), b.capabilities.end(), a.capabilities.begin(), a.capabilities.end());
  bool b_in_a = std::includes(a.capabilities.begin(), a.capabilities.end(), b.capabilities.begin(), b.capabilities.end());
  if (a_in_b && b_in_a) return Comparison::Equal;
  if (a_in_b) return Comparison::Less;
  if (b_in_a) return Comparison::Greater;
  return Comparison::Incomparable;
}

Hierarchy hierarchy(std::span<const CapabilityReport> reports) {
  Hierarchy h;
  const std::size_t n = reports.size();
  for (const auto& r : reports) h.attackers.push_back(r.attacker);
  h.matrix.assign(n, std::vector<Comparison>(n, Comparison::Equal));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h.matrix[i][j] = compare(reports[i], reports[j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (h.matrix[i][j] != Comparison::Less) continue;
      bool covered = true;
      for (std::size_t k = 0; k < n && covered; ++k) {
        covered = !(h.matrix[i][k] == Comparison::Less && h.matrix[k][j] == Comparison::Less);
      }
      if (covered) h.edges.emplace_back(reports[i].attacker, reports[j].attacker);
    }
  }
  for (const auto& r : reports) {
    for (const auto& p : r.properties) {
      auto& list = h.filters[p];
      if (r.capabilities.count(p)) list.push_back(r.attacker);
    }
  }
  return h;
}

}  // namespace coalcheck
