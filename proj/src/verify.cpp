#include "coalcheck/verify.hpp"

#include <algorithm>
#include <numeric>

namespace coalcheck {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Holds: return "Holds";
    case Outcome::Fails: return "Fails";
    case Outcome::InferredHolds: return "InferredHolds";
    case Outcome::InferredFails: return "InferredFails";
    case Outcome::Unknown: return "Unknown";
  }
  return "?";
}

bool is_violation(Outcome o) { return o == Outcome::Fails || o == Outcome::InferredFails; }

bool is_inferred(Outcome o) { return o == Outcome::InferredHolds || o == Outcome::InferredFails; }

std::vector<Property> order_properties(std::span<const Property> properties, const Implication& implication) {
  const std::size_t n = properties.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || properties[i].body == properties[j].body) continue;
      if (!implication.implies(properties[i].body, properties[j].body)) continue;
      succ[i].push_back(j);
      ++indegree[j];
      parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = find(i);
    if (group_of[root] == n) {
      group_of[root] = groups.size();
      groups.emplace_back();
    }
    groups[group_of[root]].push_back(i);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<Property> out;
  std::vector<bool> done(n, false);
  for (const auto& group : groups) {
    for (std::size_t emitted = 0; emitted < group.size(); ++emitted) {
      std::size_t pick = n;
      for (std::size_t i : group) {
        if (!done[i] && indegree[i] == 0) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i : group) {
          if (!done[i]) {
            pick = i;
            break;
          }
        }
      }
      done[pick] = true;
      out.push_back(properties[pick]);
      for (std::size_t j : succ[pick]) {
        if (indegree[j] > 0) --indegree[j];
      }
    }
  }
  return out;
}

bool holds_on_prefix(const BehaviourPrefix& prefix, FormulaId psi) {
  std::unordered_map<FormulaId, Predicate> obs_cache;
  auto obs_of = [&](FormulaId f) -> const Predicate& {
    auto it = obs_cache.find(f);
    if (it == obs_cache.end()) it = obs_cache.emplace(f, obs(f)).first;
    return it->second;
  };
  std::vector<std::pair<std::size_t, FormulaId>> stack{{0, psi}};
  while (!stack.empty()) {
    auto [k, f] = stack.back();
    stack.pop_back();
    const Predicate& allowed = obs_of(f);
    for (const auto& o : prefix.at_node(k)) {
      if (!member(allowed, o)) return false;
    }
    if (prefix.is_frontier(k)) continue;
    for (Input i = 0; i < prefix.input_count(); ++i) stack.emplace_back(prefix.child(k, i), next(f, i));
  }
  return true;
}

}  // namespace coalcheck
