#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coalcheck/attacker.hpp"
#include "coalcheck/closure.hpp"
#include "coalcheck/models.hpp"
#include "coalcheck/verify.hpp"

namespace coalcheck {

// Common knobs of the batch experiments.
struct ExperimentConfig {
  unsigned depth = 1;
  FailureInference failure_inference = FailureInference::Both;
  VerifyOptions verify;
};

FailureInference parse_failure_inference(const std::string& text);
const char* to_string(FailureInference mode);

// Combination lock: F <. = n> for every code in ascending order, one
// knowledge base threaded through all of them.
struct LockRow {
  std::vector<std::string> operators;
  std::size_t properties = 0;
  std::size_t inferred = 0;
  std::size_t unknown = 0;
  std::uint64_t pairs_explored = 0;
  double elapsed_ms = 0;
};

// The eight standard operator sets, from fewest to most operators.
std::vector<std::vector<std::string>> standard_lock_operator_sets();
LockRow lock_experiment(const std::vector<std::string>& operators, const ExperimentConfig& cfg = {}, int digits = 4);

// Adding puzzle: F <c = n> from the initial state, with or without swap.
struct PuzzleRow {
  std::int64_t target = 0;
  std::int64_t max = 0;
  bool swap = false;
  Outcome outcome = Outcome::Unknown;
  std::uint64_t pairs_explored = 0;
  double elapsed_ms = 0;
};

PuzzleRow puzzle_experiment(std::int64_t target, std::int64_t max, bool swap, const ExperimentConfig& cfg = {});

// Water treatment: the obligations on the unattacked system and under each
// standard attacker, capability sets and their hierarchy.
struct SwatCell {
  std::string system;
  std::string property;
  Outcome outcome = Outcome::Unknown;
  std::uint64_t pairs_explored = 0;
  double elapsed_ms = 0;
};

struct SwatResult {
  std::vector<std::string> order;  // obligations in checking order
  std::vector<SwatCell> cells;     // system-major, in `order`
  std::vector<CapabilityReport> reports;
  Hierarchy hierarchy;
};

ClosureConfig<SwatState> swat_closure(const SwatModel& model, const ExperimentConfig& cfg);
SwatResult swat_experiment(const SwatParams& params = {}, const ExperimentConfig& cfg = {});
SwatResult swat_experiment(const SwatModel& model, const std::vector<Attacker<SwatState>>& attackers,
                           const ExperimentConfig& cfg = {});

}  // namespace coalcheck
