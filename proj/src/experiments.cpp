#include "coalcheck/experiments.hpp"

#include <chrono>
#include <stdexcept>

namespace coalcheck {

namespace {

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

FailureInference parse_failure_inference(const std::string& text) {
  if (text == "literal") return FailureInference::Literal;
  if (text == "image") return FailureInference::Image;
  if (text == "both") return FailureInference::Both;
  throw std::invalid_argument("unknown failure-inference mode '" + text + "'");
}

const char* to_string(FailureInference mode) {
  switch (mode) {
    case FailureInference::Literal: return "literal";
    case FailureInference::Image: return "image";
    case FailureInference::Both: return "both";
  }
  return "?";
}

std::vector<std::vector<std::string>> standard_lock_operator_sets() {
  std::vector<std::string> all_adds{"shift", "shift2", "shift3"};
  all_adds.push_back("add");
  for (int k = 2; k <= 9; ++k) all_adds.push_back("add" + std::to_string(k));
  return {{"shift"},
          {"add"},
          {"shift", "add"},
          {"shift", "shift2"},
          {"shift", "shift2", "shift3"},
          {"shift", "shift2", "shift3", "add"},
          {"shift", "shift2", "shift3", "add", "add2"},
          all_adds};
}

LockRow lock_experiment(const std::vector<std::string>& operators, const ExperimentConfig& cfg, int digits) {
  LockModel lock(digits);
  ClosureConfig<LockModel::State> closure;
  for (const auto& name : operators) closure.operators.push_back(lock.named_operator(name));
  closure.depth = cfg.depth;
  closure.failure_inference = cfg.failure_inference;
  auto properties = lock.reach_all();
  auto t0 = std::chrono::steady_clock::now();
  KnowledgeBase<LockModel::State> kb;
  auto summary = check_many(lock.system(), lock.initial(), std::span<const Property>(properties), kb, closure,
                            cfg.verify);
  LockRow row;
  row.operators = operators;
  row.properties = properties.size();
  row.inferred = summary.inferred;
  row.unknown = summary.unknown;
  for (const auto& r : summary.results) row.pairs_explored += r.verdict.stats.pairs_explored;
  row.elapsed_ms = since(t0);
  return row;
}

PuzzleRow puzzle_experiment(std::int64_t target, std::int64_t max, bool swap, const ExperimentConfig& cfg) {
  PuzzleModel puzzle(max);
  ClosureConfig<PuzzleState> closure;
  if (swap) closure.operators.push_back(puzzle.swap_operator());
  closure.depth = cfg.depth;
  closure.failure_inference = cfg.failure_inference;
  KnowledgeBase<PuzzleState> kb;
  auto r = check_property(puzzle.system(), puzzle.initial(), puzzle.reach(target), kb, closure, cfg.verify);
  return {target, max, swap, r.verdict.outcome, r.verdict.stats.pairs_explored, r.elapsed_ms};
}

ClosureConfig<SwatState> swat_closure(const SwatModel& model, const ExperimentConfig& cfg) {
  ClosureConfig<SwatState> closure;
  closure.implication = model.implication();
  closure.depth = cfg.depth;
  closure.failure_inference = cfg.failure_inference;
  return closure;
}

SwatResult swat_experiment(const SwatParams& params, const ExperimentConfig& cfg) {
  SwatModel model(params);
  return swat_experiment(model, model.standard_attackers(), cfg);
}

SwatResult swat_experiment(const SwatModel& model, const std::vector<Attacker<SwatState>>& attackers,
                           const ExperimentConfig& cfg) {
  auto closure = swat_closure(model, cfg);
  auto obligations = model.obligations();
  auto ordered = order_properties(obligations, closure.implication);
  SwatResult out;
  for (const auto& p : ordered) out.order.push_back(p.name);

  auto sys = model.system();
  KnowledgeBase<SwatState> kb;
  auto base = check_many(sys, model.initial(), std::span<const Property>(ordered), kb, closure, cfg.verify);
  for (const auto& r : base.results)
    out.cells.push_back({"unattacked", r.property.name, r.verdict.outcome, r.verdict.stats.pairs_explored,
                         r.elapsed_ms});

  for (const auto& attacker : attackers) {
    auto report = capabilities(attacker, sys, model.initial(), std::span<const Property>(ordered), closure, cfg.verify);
    for (const auto& c : report.cells) {
      std::string system = attacker.attacks.size() == 1 ? attacker.name : attacker.name + "/" + c.attack;
      out.cells.push_back({system, c.property, c.outcome, c.stats.pairs_explored, c.elapsed_ms});
    }
    out.reports.push_back(std::move(report));
  }
  out.hierarchy = hierarchy(out.reports);
  return out;
}

}  // namespace coalcheck
