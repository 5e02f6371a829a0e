// Command-line front end: batch experiments, ad-hoc checks and attacker
// quantification. Exit codes: 0 success, 1 some verdict Unknown, 2 bad
// configuration.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coalcheck/experiments.hpp"
#include "coalcheck/models.hpp"
#include "coalcheck/report.hpp"
#include "coalcheck/syntax.hpp"
#include "json.hpp"

using namespace coalcheck;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  unsigned depth = 1;
  std::string failure_inference = "both";
  std::uint64_t max_pairs = 10'000'000;
  std::string out = "csv";
  std::string output;
  bool no_timing = false;

  ExperimentConfig experiment() const {
    ExperimentConfig cfg;
    cfg.depth = depth;
    cfg.failure_inference = parse_failure_inference(failure_inference);
    cfg.verify.max_pairs = max_pairs;
    return cfg;
  }
  ReportOptions report() const { return {!no_timing}; }
  bool json() const { return out == "json"; }
};

struct SwatFlags {
  std::int64_t g = 5;
  double quantum = 0.01;
  double bias = 200;
  double stealth_bias = 500;

  SwatParams params() const {
    SwatParams p;
    p.g = g;
    int decimals = 0;
    double q = 1;
    while (decimals <= 6 && std::abs(q - quantum) > 1e-12 * q) {
      q /= 10;
      ++decimals;
    }
    if (decimals > 6) throw ConfigError("--quantum must be a power of ten between 1 and 1e-6");
    p.decimals = decimals;
    p.bias = bias;
    p.stealth_bias = stealth_bias;
    return p;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--closure-depth", c.depth, "Maximum operator applications per derivation")
      ->check(CLI::Range(1u, 8u));
  app->add_option("--failure-inference", c.failure_inference, "literal | image | both")
      ->check(CLI::IsMember({"literal", "image", "both"}));
  app->add_option("--max-pairs", c.max_pairs, "Explored-pair limit per verification (Unknown beyond)");
  app->add_option("--out", c.out, "Output format: csv | json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("-o,--output", c.output, "Write to this file instead of stdout");
  app->add_flag("--no-timing", c.no_timing, "Omit wall-clock columns (byte-identical reruns)");
}

void add_swat(CLI::App* app, SwatFlags& s) {
  app->add_option("--g", s.g, "Pressure factor of the hydrostatic relation")->check(CLI::PositiveNumber);
  app->add_option("--quantum", s.quantum, "Level quantum, a power of ten");
  app->add_option("--bias", s.bias, "Bias of the Bias attack, in level units");
  app->add_option("--stealth-bias", s.stealth_bias, "Bias of the Stealthy attack, in level units");
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + c.output);
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

// ---------------------------------------------------------------- state rendering

std::string render(int x) { return std::to_string(x); }

std::string render_puzzle(const PuzzleState& s) {
  auto pc = [](PuzzleState::Pc p) { return p == PuzzleState::Q ? "Q" : p == PuzzleState::R ? "R" : "S"; };
  std::ostringstream o;
  o << "((" << pc(s.pc1) << "," << s.n1 << "),(" << pc(s.pc2) << "," << s.n2 << ")," << s.c << ")";
  return o.str();
}

std::string render_swat(const SwatModel& m, const SwatState& s) {
  const auto& level = m.observations->component(0);
  const auto& pressure = m.observations->component(1);
  std::ostringstream o;
  o << "(t=" << level->format(s.t) << ",lit=" << level->format(s.lit) << ",hg=" << pressure->format(s.hg)
    << ",cmd=" << (s.command_open ? "open" : "closed") << ",valve=" << (s.valve_open ? "open" : "closed")
    << ",a=" << (s.consistent ? "true" : "false") << ")";
  return o.str();
}

template <class State, class Render>
int run_check(const std::string& model, const System<State>& sys, const State& x0, const std::string& text,
              ClosureConfig<State> cfg, const Common& c, Render render) {
  Property p = parse_property(text, sys.vocabulary(), text);
  KnowledgeBase<State> kb;
  auto r = check_property(sys, x0, p, kb, cfg, c.experiment().verify);
  CheckRecord rec;
  rec.model = model;
  rec.property = text;
  rec.formula = format_property(p, sys.vocabulary());
  rec.outcome = r.verdict.outcome;
  rec.stats = r.verdict.stats;
  if (r.verdict.witness) rec.witness = render(r.verdict.witness->state);
  if (r.verdict.derivation) rec.derivation = r.verdict.derivation->rule;
  rec.elapsed_ms = r.elapsed_ms;
  emit(c, c.json() ? check_json(rec, c.report()) : check_csv(rec, c.report()));
  return rec.outcome == Outcome::Unknown ? 1 : 0;
}

// ---------------------------------------------------------------- attacker files

struct AttackSpec {
  std::string kind;
  nlohmann::json params;
};
struct AttackerSpec {
  std::string name;
  std::vector<AttackSpec> attacks;
};

std::vector<AttackerSpec> read_attackers(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read attacker file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("attacker file " + path + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("attackers")) doc = doc["attackers"];
  if (!doc.is_array()) throw ConfigError("attacker file must hold a list of attackers");
  std::vector<AttackerSpec> out;
  for (const auto& a : doc) {
    if (!a.is_object() || !a.contains("name") || !a.contains("attacks") || !a["attacks"].is_array())
      throw ConfigError("attacker entries need a name and a list of attacks");
    AttackerSpec spec{a["name"].get<std::string>(), {}};
    for (const auto& k : a["attacks"]) {
      if (!k.is_object() || !k.contains("kind")) throw ConfigError("attacks need a kind");
      spec.attacks.push_back({k["kind"].get<std::string>(), k.value("params", nlohmann::json::object())});
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<Attacker<SwatState>> swat_attackers(const SwatModel& m, const std::vector<AttackerSpec>& specs) {
  std::vector<Attacker<SwatState>> out;
  for (const auto& s : specs) {
    Attacker<SwatState> a{s.name, {}};
    for (const auto& k : s.attacks) {
      std::optional<double> b;
      if (k.params.contains("b")) b = k.params["b"].get<double>();
      a.attacks.push_back(m.attack(k.kind, b));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Attacker<int>> dial_attackers(const DialModel& m, const std::vector<AttackerSpec>& specs) {
  std::vector<Attacker<int>> out;
  for (const auto& s : specs) {
    Attacker<int> a{s.name, {}};
    for (const auto& k : s.attacks) {
      if (k.kind == "observe_zero") a.attacks.push_back(m.observe_zero());
      else if (k.kind == "transition_to_zero") a.attacks.push_back(m.transition_to_zero());
      else if (k.kind == "skip") a.attacks.push_back(m.skip());
      else throw ConfigError("unknown dial attack kind '" + k.kind + "'");
    }
    out.push_back(std::move(a));
  }
  return out;
}

template <class State>
int run_quantify(const System<State>& sys, const State& x0, const std::vector<Property>& properties,
                 const std::vector<Attacker<State>>& attackers, const ClosureConfig<State>& cfg, const Common& c,
                 const std::string& dot) {
  std::vector<CapabilityReport> reports;
  bool unknown = false;
  for (const auto& a : attackers) {
    reports.push_back(capabilities(a, sys, x0, std::span<const Property>(properties), cfg, c.experiment().verify));
    unknown = unknown || reports.back().undetermined;
  }
  auto h = hierarchy(reports);
  emit(c, capabilities_json(reports, h, c.report()));
  if (!dot.empty()) write_file(dot, hierarchy_dot(h, reports));
  return unknown ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalgebraic safety model checker with up-to reasoning and attacker quantification"};
  app.require_subcommand(1);

  Common common;
  SwatFlags swat;

  auto* lock_cmd = app.add_subcommand("lock-experiment", "Inferred reachability properties on the combination lock");
  std::vector<std::string> lock_sets;
  int digits = 4;
  lock_cmd->add_option("--operators", lock_sets,
                       "Operator set as a comma list (shift, shift2, shift3, add, add2..add9, none); repeatable. "
                       "Default: the eight standard sets");
  lock_cmd->add_option("--digits", digits, "Number of dials")->check(CLI::Range(1, 6));
  add_common(lock_cmd, common);

  auto* puzzle_cmd = app.add_subcommand("puzzle-experiment", "Explored pairs on the adding puzzle, with and without swap");
  std::vector<std::string> rows;
  std::string swap_mode = "both";
  bool slow = false;
  puzzle_cmd->add_option("--row", rows, "Target and bound as N:MAX; repeatable. Default: 17:20 and 500:200");
  puzzle_cmd->add_option("--swap", swap_mode, "yes | no | both")->check(CLI::IsMember({"yes", "no", "both"}));
  puzzle_cmd->add_flag("--slow", slow, "Also run the long rows 637:300 and 749:400");
  add_common(puzzle_cmd, common);

  auto* swat_cmd = app.add_subcommand("swat-experiment", "Water treatment obligations under the standard attackers");
  std::string dot;
  std::string attacker_file;
  swat_cmd->add_option("--dot", dot, "Write the capability Hasse diagram as DOT to this file");
  swat_cmd->add_option("--attackers", attacker_file, "Attacker file replacing the standard attackers");
  add_swat(swat_cmd, swat);
  add_common(swat_cmd, common);

  auto* check_cmd = app.add_subcommand("check", "Check one property on a model from its initial state");
  std::string model = "dial";
  std::string property;
  std::vector<std::string> operators;
  std::int64_t max = 20;
  check_cmd->add_option("--model", model, "dial | lock | puzzle | swat")
      ->check(CLI::IsMember({"dial", "lock", "puzzle", "swat"}));
  check_cmd->add_option("--property,property", property, "Property text, e.g. \"F <. = 3>\"")->required();
  check_cmd->add_option("--operators", operators, "Comma list of operators (lock: shift.., add..; puzzle: swap)")
      ->delimiter(',');
  check_cmd->add_option("--digits", digits, "Lock dials")->check(CLI::Range(1, 6));
  check_cmd->add_option("--max", max, "Puzzle bound MAX")->check(CLI::NonNegativeNumber);
  add_swat(check_cmd, swat);
  add_common(check_cmd, common);

  auto* quantify_cmd = app.add_subcommand("quantify", "Capability sets and hierarchy of attackers");
  std::vector<std::string> properties;
  quantify_cmd->add_option("--model", model, "dial | swat")->check(CLI::IsMember({"dial", "swat"}));
  quantify_cmd->add_option("--attackers", attacker_file, "Attacker file: [{name, attacks: [{kind, params}]}]");
  quantify_cmd->add_option("--property", properties,
                           "Property text; repeatable. Default: the model's standard obligations");
  quantify_cmd->add_option("--dot", dot, "Write the Hasse diagram as DOT to this file");
  add_swat(quantify_cmd, swat);
  add_common(quantify_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*lock_cmd) {
      std::vector<std::vector<std::string>> sets;
      if (lock_sets.empty()) sets = standard_lock_operator_sets();
      for (const auto& s : lock_sets) {
        auto names = split(s, ',');
        if (names.size() == 1 && names[0] == "none") names.clear();
        for (const auto& n : names) LockModel(digits).named_operator(n);
        sets.push_back(names);
      }
      auto cfg = common.experiment();
      std::vector<LockRow> out;
      bool unknown = false;
      for (const auto& s : sets) {
        out.push_back(lock_experiment(s, cfg, digits));
        unknown = unknown || out.back().unknown > 0;
      }
      emit(common, common.json() ? lock_json(out, cfg, common.report()) : lock_csv(out, common.report()));
      return unknown ? 1 : 0;
    }

    if (*puzzle_cmd) {
      std::vector<std::pair<std::int64_t, std::int64_t>> targets;
      for (const auto& r : rows) {
        auto parts = split(r, ':');
        if (parts.size() != 2) throw ConfigError("--row expects N:MAX, got '" + r + "'");
        try {
          targets.emplace_back(std::stoll(parts[0]), std::stoll(parts[1]));
        } catch (const std::exception&) {
          throw ConfigError("--row expects integers, got '" + r + "'");
        }
      }
      if (rows.empty()) targets = {{17, 20}, {500, 200}};
      if (slow) {
        targets.emplace_back(637, 300);
        targets.emplace_back(749, 400);
      }
      auto cfg = common.experiment();
      std::vector<PuzzleRow> out;
      bool unknown = false;
      for (auto [n, m] : targets) {
        for (bool s : {false, true}) {
          if ((s && swap_mode == "no") || (!s && swap_mode == "yes")) continue;
          out.push_back(puzzle_experiment(n, m, s, cfg));
          unknown = unknown || out.back().outcome == Outcome::Unknown;
        }
      }
      emit(common, common.json() ? puzzle_json(out, cfg, common.report()) : puzzle_csv(out, common.report()));
      return unknown ? 1 : 0;
    }

    if (*swat_cmd) {
      SwatModel m(swat.params());
      auto attackers = attacker_file.empty() ? m.standard_attackers() : swat_attackers(m, read_attackers(attacker_file));
      auto cfg = common.experiment();
      auto result = swat_experiment(m, attackers, cfg);
      emit(common, common.json() ? swat_json(result, cfg, common.report()) : swat_csv(result, common.report()));
      if (!dot.empty()) write_file(dot, hierarchy_dot(result.hierarchy, result.reports));
      bool unknown = false;
      for (const auto& c : result.cells) unknown = unknown || c.outcome == Outcome::Unknown;
      return unknown ? 1 : 0;
    }

    if (*check_cmd) {
      if (model == "dial") {
        if (!operators.empty()) throw ConfigError("the dial has no operators");
        DialModel d;
        ClosureConfig<int> cfg;
        cfg.depth = common.depth;
        cfg.failure_inference = common.experiment().failure_inference;
        return run_check(model, d.system(), d.initial(), property, cfg, common, [](int x) { return render(x); });
      }
      if (model == "lock") {
        LockModel l(digits);
        ClosureConfig<LockModel::State> cfg;
        for (const auto& n : operators) cfg.operators.push_back(l.named_operator(n));
        cfg.depth = common.depth;
        cfg.failure_inference = common.experiment().failure_inference;
        return run_check(model, l.system(), l.initial(), property, cfg, common,
                         [&](LockModel::State x) { return l.observations->format(static_cast<Value>(x)); });
      }
      if (model == "puzzle") {
        PuzzleModel p(max);
        ClosureConfig<PuzzleState> cfg;
        for (const auto& n : operators) {
          if (n != "swap") throw ConfigError("unknown puzzle operator '" + n + "'");
          cfg.operators.push_back(p.swap_operator());
        }
        cfg.depth = common.depth;
        cfg.failure_inference = common.experiment().failure_inference;
        return run_check(model, p.system(), p.initial(), property, cfg, common, render_puzzle);
      }
      SwatModel m(swat.params());
      if (!operators.empty()) throw ConfigError("the water treatment model has no operators");
      return run_check(model, m.system(), m.initial(), property, swat_closure(m, common.experiment()), common,
                       [&](const SwatState& s) { return render_swat(m, s); });
    }

    if (*quantify_cmd) {
      if (model == "swat") {
        SwatModel m(swat.params());
        auto attackers =
            attacker_file.empty() ? m.standard_attackers() : swat_attackers(m, read_attackers(attacker_file));
        auto cfg = swat_closure(m, common.experiment());
        std::vector<Property> props;
        if (properties.empty()) {
          props = order_properties(m.obligations(), cfg.implication);
        } else {
          for (const auto& t : properties) props.push_back(parse_property(t, m.system().vocabulary(), t));
        }
        return run_quantify(m.system(), m.initial(), props, attackers, cfg, common, dot);
      }
      DialModel d;
      if (attacker_file.empty()) throw ConfigError("quantify on the dial needs --attackers");
      auto attackers = dial_attackers(d, read_attackers(attacker_file));
      std::vector<Property> props;
      if (properties.empty()) {
        for (int n = 0; n < 10; ++n) props.push_back(d.reach(n));
      } else {
        for (const auto& t : properties) props.push_back(parse_property(t, d.system().vocabulary(), t));
      }
      ClosureConfig<int> cfg;
      cfg.depth = common.depth;
      cfg.failure_inference = common.experiment().failure_inference;
      return run_quantify(d.system(), d.initial(), props, attackers, cfg, common, dot);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
