#include "coalcheck/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace coalcheck {

namespace {

using nlohmann::ordered_json;

std::string millis(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json config_json(const ExperimentConfig& cfg) {
  return {{"closure_depth", cfg.depth},
          {"failure_inference", to_string(cfg.failure_inference)},
          {"max_pairs", cfg.verify.max_pairs}};
}

bool holds(Outcome o) { return o == Outcome::Holds || o == Outcome::InferredHolds; }

}  // namespace

std::string join(const std::vector<std::string>& parts, const std::string& separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? separator : "") + parts[i];
  return out;
}

std::string lock_csv(const std::vector<LockRow>& rows, const ReportOptions& opt) {
  std::ostringstream out;
  out << "operators,properties,inferred,unknown,pairs_explored" << (opt.timing ? ",elapsed_ms" : "") << "\n";
  for (const auto& r : rows) {
    out << csv_field(r.operators.empty() ? "none" : join(r.operators, "+")) << ',' << r.properties << ','
        << r.inferred << ',' << r.unknown << ',' << r.pairs_explored;
    if (opt.timing) out << ',' << millis(r.elapsed_ms);
    out << "\n";
  }
  return out.str();
}

std::string lock_json(const std::vector<LockRow>& rows, const ExperimentConfig& cfg, const ReportOptions& opt) {
  ordered_json doc{{"schema", kLockSchema}, {"config", config_json(cfg)}, {"rows", ordered_json::array()}};
  for (const auto& r : rows) {
    ordered_json row{{"operators", r.operators},
                     {"properties", r.properties},
                     {"inferred", r.inferred},
                     {"unknown", r.unknown},
                     {"pairs_explored", r.pairs_explored}};
    if (opt.timing) row["elapsed_ms"] = r.elapsed_ms;
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string puzzle_csv(const std::vector<PuzzleRow>& rows, const ReportOptions& opt) {
  std::ostringstream out;
  out << "target,max,swap,outcome,pairs_explored" << (opt.timing ? ",elapsed_ms" : "") << "\n";
  for (const auto& r : rows) {
    out << r.target << ',' << r.max << ',' << (r.swap ? "yes" : "no") << ',' << to_string(r.outcome) << ','
        << r.pairs_explored;
    if (opt.timing) out << ',' << millis(r.elapsed_ms);
    out << "\n";
  }
  return out.str();
}

std::string puzzle_json(const std::vector<PuzzleRow>& rows, const ExperimentConfig& cfg, const ReportOptions& opt) {
  ordered_json doc{{"schema", kPuzzleSchema}, {"config", config_json(cfg)}, {"rows", ordered_json::array()}};
  for (const auto& r : rows) {
    ordered_json row{{"target", r.target},
                     {"max", r.max},
                     {"swap", r.swap},
                     {"outcome", to_string(r.outcome)},
                     {"pairs_explored", r.pairs_explored}};
    if (opt.timing) row["elapsed_ms"] = r.elapsed_ms;
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string swat_csv(const SwatResult& result, const ReportOptions& opt) {
  std::ostringstream out;
  out << "system,property,outcome,holds,pairs_explored" << (opt.timing ? ",elapsed_ms" : "") << "\n";
  for (const auto& c : result.cells) {
    out << csv_field(c.system) << ',' << csv_field(c.property) << ',' << to_string(c.outcome) << ','
        << (holds(c.outcome) ? "true" : "false") << ',' << c.pairs_explored;
    if (opt.timing) out << ',' << millis(c.elapsed_ms);
    out << "\n";
  }
  return out.str();
}

std::string swat_json(const SwatResult& result, const ExperimentConfig& cfg, const ReportOptions& opt) {
  ordered_json doc{{"schema", kSwatSchema},
                   {"config", config_json(cfg)},
                   {"order", result.order},
                   {"cells", ordered_json::array()}};
  for (const auto& c : result.cells) {
    ordered_json cell{{"system", c.system},
                      {"property", c.property},
                      {"outcome", to_string(c.outcome)},
                      {"holds", holds(c.outcome)},
                      {"pairs_explored", c.pairs_explored}};
    if (opt.timing) cell["elapsed_ms"] = c.elapsed_ms;
    doc["cells"].push_back(std::move(cell));
  }
  doc["capabilities"] = ordered_json::parse(capabilities_json(result.reports, result.hierarchy, opt));
  return doc.dump(2) + "\n";
}

std::string capabilities_json(const std::vector<CapabilityReport>& reports, const Hierarchy& h,
                              const ReportOptions& opt) {
  ordered_json doc{{"schema", kCapabilitySchema}, {"attackers", ordered_json::array()}};
  for (const auto& r : reports) {
    ordered_json cells = ordered_json::array();
    for (const auto& c : r.cells) {
      ordered_json cell{{"attack", c.attack},
                        {"property", c.property},
                        {"outcome", to_string(c.outcome)},
                        {"pairs_explored", c.stats.pairs_explored}};
      if (opt.timing) cell["elapsed_ms"] = c.elapsed_ms;
      cells.push_back(std::move(cell));
    }
    doc["attackers"].push_back({{"name", r.attacker},
                                {"properties", r.properties},
                                {"capabilities", std::vector<std::string>(r.capabilities.begin(), r.capabilities.end())},
                                {"undetermined", r.undetermined},
                                {"cells", std::move(cells)}});
  }
  ordered_json matrix = ordered_json::object();
  for (std::size_t i = 0; i < h.attackers.size(); ++i) {
    ordered_json row = ordered_json::object();
    for (std::size_t j = 0; j < h.attackers.size(); ++j) row[h.attackers[j]] = to_string(h.matrix[i][j]);
    matrix[h.attackers[i]] = std::move(row);
  }
  ordered_json edges = ordered_json::array();
  for (const auto& [lower, upper] : h.edges) edges.push_back({{"lower", lower}, {"upper", upper}});
  ordered_json filters = ordered_json::object();
  for (const auto& [property, attackers] : h.filters) filters[property] = attackers;
  doc["hierarchy"] = {{"matrix", std::move(matrix)}, {"edges", std::move(edges)}, {"filters", std::move(filters)}};
  return doc.dump(2) + "\n";
}

std::string hierarchy_dot(const Hierarchy& h, const std::vector<CapabilityReport>& reports) {
  std::ostringstream out;
  out << "digraph capabilities {\n  rankdir=BT;\n  node [shape=box];\n";
  for (const auto& r : reports) {
    std::vector<std::string> caps(r.capabilities.begin(), r.capabilities.end());
    out << "  \"" << r.attacker << "\" [label=\"" << r.attacker << "\\n{" << join(caps, ", ") << "}\"];\n";
  }
  for (const auto& [lower, upper] : h.edges) out << "  \"" << lower << "\" -> \"" << upper << "\";\n";
  out << "}\n";
  return out.str();
}

std::string check_json(const CheckRecord& record, const ReportOptions& opt) {
  ordered_json doc{{"schema", kCheckSchema},
                   {"model", record.model},
                   {"property", record.property},
                   {"formula", record.formula},
                   {"outcome", to_string(record.outcome)},
                   {"holds", holds(record.outcome)},
                   {"pairs_explored", record.stats.pairs_explored},
                   {"closure_hits", record.stats.closure_hits},
                   {"subset_checks", record.stats.subset_checks}};
  if (!record.witness.empty()) doc["witness"] = record.witness;
  if (!record.derivation.empty()) doc["derivation"] = record.derivation;
  if (opt.timing) doc["elapsed_ms"] = record.elapsed_ms;
  return doc.dump(2) + "\n";
}

std::string check_csv(const CheckRecord& record, const ReportOptions& opt) {
  std::ostringstream out;
  out << "model,property,outcome,holds,pairs_explored,closure_hits,subset_checks,witness"
      << (opt.timing ? ",elapsed_ms" : "") << "\n";
  out << csv_field(record.model) << ',' << csv_field(record.property) << ',' << to_string(record.outcome) << ','
      << (holds(record.outcome) ? "true" : "false") << ',' << record.stats.pairs_explored << ','
      << record.stats.closure_hits << ',' << record.stats.subset_checks << ',' << csv_field(record.witness);
  if (opt.timing) out << ',' << millis(record.elapsed_ms);
  out << "\n";
  return out.str();
}

}  // namespace coalcheck
