#pragma once

#include <string>
#include <vector>

#include "coalcheck/attacker.hpp"
#include "coalcheck/experiments.hpp"

namespace coalcheck {

// Output schemas. CSV files start with a header row; JSON documents carry a
// "schema" member. Timing columns are omitted when timing is false so that
// repeated runs produce identical bytes.
inline constexpr const char* kLockSchema = "coalcheck.lock/1";
inline constexpr const char* kPuzzleSchema = "coalcheck.puzzle/1";
inline constexpr const char* kSwatSchema = "coalcheck.swat/1";
inline constexpr const char* kCheckSchema = "coalcheck.check/1";
inline constexpr const char* kCapabilitySchema = "coalcheck.capabilities/1";

struct ReportOptions {
  bool timing = true;
};

std::string lock_csv(const std::vector<LockRow>& rows, const ReportOptions& opt = {});
std::string lock_json(const std::vector<LockRow>& rows, const ExperimentConfig& cfg, const ReportOptions& opt = {});

std::string puzzle_csv(const std::vector<PuzzleRow>& rows, const ReportOptions& opt = {});
std::string puzzle_json(const std::vector<PuzzleRow>& rows, const ExperimentConfig& cfg,
                        const ReportOptions& opt = {});

std::string swat_csv(const SwatResult& result, const ReportOptions& opt = {});
std::string swat_json(const SwatResult& result, const ExperimentConfig& cfg, const ReportOptions& opt = {});

std::string capabilities_json(const std::vector<CapabilityReport>& reports, const Hierarchy& h,
                              const ReportOptions& opt = {});
// Hasse diagram of the capability order; edges point from weaker to
// stronger attackers.
std::string hierarchy_dot(const Hierarchy& h, const std::vector<CapabilityReport>& reports);

// One verdict of the check subcommand.
struct CheckRecord {
  std::string model;
  std::string property;
  std::string formula;
  Outcome outcome = Outcome::Unknown;
  Stats stats;
  std::string witness;     // rendered state, empty when absent
  std::string derivation;  // inference rule, empty when absent
  double elapsed_ms = 0;
};

std::string check_json(const CheckRecord& record, const ReportOptions& opt = {});
std::string check_csv(const CheckRecord& record, const ReportOptions& opt = {});

std::string join(const std::vector<std::string>& parts, const std::string& separator);

}  // namespace coalcheck
