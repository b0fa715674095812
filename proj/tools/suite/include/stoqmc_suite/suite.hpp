#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stoqmc::suite {

struct SuiteOptions {
  /// Fewer instances and trials; the same checks and tolerance bands.
  bool quick = false;
  std::filesystem::path fixtures_dir;
  std::uint64_t seed = 20261016;
  int threads = 1;
  /// Criterion ids to run; empty means all. Determinism (11) replays only
  /// what the selected criteria recorded.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;
  nlohmann::json data;
  double seconds = 0.0;
};

/// Names of the criteria, indexed 1..11.
const std::vector<std::string>& criterion_names();

/// Runs the acceptance checks in order, calling `on_result` as each one
/// finishes. Never throws for a failing check; failures, including missing
/// or corrupted fixtures, are reported in the results.
std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

/// One line per criterion: "PASS  3 stationarity  <summary>".
std::string format_line(const CriterionResult& r);

nlohmann::json to_json(const CriterionResult& r);

}  // namespace stoqmc::suite
