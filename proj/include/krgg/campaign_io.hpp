#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "krgg/experiments.hpp"

namespace krgg {

/// Output files already present and overwriting was not requested.
class OutputExistsError : public std::runtime_error {
 public:
  explicit OutputExistsError(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::ordered_json to_json(const IndexResult& r);
nlohmann::ordered_json to_json(const EnergyReport& r);
/// Scalars and certificates only; the final phases are not included.
nlohmann::ordered_json to_json(const EquilibriumReport& r);
nlohmann::ordered_json to_json(const BoundaryStats& b);
/// Everything except wall-clock time, which is not reproducible.
nlohmann::ordered_json to_json(const TrialRecord& r);

/// One TrialRecord per line.
std::string trials_jsonl(const CampaignResult& r);

/// Columns: n, epsilon, q, trials, skips, successes, rate, ci_low, ci_high,
/// mean_energy, mean_ansatz_energy. Cells without trials are omitted.
std::string summary_csv(const CampaignResult& r);

/// Mode-specific table (convergence, variance, boundary or q-sweep rows).
std::string table_csv(const CampaignResult& r);

/// cell, trial, seed, wall_time_seconds.
std::string timings_csv(const CampaignResult& r);

/// step, time, energy, grad_inf_norm.
void write_trace_csv(std::ostream& out, std::span<const TrajectorySample> trajectory);

/// Output file names written by emit_results.
std::vector<std::string> output_file_names();

/// Throws OutputExistsError when any output is present and !overwrite.
void check_output_dir(const std::filesystem::path& dir, bool overwrite);

/// Writes trials.jsonl, summary.csv, table.csv, timings.csv and
/// config.resolved.json. Each file is first written with a ".partial" suffix
/// and renamed once all of them are complete.
std::vector<std::filesystem::path> emit_results(const CampaignResult& r,
                                                const std::filesystem::path& dir, bool overwrite);

}  // namespace krgg
