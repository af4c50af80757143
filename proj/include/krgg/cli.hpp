#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krgg/experiments.hpp"

namespace krgg {

enum class ExitCode : int { ok = 0, usage = 1, runtime = 2, regime_abort = 3 };

/// Thrown by parse_and_validate once the diagnostics have been printed.
struct CliExit {
  ExitCode code;
};

struct CliInvocation {
  std::string subcommand;  // trial, campaign, energy, index or dump-graph
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path output_dir = "results";
  std::optional<std::filesystem::path> trace_path;
  std::optional<std::filesystem::path> dump_graph_path;
  std::optional<std::filesystem::path> state_path;
  bool overwrite = false;
  bool force = false;
  std::size_t cell_index = 0;
  std::size_t trial_index = 0;
  CampaignConfig config;  // file settings with command-line overrides applied
  std::vector<std::string> warnings;
};

/// Parses args (without the program name), loads the optional config file,
/// applies overrides, validates the config and every path, and prints regime
/// warnings to err. Throws CliExit for help (ok), usage errors (usage) and
/// regime aborts without --force (regime_abort).
CliInvocation parse_and_validate(std::span<const std::string> args, std::ostream& out,
                                 std::ostream& err);

/// Reads whitespace-separated phases; '#' starts a comment.
std::vector<double> read_phases(std::istream& in);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace krgg
