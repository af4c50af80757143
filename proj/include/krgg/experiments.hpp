#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krgg/flow.hpp"
#include "krgg/graph.hpp"

namespace krgg {

enum class CampaignMode { existence, convergence, boundary, q_sweep, variance };

std::string to_string(CampaignMode m);
CampaignMode campaign_mode_from_string(std::string_view name);

struct EpsilonRule {
  enum class Kind { power, explicit_list };
  Kind kind = Kind::power;
  double power = 0.7;          // eps = n^-power
  std::vector<double> values;  // crossed with every n

  static EpsilonRule with_power(double a) { return {Kind::power, a, {}}; }
  static EpsilonRule with_values(std::vector<double> v) { return {Kind::explicit_list, 0.0, std::move(v)}; }

  std::vector<double> epsilons_for(std::size_t n) const;
  /// The unused parameter of the other kind does not take part.
  friend bool operator==(const EpsilonRule& a, const EpsilonRule& b) {
    if (a.kind != b.kind) return false;
    return a.kind == Kind::power ? a.power == b.power : a.values == b.values;
  }
};

/// u(x) = q x + sum_k (a_k cos(k x) + b_k sin(k x)), k = 1, 2, ...
struct TestFunction {
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  PhaseState evaluate(const NodeSet& nodes, int q) const;
  /// (1/2pi) * integral over [0, 2pi] of |u'|^2, in closed form.
  double mean_square_slope(int q) const;
  /// (1/12pi) integral |u'|^2 = q^2/6 + sum k^2 (a_k^2 + b_k^2) / 12.
  double continuum_energy(int q) const;
  /// Expected large-n limit of the energy as normalized here:
  /// (1/24pi) integral |u'|^2, half of continuum_energy.
  double energy_limit(int q) const;

  friend bool operator==(const TestFunction&, const TestFunction&) = default;
};

struct CampaignConfig {
  CampaignMode mode = CampaignMode::existence;
  std::vector<std::size_t> n_values;
  EpsilonRule epsilon_rule;
  std::vector<int> q_values{1};
  int trials_per_cell = 100;
  // Template: rgg/kernel take epsilon from the rule. knn with k == 0 uses
  // k = round(n eps / pi); boolean with rho == 0 uses rho = eps; random-nn
  // with lo == 0 uses the constant count round(n eps / pi).
  GraphModel graph = GraphModel::rgg(0.0);
  FlowConfig flow;
  std::uint64_t master_seed = 0;
  SamplingMode sampling = SamplingMode::fixed_n;
  int workers = 1;
  bool skip_disconnected = true;
  bool restart_probe = false;
  TestFunction test_function;

  /// Structural checks, including |q| <= floor((n-1)/2) for every n.
  void validate() const;

  friend bool operator==(const CampaignConfig&, const CampaignConfig&) = default;
};

struct Cell {
  std::size_t index = 0;
  std::size_t n = 0;
  double epsilon = 0.0;
  int q = 0;
};

std::vector<Cell> enumerate_cells(const CampaignConfig& cfg);

/// The concrete graph model for one cell.
GraphModel model_for_cell(const CampaignConfig& cfg, const Cell& cell);

struct BoundaryStats {
  std::size_t probes = 0;                // adjacent consecutive pairs forced antipodal
  std::size_t nonadjacent_pairs = 0;     // consecutive pairs without an edge
  double min_energy = 0.0;               // NaN when there are no probes
  std::size_t min_probe_node = 0;        // k of the minimizing pair (k-1, k)
  double floor = 0.0;                    // 1 / (8 n eps^2)
  std::size_t exact_violations = 0;      // probes with E < pi N_{k,k-1} / (2 n^2 eps^3)
  double min_exact_margin = 0.0;         // min over probes of E - pi N / (2 n^2 eps^3)
};

struct TrialRecord {
  std::size_t cell_index = 0;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;           // requested size (Poisson intensity when poissonized)
  std::size_t node_count = 0;  // realized size
  double epsilon = 0.0;        // effective epsilon of the built graph
  int q = 0;
  bool connected = false;
  std::size_t components = 0;
  bool skipped = false;
  double ansatz_energy = 0.0;  // energy at the twisted ansatz / test function
  std::optional<EquilibriumReport> report;
  std::optional<BoundaryStats> boundary;
  std::optional<bool> restart_reconverged;
  std::optional<std::string> failure;
  bool success = false;
  double wall_time_seconds = 0.0;  // not part of the reproducible record
};

/// Per-trial random streams: (master_seed, cell, trial) -> seed.
std::uint64_t trial_seed(const CampaignConfig& cfg, const Cell& cell, std::size_t trial_index);

/// The node set and graph of one trial, drawn from its own seeded streams.
Graph trial_graph(const CampaignConfig& cfg, const Cell& cell, std::size_t trial_index);

/// Optional extras captured by run_trial for the single-trial CLI.
struct TrialCapture {
  bool record_trajectory = false;
  std::vector<TrajectorySample> trajectory;
  std::optional<Graph> graph;
  std::optional<PhaseState> final_state;
};

/// One seeded trial. Integration failures are recorded, never thrown.
TrialRecord run_trial(const CampaignConfig& cfg, const Cell& cell, std::size_t trial_index,
                      TrialCapture* capture = nullptr);

struct CellSummary {
  Cell cell;
  std::size_t trials = 0;
  std::size_t skips = 0;
  std::size_t failures = 0;
  std::size_t successes = 0;
  double rate = 0.0;  // successes / (trials - skips); NaN when no trial counted
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_energy = 0.0;
  double stddev_energy = 0.0;
  double mean_ansatz_energy = 0.0;
  double var_ansatz_energy = 0.0;  // NaN with fewer than two samples
  double continuum_value = 0.0;
  double energy_limit = 0.0;
  double min_probe_energy = 0.0;
  double probe_floor = 0.0;
  std::size_t seeds_above_floor = 0;
  std::size_t exact_violations = 0;
  double q_threshold = 0.0;  // 1 / (2 sqrt(n) eps)
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<Cell> cells;
  std::vector<TrialRecord> records;  // ordered by (cell, trial)
  std::vector<CellSummary> summaries;
};

/// 95% Wilson score interval for k successes out of m.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t m);

/// Runs all cells of the campaign on cfg.workers threads. Records are merged
/// in (cell, trial) order, so the result does not depend on scheduling.
CampaignResult run_campaign(const CampaignConfig& cfg);

std::vector<CellSummary> summarize(const CampaignConfig& cfg, const std::vector<Cell>& cells,
                                   const std::vector<TrialRecord>& records);

struct ConvergenceRow {
  std::size_t n;
  double epsilon;
  int q;
  double mean_energy;
  double stddev;
  double continuum_value;
  double energy_limit;
};

struct VarianceRow {
  std::size_t n;
  double epsilon;
  int q;
  std::size_t trials;
  std::optional<double> variance;  // missing for single-trial cells
};

struct BoundaryRow {
  std::size_t n;
  double epsilon;
  double min_probe_energy;
  double floor;
  std::size_t seeds_above_floor;
  std::size_t trials;
  std::size_t exact_violations;
};

struct QSweepRow {
  std::size_t n;
  double epsilon;
  int q;
  double threshold;
  bool below_threshold;
  double rate;
  double ci_low;
  double ci_high;
};

std::vector<ConvergenceRow> convergence_table(const CampaignResult& r);
std::vector<VarianceRow> variance_table(const CampaignResult& r);
std::vector<BoundaryRow> boundary_table(const CampaignResult& r);
std::vector<QSweepRow> q_sweep_table(const CampaignResult& r);

/// Mode-checked entry points.
CampaignResult existence_campaign(const CampaignConfig& cfg);
std::vector<ConvergenceRow> convergence_campaign(const CampaignConfig& cfg);
std::vector<VarianceRow> variance_decay_campaign(const CampaignConfig& cfg);
std::vector<BoundaryRow> boundary_campaign(const CampaignConfig& cfg);
std::vector<QSweepRow> q_sweep_campaign(const CampaignConfig& cfg);

/// Regime diagnostics for the (n, eps) pairs of a campaign: a outside (1/2, 1)
/// for power rules; n eps^2 > 1 or n eps / log n < 3 for explicit values.
std::vector<std::string> regime_warnings(const CampaignConfig& cfg);

}  // namespace krgg
