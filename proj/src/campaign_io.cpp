#include "krgg/campaign_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "krgg/config.hpp"
#include "krgg/format.hpp"

namespace krgg {

namespace {

// Missing values (NaN) are written as empty CSV fields.
std::string csv_num(double x) { return std::isnan(x) ? std::string() : format_double(x); }

nlohmann::ordered_json num_or_null(double x) {
  return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json to_json(const IndexResult& r) {
  nlohmann::ordered_json j;
  j["value"] = r.value ? nlohmann::ordered_json(*r.value) : nlohmann::ordered_json("UNDEFINED");
  j["min_gap_to_antipodal"] = num_or_null(r.min_gap_to_antipodal);
  if (r.residual > 0.0) j["residual"] = r.residual;
  return j;
}

nlohmann::ordered_json to_json(const EnergyReport& r) {
  nlohmann::ordered_json j;
  j["energy"] = r.energy;
  j["grad_inf_norm"] = r.grad_inf_norm;
  j["scaling_factor"] = r.scaling_factor;
  return j;
}

nlohmann::ordered_json to_json(const EquilibriumReport& r) {
  nlohmann::ordered_json j;
  j["terminated"] = to_string(r.terminated);
  j["initial_energy"] = r.initial_energy;
  j["final_energy"] = r.final_energy;
  j["grad_inf_norm"] = r.grad_inf_norm;
  j["initial_index"] = to_json(r.initial_index);
  j["index"] = to_json(r.index);
  j["stable_pi_half"] = r.stable_pi_half;
  if (r.min_eigenvalue) {
    j["min_eigenvalue"] = r.min_eigenvalue->converged ? nlohmann::ordered_json(r.min_eigenvalue->value)
                                                      : nlohmann::ordered_json("not_converged");
  } else {
    j["min_eigenvalue"] = "not_computed";
  }
  j["steps"] = r.steps;
  j["rejected_steps"] = r.rejected_steps;
  j["simulated_time"] = r.simulated_time;
  j["graph_connected"] = r.graph_connected;
  j["energy_monotone"] = r.energy_monotone;
  j["mean_phase_drift_rate"] = r.mean_phase_drift_rate;
  j["index_constant"] = r.index_constant;
  j["min_gap_to_antipodal"] = num_or_null(r.min_gap_to_antipodal);
  return j;
}

nlohmann::ordered_json to_json(const BoundaryStats& b) {
  nlohmann::ordered_json j;
  j["probes"] = b.probes;
  j["nonadjacent_pairs"] = b.nonadjacent_pairs;
  j["min_energy"] = num_or_null(b.min_energy);
  j["min_probe_node"] = b.min_probe_node;
  j["floor"] = b.floor;
  j["exact_violations"] = b.exact_violations;
  j["min_exact_margin"] = num_or_null(b.min_exact_margin);
  return j;
}

nlohmann::ordered_json to_json(const TrialRecord& r) {
  nlohmann::ordered_json j;
  j["cell"] = r.cell_index;
  j["trial"] = r.trial_index;
  j["seed"] = r.seed;
  j["n"] = r.n;
  j["node_count"] = r.node_count;
  j["epsilon"] = r.epsilon;
  j["q"] = r.q;
  j["connected"] = r.connected;
  j["components"] = r.components;
  j["skipped"] = r.skipped;
  j["ansatz_energy"] = r.ansatz_energy;
  j["success"] = r.success;
  if (r.report) j["report"] = to_json(*r.report);
  if (r.boundary) j["boundary"] = to_json(*r.boundary);
  if (r.restart_reconverged) j["restart_reconverged"] = *r.restart_reconverged;
  if (r.failure) j["failure"] = *r.failure;
  return j;
}

std::string trials_jsonl(const CampaignResult& r) {
  std::string out;
  for (const TrialRecord& rec : r.records) {
    out += to_json(rec).dump();
    out += '\n';
  }
  return out;
}

std::string summary_csv(const CampaignResult& r) {
  std::ostringstream out;
  out << "n,epsilon,q,trials,skips,successes,rate,ci_low,ci_high,mean_energy,mean_ansatz_energy\n";
  for (const CellSummary& s : r.summaries) {
    if (s.trials == 0) continue;
    out << s.cell.n << ',' << csv_num(s.cell.epsilon) << ',' << s.cell.q << ',' << s.trials << ','
        << s.skips << ',' << s.successes << ',' << csv_num(s.rate) << ',' << csv_num(s.ci_low)
        << ',' << csv_num(s.ci_high) << ',' << csv_num(s.mean_energy) << ','
        << csv_num(s.mean_ansatz_energy) << '\n';
  }
  return out.str();
}

std::string table_csv(const CampaignResult& r) {
  std::ostringstream out;
  switch (r.config.mode) {
    case CampaignMode::existence:
    case CampaignMode::q_sweep:
      out << "n,epsilon,q,threshold,below_threshold,rate,ci_low,ci_high\n";
      for (const auto& row : q_sweep_table(r)) {
        out << row.n << ',' << csv_num(row.epsilon) << ',' << row.q << ',' << csv_num(row.threshold)
            << ',' << (row.below_threshold ? 1 : 0) << ',' << csv_num(row.rate) << ','
            << csv_num(row.ci_low) << ',' << csv_num(row.ci_high) << '\n';
      }
      break;
    case CampaignMode::convergence:
      out << "n,epsilon,q,mean_energy,stddev,continuum_value,energy_limit\n";
      for (const auto& row : convergence_table(r)) {
        out << row.n << ',' << csv_num(row.epsilon) << ',' << row.q << ','
            << csv_num(row.mean_energy) << ',' << csv_num(row.stddev) << ','
            << csv_num(row.continuum_value) << ',' << csv_num(row.energy_limit) << '\n';
      }
      break;
    case CampaignMode::variance:
      out << "n,epsilon,q,trials,variance\n";
      for (const auto& row : variance_table(r)) {
        out << row.n << ',' << csv_num(row.epsilon) << ',' << row.q << ',' << row.trials << ','
            << (row.variance ? csv_num(*row.variance) : std::string()) << '\n';
      }
      break;
    case CampaignMode::boundary:
      out << "n,epsilon,min_probe_energy,floor,seeds_above_floor,trials,exact_violations\n";
      for (const auto& row : boundary_table(r)) {
        out << row.n << ',' << csv_num(row.epsilon) << ',' << csv_num(row.min_probe_energy) << ','
            << csv_num(row.floor) << ',' << row.seeds_above_floor << ',' << row.trials << ','
            << row.exact_violations << '\n';
      }
      break;
  }
  return out.str();
}

std::string timings_csv(const CampaignResult& r) {
  std::ostringstream out;
  out << "cell,trial,seed,wall_time_seconds\n";
  for (const TrialRecord& rec : r.records) {
    out << rec.cell_index << ',' << rec.trial_index << ',' << rec.seed << ','
        << format_double(rec.wall_time_seconds) << '\n';
  }
  return out.str();
}

void write_trace_csv(std::ostream& out, std::span<const TrajectorySample> trajectory) {
  out << "step,time,energy,grad_inf_norm\n";
  for (const auto& s : trajectory) {
    out << s.step << ',' << format_double(s.time) << ',' << format_double(s.energy) << ','
        << format_double(s.grad_inf_norm) << '\n';
  }
}

std::vector<std::string> output_file_names() {
  return {"trials.jsonl", "summary.csv", "table.csv", "timings.csv", "config.resolved.json"};
}

void check_output_dir(const std::filesystem::path& dir, bool overwrite) {
  namespace fs = std::filesystem;
  if (fs::exists(dir) && !fs::is_directory(dir)) {
    throw OutputExistsError("output path " + dir.string() + " exists and is not a directory");
  }
  if (overwrite) return;
  for (const auto& name : output_file_names()) {
    if (fs::exists(dir / name)) {
      throw OutputExistsError("refusing to overwrite " + (dir / name).string() +
                              " (pass --overwrite)");
    }
  }
}

std::vector<std::filesystem::path> emit_results(const CampaignResult& r,
                                                const std::filesystem::path& dir, bool overwrite) {
  namespace fs = std::filesystem;
  check_output_dir(dir, overwrite);
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::string>> files = {
      {"trials.jsonl", trials_jsonl(r)},
      {"summary.csv", summary_csv(r)},
      {"table.csv", table_csv(r)},
      {"timings.csv", timings_csv(r)},
      {"config.resolved.json", config_to_json(r.config).dump(2) + "\n"},
  };
  std::vector<fs::path> written;
  for (const auto& [name, content] : files) {
    const fs::path partial = dir / (name + ".partial");
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + partial.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("write failed for " + partial.string());
  }
  for (const auto& [name, content] : files) {
    const fs::path final_path = dir / name;
    std::error_code ec;
    fs::rename(dir / (name + ".partial"), final_path, ec);
    if (ec) {
      throw std::runtime_error("cannot rename " + (dir / (name + ".partial")).string() + ": " +
                               ec.message());
    }
    written.push_back(final_path);
  }
  return written;
}

}  // namespace krgg
