#include "krgg/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "krgg/campaign_io.hpp"
#include "krgg/config.hpp"
#include "krgg/winding.hpp"

namespace krgg {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct RawOptions {
  std::optional<std::string> config;
  std::optional<std::string> mode;
  std::vector<std::string> n;
  std::optional<std::string> eps_power;
  std::vector<std::string> eps;
  std::vector<std::string> q;
  std::optional<std::string> trials;
  std::optional<std::string> seed;
  std::optional<std::string> workers;
  std::optional<std::string> grad_tol;
  std::optional<std::string> max_steps;
  std::optional<std::string> variant;
  std::optional<std::string> k;
  std::optional<std::string> rho;
  std::optional<std::string> count_lo;
  std::optional<std::string> count_hi;
  std::optional<std::string> sampling;
  bool no_skip_disconnected = false;
  bool restart_probe = false;
  bool eigenvalue = false;
  std::optional<std::string> output_dir;
  std::optional<std::string> trace;
  std::optional<std::string> dump_graph;
  std::optional<std::string> state;
  std::size_t cell = 0;
  std::size_t trial = 0;
  bool overwrite = false;
  bool force = false;
};

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) s += ',';
    s += parts[i];
  }
  return s;
}

void add_config_options(CLI::App* sub, RawOptions& o) {
  sub->add_option("--config", o.config, "Config file (key = value lines or a flat JSON object)");
  sub->add_option("--mode", o.mode, "existence, convergence, variance, boundary or q-sweep");
  sub->add_option("--n", o.n, "Node count (repeatable or comma-separated)");
  auto* power = sub->add_option("--eps-power", o.eps_power, "Use eps = n^-a");
  auto* eps = sub->add_option("--eps", o.eps, "Explicit eps values (repeatable)");
  power->excludes(eps);
  sub->add_option("--q", o.q, "Winding numbers (repeatable)");
  sub->add_option("--trials", o.trials, "Trials per cell");
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--workers", o.workers, "Worker threads");
  sub->add_option("--grad-tol", o.grad_tol, "Convergence threshold on the gradient sup-norm");
  sub->add_option("--max-steps", o.max_steps, "Step budget of the flow");
  sub->add_option("--variant", o.variant, "rgg, knn, boolean, random-nn or kernel");
  sub->add_option("--k", o.k, "Neighbor count of the knn variant");
  sub->add_option("--rho", o.rho, "Radius bound of the boolean variant");
  sub->add_option("--count-lo", o.count_lo, "Smallest neighbor count of random-nn");
  sub->add_option("--count-hi", o.count_hi, "Largest neighbor count of random-nn");
  sub->add_option("--sampling", o.sampling, "fixed or poissonized");
  sub->add_flag("--no-skip-disconnected", o.no_skip_disconnected,
                "Integrate on disconnected graphs instead of skipping them");
  sub->add_flag("--restart-probe", o.restart_probe, "Perturb and re-integrate converged states");
  sub->add_flag("--eigenvalue", o.eigenvalue, "Compute the minimum Hessian eigenvalue");
  sub->add_flag("--force", o.force, "Run even when the (n, eps) pairs leave the regime");
}

void add_sample_options(CLI::App* sub, RawOptions& o) {
  sub->add_option("--cell", o.cell, "Cell index within the resolved grid");
  sub->add_option("--trial", o.trial, "Trial index within the cell");
}

std::vector<std::pair<std::string, std::string>> overrides(const RawOptions& o) {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto put = [&](const char* key, const std::optional<std::string>& v) {
    if (v) kv.emplace_back(key, *v);
  };
  put("mode", o.mode);
  if (!o.n.empty()) kv.emplace_back("n", join(o.n));
  put("eps_power", o.eps_power);
  if (!o.eps.empty()) kv.emplace_back("eps", join(o.eps));
  if (!o.q.empty()) kv.emplace_back("q", join(o.q));
  put("trials", o.trials);
  put("seed", o.seed);
  put("workers", o.workers);
  put("grad_tol", o.grad_tol);
  put("max_steps", o.max_steps);
  put("variant", o.variant);
  put("k", o.k);
  put("rho", o.rho);
  put("count_lo", o.count_lo);
  put("count_hi", o.count_hi);
  put("sampling", o.sampling);
  if (o.no_skip_disconnected) kv.emplace_back("skip_disconnected", "false");
  if (o.restart_probe) kv.emplace_back("restart_probe", "true");
  if (o.eigenvalue) kv.emplace_back("compute_eigenvalue", "true");
  return kv;
}

[[noreturn]] void usage_error(std::ostream& err, const std::string& what) {
  err << "error: " << what << '\n';
  throw CliExit{ExitCode::usage};
}

void check_output_file(std::ostream& err, const fs::path& p, bool overwrite, const char* flag) {
  const fs::path parent = p.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    usage_error(err, std::string(flag) + ": directory " + parent.string() + " does not exist");
  }
  if (fs::is_directory(p)) usage_error(err, std::string(flag) + ": " + p.string() + " is a directory");
  if (fs::exists(p) && !overwrite) {
    usage_error(err, std::string(flag) + ": refusing to overwrite " + p.string() +
                         " (pass --overwrite)");
  }
}

Cell select_cell(const CliInvocation& inv) {
  const auto cells = enumerate_cells(inv.config);
  if (inv.cell_index >= cells.size()) {
    throw std::out_of_range("cell index " + std::to_string(inv.cell_index) + " out of range (" +
                            std::to_string(cells.size()) + " cells)");
  }
  return cells[inv.cell_index];
}

PhaseState load_or_ansatz(const CliInvocation& inv, const Graph& g, int q) {
  if (!inv.state_path) return twisted_ansatz(g.nodes(), q);
  std::ifstream in(*inv.state_path);
  if (!in) throw std::runtime_error("cannot open " + inv.state_path->string());
  PhaseState u{read_phases(in)};
  if (u.phases.size() != g.size()) {
    throw std::runtime_error(inv.state_path->string() + ": " + std::to_string(u.phases.size()) +
                             " phases for a graph with " + std::to_string(g.size()) + " nodes");
  }
  return u;
}

Json sample_header(const CliInvocation& inv, const Cell& cell, const Graph& g) {
  Json j;
  j["cell"] = cell.index;
  j["trial"] = inv.trial_index;
  j["seed"] = trial_seed(inv.config, cell, inv.trial_index);
  j["n"] = cell.n;
  j["node_count"] = g.size();
  j["epsilon"] = g.epsilon();
  j["variant"] = to_string(g.model().variant);
  if (inv.state_path) {
    j["state"] = inv.state_path->string();
  } else {
    j["q"] = cell.q;
  }
  return j;
}

void write_graph_file(const fs::path& p, const Graph& g) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  write_graph(out, g);
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

void run_trial_command(const CliInvocation& inv, std::ostream& out) {
  const Cell cell = select_cell(inv);
  TrialCapture capture;
  capture.record_trajectory = inv.trace_path.has_value();
  const TrialRecord rec = run_trial(inv.config, cell, inv.trial_index, &capture);
  if (inv.trace_path) {
    std::ofstream trace(*inv.trace_path, std::ios::binary | std::ios::trunc);
    if (!trace) throw std::runtime_error("cannot open " + inv.trace_path->string());
    write_trace_csv(trace, capture.trajectory);
  }
  if (inv.dump_graph_path && capture.graph) write_graph_file(*inv.dump_graph_path, *capture.graph);
  out << to_json(rec).dump() << '\n';
}

void run_campaign_command(const CliInvocation& inv, std::ostream& out) {
  const CampaignResult result = run_campaign(inv.config);
  emit_results(result, inv.output_dir, inv.overwrite);
  out << summary_csv(result);
}

void run_energy_command(const CliInvocation& inv, std::ostream& out) {
  const Cell cell = select_cell(inv);
  const Graph g = trial_graph(inv.config, cell, inv.trial_index);
  const PhaseState u = load_or_ansatz(inv, g, cell.q);
  Json j = sample_header(inv, cell, g);
  const Json report = to_json(evaluate(g, u));
  for (const auto& [key, value] : report.items()) j[key] = value;
  j["pi_half_certificate"] = pi_half_certificate(g, u);
  out << j.dump() << '\n';
}

void run_index_command(const CliInvocation& inv, std::ostream& out) {
  const Cell cell = select_cell(inv);
  const Graph g = trial_graph(inv.config, cell, inv.trial_index);
  const PhaseState u = load_or_ansatz(inv, g, cell.q);
  Json j = sample_header(inv, cell, g);
  j["index"] = to_json(winding_index(g.nodes(), u, inv.config.flow.antipodal_tol));
  out << j.dump() << '\n';
}

void run_dump_graph_command(const CliInvocation& inv, std::ostream& out) {
  const Cell cell = select_cell(inv);
  const Graph g = trial_graph(inv.config, cell, inv.trial_index);
  if (inv.dump_graph_path) {
    write_graph_file(*inv.dump_graph_path, g);
  } else {
    write_graph(out, g);
  }
}

}  // namespace

std::vector<double> read_phases(std::istream& in) {
  std::vector<double> phases;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": '" + tok +
                                 "' is not a number");
      }
      phases.push_back(v);
    }
  }
  return phases;
}

CliInvocation parse_and_validate(std::span<const std::string> args, std::ostream& out,
                                 std::ostream& err) {
  CLI::App app{"Kuramoto gradient flow on random geometric graphs of the circle", "krgg"};
  app.require_subcommand(1);
  app.fallthrough(false);
  RawOptions o;

  auto* trial = app.add_subcommand("trial", "Run one seeded trial and print its record");
  auto* campaign = app.add_subcommand("campaign", "Run a campaign and write its result files");
  auto* energy_cmd = app.add_subcommand("energy", "Energy of the twisted ansatz or a given state");
  auto* index_cmd = app.add_subcommand("index", "Winding index of the twisted ansatz or a given state");
  auto* dump = app.add_subcommand("dump-graph", "Write the graph of one trial");
  for (auto* sub : {trial, campaign, energy_cmd, index_cmd, dump}) add_config_options(sub, o);
  for (auto* sub : {trial, energy_cmd, index_cmd, dump}) add_sample_options(sub, o);
  trial->add_option("--trace", o.trace, "CSV of (step, time, energy, grad_inf_norm)");
  trial->add_option("--dump-graph", o.dump_graph, "Write the sampled graph to this file");
  dump->add_option("--dump-graph,-o", o.dump_graph, "Output file (stdout when absent)");
  for (auto* sub : {energy_cmd, index_cmd}) {
    sub->add_option("--state", o.state, "File with one phase per node");
  }
  campaign->add_option("--output-dir", o.output_dir, "Directory for the result files");
  for (auto* sub : {trial, campaign, dump}) {
    sub->add_flag("--overwrite", o.overwrite, "Replace existing output files");
  }

  std::vector<const char*> argv{"krgg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    throw CliExit{code == 0 ? ExitCode::ok : ExitCode::usage};
  }

  CliInvocation inv;
  inv.subcommand = app.get_subcommands().front()->get_name();
  inv.overwrite = o.overwrite;
  inv.force = o.force;
  inv.cell_index = o.cell;
  inv.trial_index = o.trial;
  if (o.output_dir) inv.output_dir = *o.output_dir;
  if (o.trace) inv.trace_path = *o.trace;
  if (o.dump_graph) inv.dump_graph_path = *o.dump_graph;
  if (o.state) inv.state_path = *o.state;

  try {
    if (o.config) {
      inv.config_path = *o.config;
      if (!fs::is_regular_file(*inv.config_path)) {
        usage_error(err, "--config: " + inv.config_path->string() + " is not a readable file");
      }
      inv.config = load_config_file(*inv.config_path);
    }
    const auto kv = overrides(o);
    for (const auto& [key, value] : kv) {
      // An explicit eps-rule flag replaces the rule from the file.
      apply_setting(inv.config, key, value);
    }
    inv.config.validate();
  } catch (const ConfigError& e) {
    usage_error(err, "config key '" + e.key() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    usage_error(err, e.what());
  } catch (const DomainError& e) {
    usage_error(err, e.what());
  }

  if (inv.state_path && !fs::is_regular_file(*inv.state_path)) {
    usage_error(err, "--state: " + inv.state_path->string() + " is not a readable file");
  }
  if (inv.trace_path) check_output_file(err, *inv.trace_path, inv.overwrite, "--trace");
  if (inv.dump_graph_path) check_output_file(err, *inv.dump_graph_path, inv.overwrite, "--dump-graph");
  if (inv.subcommand == "campaign") {
    try {
      check_output_dir(inv.output_dir, inv.overwrite);
    } catch (const OutputExistsError& e) {
      usage_error(err, e.what());
    }
  } else if (inv.cell_index >= enumerate_cells(inv.config).size()) {
    usage_error(err, "--cell " + std::to_string(inv.cell_index) + " is out of range");
  }

  inv.warnings = regime_warnings(inv.config);
  for (const auto& w : inv.warnings) err << "warning: " << w << '\n';
  if (!inv.warnings.empty() && !inv.force) {
    err << "error: parameters leave the sparse-but-connected regime; pass --force to run anyway\n";
    throw CliExit{ExitCode::regime_abort};
  }
  return inv;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CliInvocation inv;
  try {
    inv = parse_and_validate(args, out, err);
  } catch (const CliExit& e) {
    return static_cast<int>(e.code);
  }
  try {
    if (inv.subcommand == "trial") {
      run_trial_command(inv, out);
    } else if (inv.subcommand == "campaign") {
      run_campaign_command(inv, out);
    } else if (inv.subcommand == "energy") {
      run_energy_command(inv, out);
    } else if (inv.subcommand == "index") {
      run_index_command(inv, out);
    } else {
      run_dump_graph_command(inv, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::runtime);
  }
  return static_cast<int>(ExitCode::ok);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace krgg
