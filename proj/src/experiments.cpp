#include "krgg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace krgg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Purposes of the per-trial substreams.
constexpr std::uint64_t kStreamNodes = 0;
constexpr std::uint64_t kStreamGraph = 1;
constexpr std::uint64_t kStreamRestart = 2;

}  // namespace

std::string to_string(CampaignMode m) {
  switch (m) {
    case CampaignMode::existence: return "existence";
    case CampaignMode::convergence: return "convergence";
    case CampaignMode::boundary: return "boundary";
    case CampaignMode::q_sweep: return "q_sweep";
    case CampaignMode::variance: return "variance";
  }
  return "?";
}

CampaignMode campaign_mode_from_string(std::string_view name) {
  if (name == "existence") return CampaignMode::existence;
  if (name == "convergence") return CampaignMode::convergence;
  if (name == "boundary") return CampaignMode::boundary;
  if (name == "q_sweep" || name == "q-sweep") return CampaignMode::q_sweep;
  if (name == "variance") return CampaignMode::variance;
  throw DomainError("unknown campaign mode: " + std::string(name));
}

std::vector<double> EpsilonRule::epsilons_for(std::size_t n) const {
  if (kind == Kind::power) return {std::pow(static_cast<double>(n), -power)};
  return values;
}

PhaseState TestFunction::evaluate(const NodeSet& nodes, int q) const {
  PhaseState u = twisted_ansatz(nodes, q);
  if (cos_coeffs.empty() && sin_coeffs.empty()) return u;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = nodes[i];
    double extra = 0.0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k) extra += cos_coeffs[k] * std::cos((k + 1.0) * x);
    for (std::size_t k = 0; k < sin_coeffs.size(); ++k) extra += sin_coeffs[k] * std::sin((k + 1.0) * x);
    u[i] += extra;
  }
  return u;
}

double TestFunction::mean_square_slope(int q) const {
  // u' = q + sum k (-a_k sin kx + b_k cos kx); cross terms integrate to zero.
  double s = static_cast<double>(q) * q;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) s += 0.5 * (k + 1.0) * (k + 1.0) * cos_coeffs[k] * cos_coeffs[k];
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) s += 0.5 * (k + 1.0) * (k + 1.0) * sin_coeffs[k] * sin_coeffs[k];
  return s;
}

double TestFunction::continuum_energy(int q) const {
  return mean_square_slope(q) * kTwoPi / (12.0 * kPi);
}

double TestFunction::energy_limit(int q) const { return 0.5 * continuum_energy(q); }

void CampaignConfig::validate() const {
  if (n_values.empty()) throw DomainError("campaign: no n values");
  if (q_values.empty()) throw DomainError("campaign: no q values");
  if (trials_per_cell < 0) throw DomainError("campaign: trials must be non-negative");
  if (workers < 1) throw DomainError("campaign: workers must be >= 1");
  if (epsilon_rule.kind == EpsilonRule::Kind::explicit_list && epsilon_rule.values.empty()) {
    throw DomainError("campaign: explicit epsilon list is empty");
  }
  if (epsilon_rule.kind == EpsilonRule::Kind::power && !(epsilon_rule.power > 0.0)) {
    throw DomainError("campaign: epsilon power must be positive");
  }
  flow.validate();
  for (std::size_t n : n_values) {
    if (n < 2) throw DomainError("campaign: n must be >= 2");
    for (int q : q_values) {
      if (std::abs(q) > max_winding(n)) {
        throw DomainError("campaign: |q| = " + std::to_string(std::abs(q)) +
                          " exceeds floor((n-1)/2) = " + std::to_string(max_winding(n)) +
                          " for n = " + std::to_string(n) + " (K_q is empty)");
      }
    }
    for (const Cell& c : enumerate_cells(*this)) {
      if (c.n == n) model_for_cell(*this, c).validate(n);
    }
  }
  if (mode == CampaignMode::boundary) {
    for (std::size_t n : n_values) {
      if (n < 3) throw DomainError("campaign: boundary probes need n >= 3");
    }
  }
}

std::vector<Cell> enumerate_cells(const CampaignConfig& cfg) {
  std::vector<Cell> cells;
  for (std::size_t n : cfg.n_values) {
    for (double eps : cfg.epsilon_rule.epsilons_for(n)) {
      for (int q : cfg.q_values) {
        cells.push_back({cells.size(), n, eps, q});
      }
    }
  }
  return cells;
}

GraphModel model_for_cell(const CampaignConfig& cfg, const Cell& cell) {
  GraphModel m = cfg.graph;
  const double auto_k = std::max(1.0, std::round(static_cast<double>(cell.n) * cell.epsilon / kPi));
  switch (m.variant) {
    case Variant::rgg:
    case Variant::weighted_kernel:
      m.epsilon = cell.epsilon;
      break;
    case Variant::knn:
      if (m.k == 0) m.k = static_cast<int>(auto_k);
      break;
    case Variant::boolean:
      if (m.radius.rho == 0.0) m.radius.rho = cell.epsilon;
      break;
    case Variant::random_nn:
      if (m.count.lo == 0) m.count = CountLaw::constant(static_cast<int>(auto_k));
      break;
  }
  return m;
}

std::uint64_t trial_seed(const CampaignConfig& cfg, const Cell& cell, std::size_t trial_index) {
  return derive_stream_seed(cfg.master_seed, cell.index, trial_index);
}

namespace {

BoundaryStats probe_boundary(const Graph& g, int q) {
  const NodeSet& nodes = g.nodes();
  const std::size_t n = g.size();
  const double scale = scaling_factor(g);
  const double eps = g.epsilon();
  BoundaryStats b;
  b.floor = 1.0 / (8.0 * static_cast<double>(g.normalization_size()) * eps * eps);
  b.min_energy = kNaN;
  b.min_exact_margin = kNaN;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t prev = (k + n - 1) % n;
    if (!g.has_edge(prev, k)) {
      ++b.nonadjacent_pairs;
      continue;
    }
    const PhaseState u = boundary_probe_at(nodes, q, k);
    const double e = energy(g, u);
    const double bound = scale * static_cast<double>(common_neighbors(g, k, prev));
    ++b.probes;
    if (!(e >= bound)) ++b.exact_violations;
    const double margin = e - bound;
    if (std::isnan(b.min_exact_margin) || margin < b.min_exact_margin) b.min_exact_margin = margin;
    if (std::isnan(b.min_energy) || e < b.min_energy) {
      b.min_energy = e;
      b.min_probe_node = k;
    }
  }
  return b;
}

}  // namespace

Graph trial_graph(const CampaignConfig& cfg, const Cell& cell, std::size_t trial_index) {
  const std::uint64_t seed = trial_seed(cfg, cell, trial_index);
  RngStream node_rng(derive_stream_seed(seed, 0, 0, kStreamNodes));
  RngStream graph_rng(derive_stream_seed(seed, 0, 0, kStreamGraph));
  const NodeSet nodes = sample_nodes(cell.n, cfg.sampling, node_rng);
  Graph g = build_graph(nodes, model_for_cell(cfg, cell), graph_rng);
  if (cfg.sampling == SamplingMode::poissonized) g = g.with_normalization(cell.n);
  return g;
}

TrialRecord run_trial(const CampaignConfig& cfg, const Cell& cell, std::size_t trial_index,
                      TrialCapture* capture) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.cell_index = cell.index;
  rec.trial_index = trial_index;
  rec.seed = trial_seed(cfg, cell, trial_index);
  rec.n = cell.n;
  rec.q = cell.q;

  const Graph g = trial_graph(cfg, cell, trial_index);
  const NodeSet& nodes = g.nodes();
  rec.node_count = nodes.size();
  rec.epsilon = g.epsilon();
  rec.components = component_count(g);
  rec.connected = rec.components == 1;
  if (capture != nullptr) capture->graph = g;

  const auto finish = [&]() {
    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
  };

  switch (cfg.mode) {
    case CampaignMode::convergence:
    case CampaignMode::variance: {
      rec.ansatz_energy = energy(g, cfg.test_function.evaluate(nodes, cell.q));
      rec.success = true;
      return finish();
    }
    case CampaignMode::boundary: {
      rec.ansatz_energy = energy(g, twisted_ansatz(nodes, cell.q));
      rec.boundary = probe_boundary(g, cell.q);
      rec.success = rec.boundary->probes > 0 && rec.boundary->exact_violations == 0 &&
                    rec.boundary->min_energy >= rec.boundary->floor;
      return finish();
    }
    case CampaignMode::existence:
    case CampaignMode::q_sweep:
      break;
  }

  const PhaseState u0 = twisted_ansatz(nodes, cell.q);
  rec.ansatz_energy = energy(g, u0);
  if (!rec.connected && cfg.skip_disconnected) {
    rec.skipped = true;
    return finish();
  }
  try {
    std::vector<TrajectorySample>* trace =
        capture != nullptr && capture->record_trajectory ? &capture->trajectory : nullptr;
    rec.report = integrate(g, u0, cfg.flow, trace);
    if (capture != nullptr) capture->final_state = rec.report->final_state;
    const EquilibriumReport& r = *rec.report;
    rec.success = r.terminated == Termination::converged && r.index.value == cell.q &&
                  r.stable_pi_half;
    if (cfg.restart_probe && r.terminated == Termination::converged) {
      RngStream restart_rng(derive_stream_seed(rec.seed, 0, 0, kStreamRestart));
      rec.restart_reconverged = krgg::restart_probe(g, r, cfg.flow, restart_rng).reconverged;
    }
  } catch (const IntegrationError& e) {
    rec.failure = e.what();
    rec.success = false;
  }
  return finish();
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t m) {
  if (m == 0) return {kNaN, kNaN};
  constexpr double z = 1.959963984540054;
  const double mm = static_cast<double>(m);
  const double p = static_cast<double>(k) / mm;
  const double denom = 1.0 + z * z / mm;
  const double centre = (p + z * z / (2.0 * mm)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / mm + z * z / (4.0 * mm * mm)) / denom;
  // The bounds are exact at the extremes; avoid rounding residue there.
  const double lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = k == m ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

namespace {

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : kNaN; }
  double mean_or_nan() const { return count > 0 ? mean : kNaN; }
};

}  // namespace

std::vector<CellSummary> summarize(const CampaignConfig& cfg, const std::vector<Cell>& cells,
                                   const std::vector<TrialRecord>& records) {
  std::vector<CellSummary> out;
  out.reserve(cells.size());
  for (const Cell& cell : cells) {
    CellSummary s;
    s.cell = cell;
    Moments final_e;
    Moments ansatz_e;
    double eps_sum = 0.0;
    s.min_probe_energy = kNaN;
    for (const TrialRecord& r : records) {
      if (r.cell_index != cell.index) continue;
      ++s.trials;
      eps_sum += r.epsilon;
      if (r.skipped) {
        ++s.skips;
        continue;
      }
      if (r.failure) ++s.failures;
      if (r.success) ++s.successes;
      ansatz_e.add(r.ansatz_energy);
      if (r.report) final_e.add(r.report->final_energy);
      if (r.boundary) {
        const BoundaryStats& b = *r.boundary;
        if (!std::isnan(b.min_energy)) {
          final_e.add(b.min_energy);
          if (std::isnan(s.min_probe_energy) || b.min_energy < s.min_probe_energy) {
            s.min_probe_energy = b.min_energy;
          }
          if (b.min_energy >= b.floor) ++s.seeds_above_floor;
        }
        s.exact_violations += b.exact_violations;
      }
    }
    const std::size_t counted = s.trials - s.skips;
    s.rate = counted > 0 ? static_cast<double>(s.successes) / static_cast<double>(counted) : kNaN;
    std::tie(s.ci_low, s.ci_high) = wilson_interval(s.successes, counted);
    if (cfg.mode == CampaignMode::convergence || cfg.mode == CampaignMode::variance) {
      s.mean_energy = ansatz_e.mean_or_nan();
      s.stddev_energy = std::sqrt(ansatz_e.variance());
    } else {
      s.mean_energy = final_e.mean_or_nan();
      s.stddev_energy = std::sqrt(final_e.variance());
    }
    s.mean_ansatz_energy = ansatz_e.mean_or_nan();
    s.var_ansatz_energy = ansatz_e.variance();
    s.continuum_value = cfg.test_function.continuum_energy(cell.q);
    s.energy_limit = cfg.test_function.energy_limit(cell.q);
    // For rgg the effective epsilon is the cell epsilon; other variants use
    // the average over trials.
    const double eps = s.trials > 0 ? eps_sum / static_cast<double>(s.trials) : cell.epsilon;
    s.probe_floor = 1.0 / (8.0 * static_cast<double>(cell.n) * eps * eps);
    s.q_threshold = 1.0 / (2.0 * std::sqrt(static_cast<double>(cell.n)) * eps);
    out.push_back(s);
  }
  return out;
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  CampaignResult result;
  result.config = cfg;
  result.cells = enumerate_cells(cfg);

  struct Job {
    std::size_t cell;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  std::unordered_set<std::uint64_t> stream_ids;
  for (const Cell& c : result.cells) {
    for (std::size_t t = 0; t < static_cast<std::size_t>(cfg.trials_per_cell); ++t) {
      if (!stream_ids.insert(trial_seed(cfg, c, t)).second) {
        throw std::logic_error("campaign: random stream reused across trials");
      }
      jobs.push_back({c.index, t});
    }
  }

  result.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        result.records[j] = run_trial(cfg, result.cells[jobs[j].cell], jobs[j].trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(jobs.size());
        return;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  result.summaries = summarize(cfg, result.cells, result.records);
  return result;
}

std::vector<ConvergenceRow> convergence_table(const CampaignResult& r) {
  std::vector<ConvergenceRow> rows;
  for (const CellSummary& s : r.summaries) {
    rows.push_back({s.cell.n, s.cell.epsilon, s.cell.q, s.mean_energy, s.stddev_energy,
                    s.continuum_value, s.energy_limit});
  }
  return rows;
}

std::vector<VarianceRow> variance_table(const CampaignResult& r) {
  std::vector<VarianceRow> rows;
  for (const CellSummary& s : r.summaries) {
    const std::size_t counted = s.trials - s.skips;
    std::optional<double> var;
    if (counted > 1) var = s.var_ansatz_energy;
    rows.push_back({s.cell.n, s.cell.epsilon, s.cell.q, counted, var});
  }
  return rows;
}

std::vector<BoundaryRow> boundary_table(const CampaignResult& r) {
  std::vector<BoundaryRow> rows;
  for (const CellSummary& s : r.summaries) {
    rows.push_back({s.cell.n, s.cell.epsilon, s.min_probe_energy, s.probe_floor,
                    s.seeds_above_floor, s.trials - s.skips, s.exact_violations});
  }
  return rows;
}

std::vector<QSweepRow> q_sweep_table(const CampaignResult& r) {
  std::vector<QSweepRow> rows;
  for (const CellSummary& s : r.summaries) {
    rows.push_back({s.cell.n, s.cell.epsilon, s.cell.q, s.q_threshold,
                    std::abs(s.cell.q) < s.q_threshold, s.rate, s.ci_low, s.ci_high});
  }
  return rows;
}

namespace {

void require_mode(const CampaignConfig& cfg, CampaignMode mode) {
  if (cfg.mode != mode) {
    throw DomainError("campaign: expected mode " + to_string(mode) + ", got " + to_string(cfg.mode));
  }
}

}  // namespace

CampaignResult existence_campaign(const CampaignConfig& cfg) {
  require_mode(cfg, CampaignMode::existence);
  return run_campaign(cfg);
}

std::vector<ConvergenceRow> convergence_campaign(const CampaignConfig& cfg) {
  require_mode(cfg, CampaignMode::convergence);
  return convergence_table(run_campaign(cfg));
}

std::vector<VarianceRow> variance_decay_campaign(const CampaignConfig& cfg) {
  require_mode(cfg, CampaignMode::variance);
  return variance_table(run_campaign(cfg));
}

std::vector<BoundaryRow> boundary_campaign(const CampaignConfig& cfg) {
  require_mode(cfg, CampaignMode::boundary);
  return boundary_table(run_campaign(cfg));
}

std::vector<QSweepRow> q_sweep_campaign(const CampaignConfig& cfg) {
  require_mode(cfg, CampaignMode::q_sweep);
  return q_sweep_table(run_campaign(cfg));
}

std::vector<std::string> regime_warnings(const CampaignConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.epsilon_rule.kind == EpsilonRule::Kind::power) {
    const double a = cfg.epsilon_rule.power;
    if (!(a > 0.5 && a < 1.0)) {
      out.push_back("epsilon power a = " + std::to_string(a) +
                    " lies outside (1/2, 1); n eps^2 -> 0 and n eps / log n -> infinity "
                    "cannot both hold");
    }
    return out;
  }
  for (std::size_t n : cfg.n_values) {
    const double nn = static_cast<double>(n);
    for (double eps : cfg.epsilon_rule.values) {
      if (nn * eps * eps > 1.0) {
        out.push_back("n = " + std::to_string(n) + ", eps = " + std::to_string(eps) +
                      ": n eps^2 = " + std::to_string(nn * eps * eps) + " > 1");
      }
      if (nn * eps / std::log(nn) < 3.0) {
        out.push_back("n = " + std::to_string(n) + ", eps = " + std::to_string(eps) +
                      ": n eps / log n = " + std::to_string(nn * eps / std::log(nn)) + " < 3");
      }
    }
  }
  return out;
}

}  // namespace krgg
