#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "krgg/energy.hpp"
#include "krgg/rng.hpp"
#include "krgg/winding.hpp"

namespace krgg {

struct FlowConfig {
  double grad_tol = 1e-10;  // stop when ||grad E||_inf < grad_tol
  double max_time = 1e12;
  long max_steps = 1'000'000;
  double dt_init = 1e-2;
  double dt_max = 1e4;
  double safety = 0.9;
  // Local error is measured against atol + rtol * ||increment||_inf, so the
  // tolerance shrinks with the gradient and stiff modes cannot stall at a
  // fixed error floor.
  double rtol = 1e-3;
  double atol = 1e-15;
  double antipodal_tol = kIndexAntipodalTol;
  bool compute_eigenvalue = false;
  double eigen_tol = 1e-10;
  int eigen_max_iterations = 600;

  void validate() const;

  friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

enum class Termination { converged, budget_exhausted };
std::string to_string(Termination t);

struct TrajectorySample {
  long step = 0;
  double time = 0.0;
  double energy = 0.0;
  double grad_inf_norm = 0.0;
  double mean_phase = 0.0;
};

struct EquilibriumReport {
  PhaseState final_state;  // gauge-fixed
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double grad_inf_norm = 0.0;  // recomputed at final_state
  IndexResult initial_index;
  IndexResult index;
  bool stable_pi_half = false;
  std::optional<EigenResult> min_eigenvalue;
  long steps = 0;
  long rejected_steps = 0;
  double simulated_time = 0.0;
  Termination terminated = Termination::budget_exhausted;
  bool graph_connected = false;
  // Certification of the trajectory itself.
  bool energy_monotone = true;
  double mean_phase_drift_rate = 0.0;  // |mean(u_T) - mean(u_0)| / max(T, 1)
  bool index_constant = true;
  double min_gap_to_antipodal = 0.0;  // smallest seen along accepted steps
};

/// Non-finite values or step-size collapse. The message carries the step,
/// time and step size at failure.
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

/// -grad E(u), bitwise.
std::vector<double> flow_rhs(const Graph& g, const PhaseState& u);

/// Integrates du/dt = -grad E(u) from u0 until ||grad E||_inf < grad_tol or
/// the budget runs out. Every accepted step must not raise the energy by more
/// than 1e-12 * max(1, E).
EquilibriumReport integrate(const Graph& g, const PhaseState& u0, const FlowConfig& cfg,
                            std::vector<TrajectorySample>* trace = nullptr);

/// True iff the energy never rises by more than 1e-12 * max(1, E) between
/// consecutive samples.
bool descend_energy_check(std::span<const TrajectorySample> trajectory);
bool descend_energy_check(std::span<const double> energies);

struct RestartProbe {
  bool reconverged = false;
  double distance = 0.0;  // sup-norm gap between the two gauge-fixed equilibria
  EquilibriumReport report;
};

/// Perturbs a converged equilibrium by mean-zero noise of the given amplitude,
/// re-integrates, and checks the flow returns within radius.
RestartProbe restart_probe(const Graph& g, const EquilibriumReport& equilibrium,
                           const FlowConfig& cfg, RngStream& rng, double amplitude = 1e-8,
                           double radius = 1e-6);

}  // namespace krgg
