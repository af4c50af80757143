#include "krgg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace krgg {

void FlowConfig::validate() const {
  if (!(grad_tol > 0.0)) throw DomainError("flow: grad_tol must be positive");
  if (!(dt_init > 0.0) || !(dt_init <= dt_max)) {
    throw DomainError("flow: need 0 < dt_init <= dt_max");
  }
  if (max_steps < 1) throw DomainError("flow: max_steps must be >= 1");
  if (!(max_time > 0.0)) throw DomainError("flow: max_time must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("flow: safety must lie in (0, 1]");
  if (!(rtol > 0.0) || !(atol >= 0.0)) throw DomainError("flow: invalid error tolerances");
}

std::string to_string(Termination t) {
  return t == Termination::converged ? "converged" : "budget_exhausted";
}

std::vector<double> flow_rhs(const Graph& g, const PhaseState& u) {
  std::vector<double> out(u.size());
  kuramoto_rhs(g, u.view(), out);
  return out;
}

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double raw_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

bool descends(double before, double after) {
  return after <= before + 1e-12 * std::max(1.0, std::abs(before));
}

// Bogacki-Shampine 3(2) coefficients.
constexpr double kA21 = 0.5;
constexpr double kA32 = 0.75;
constexpr double kB1 = 2.0 / 9.0;
constexpr double kB2 = 1.0 / 3.0;
constexpr double kB3 = 4.0 / 9.0;
constexpr double kE1 = -5.0 / 72.0;
constexpr double kE2 = 1.0 / 12.0;
constexpr double kE3 = 1.0 / 9.0;
constexpr double kE4 = -1.0 / 8.0;

}  // namespace

EquilibriumReport integrate(const Graph& g, const PhaseState& u0, const FlowConfig& cfg,
                            std::vector<TrajectorySample>* trace) {
  cfg.validate();
  check_dimension(g, u0.size(), "integrate");
  for (double x : u0.phases) {
    if (!std::isfinite(x)) throw IntegrationError("integrate: non-finite initial state");
  }
  const std::size_t n = g.size();
  const NodeSet& nodes = g.nodes();

  EquilibriumReport rep;
  rep.graph_connected = is_connected(g);

  std::vector<double> y = u0.phases;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), y_new(n);
  kuramoto_rhs(g, y, k1);

  double e_cur = energy(g, y);
  rep.initial_energy = e_cur;
  rep.initial_index = winding_index(nodes, u0, cfg.antipodal_tol);
  rep.min_gap_to_antipodal = rep.initial_index.min_gap_to_antipodal;
  const double mean0 = raw_mean(y);

  double t = 0.0;
  double dt = cfg.dt_init;
  long steps = 0;
  if (trace != nullptr) {
    trace->clear();
    trace->push_back({0, 0.0, e_cur, inf_norm(k1), mean0});
  }

  // Convergence is confirmed on the gauge-fixed state, from scratch.
  const auto try_finish = [&](std::span<const double> rhs) {
    if (inf_norm(rhs) >= cfg.grad_tol) return false;
    PhaseState fixed = PhaseState(y).gauge_fixed();
    const EnergyReport er = evaluate(g, fixed);
    if (er.grad_inf_norm >= cfg.grad_tol) return false;
    rep.final_state = std::move(fixed);
    rep.final_energy = er.energy;
    rep.grad_inf_norm = er.grad_inf_norm;
    rep.terminated = Termination::converged;
    return true;
  };

  bool done = try_finish(k1);
  while (!done) {
    if (steps >= cfg.max_steps || t >= cfg.max_time) break;
    dt = std::min({dt, cfg.dt_max, cfg.max_time - t});

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * kA21 * k1[i];
    kuramoto_rhs(g, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * kA32 * k2[i];
    kuramoto_rhs(g, tmp, k3);
    double incr = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = dt * (kB1 * k1[i] + kB2 * k2[i] + kB3 * k3[i]);
      y_new[i] = y[i] + d;
      incr = std::max(incr, std::abs(d));
      finite = finite && std::isfinite(y_new[i]);
    }
    if (!finite) {
      std::ostringstream msg;
      msg << "integrate: non-finite state at step " << steps << ", t = " << t << ", dt = " << dt;
      throw IntegrationError(msg.str());
    }
    kuramoto_rhs(g, y_new, k4);
    double err = 0.0;
    const double scale = cfg.atol + cfg.rtol * incr;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = dt * (kE1 * k1[i] + kE2 * k2[i] + kE3 * k3[i] + kE4 * k4[i]);
      err = std::max(err, std::abs(e));
    }
    err = scale > 0.0 ? err / scale : (err > 0.0 ? 2.0 : 0.0);

    bool accept = err <= 1.0;
    double e_new = e_cur;
    if (accept) {
      e_new = energy(g, y_new);
      accept = descends(e_cur, e_new);
      if (!accept) {
        dt *= 0.5;
      }
    }
    if (accept) {
      rep.energy_monotone = rep.energy_monotone && descends(e_cur, e_new);
      y.swap(y_new);
      k1.swap(k4);  // first-same-as-last
      t += dt;
      ++steps;
      e_cur = e_new;
      const IndexResult idx = winding_index(nodes, PhaseState(y), cfg.antipodal_tol);
      rep.min_gap_to_antipodal = std::min(rep.min_gap_to_antipodal, idx.min_gap_to_antipodal);
      if (!(idx.value == rep.initial_index.value)) rep.index_constant = false;
      if (trace != nullptr) trace->push_back({steps, t, e_cur, inf_norm(k1), raw_mean(y)});
      const double factor = err > 0.0 ? cfg.safety * std::cbrt(1.0 / err) : 5.0;
      dt *= std::clamp(factor, 0.2, 5.0);
      done = try_finish(k1);
    } else {
      ++rep.rejected_steps;
      if (err > 1.0) {
        dt *= std::clamp(cfg.safety * std::cbrt(1.0 / err), 0.1, 0.9);
      }
    }
    if (!(dt > 1e-300)) {
      std::ostringstream msg;
      msg << "integrate: step size underflow at step " << steps << ", t = " << t;
      throw IntegrationError(msg.str());
    }
  }

  rep.steps = steps;
  rep.simulated_time = t;
  rep.mean_phase_drift_rate = std::abs(raw_mean(y) - mean0) / std::max(t, 1.0);
  if (rep.terminated != Termination::converged) {
    rep.final_state = PhaseState(y).gauge_fixed();
    const EnergyReport er = evaluate(g, rep.final_state);
    rep.final_energy = er.energy;
    rep.grad_inf_norm = er.grad_inf_norm;
  }
  rep.index = winding_index(nodes, rep.final_state, cfg.antipodal_tol);
  rep.stable_pi_half = pi_half_certificate(g, rep.final_state);
  if (cfg.compute_eigenvalue) {
    rep.min_eigenvalue =
        hessian_min_eigenvalue(g, rep.final_state, cfg.eigen_tol, cfg.eigen_max_iterations);
  }
  return rep;
}

bool descend_energy_check(std::span<const double> energies) {
  for (std::size_t i = 1; i < energies.size(); ++i) {
    if (!descends(energies[i - 1], energies[i])) return false;
  }
  return true;
}

bool descend_energy_check(std::span<const TrajectorySample> trajectory) {
  std::vector<double> e;
  e.reserve(trajectory.size());
  for (const auto& s : trajectory) e.push_back(s.energy);
  return descend_energy_check(e);
}

RestartProbe restart_probe(const Graph& g, const EquilibriumReport& equilibrium,
                           const FlowConfig& cfg, RngStream& rng, double amplitude, double radius) {
  PhaseState start = equilibrium.final_state;
  std::vector<double> noise(start.size());
  for (double& x : noise) x = rng.uniform(-amplitude, amplitude);
  const double m = raw_mean(noise);
  for (std::size_t i = 0; i < start.size(); ++i) start[i] += noise[i] - m;

  RestartProbe probe;
  probe.report = integrate(g, start, cfg);
  for (std::size_t i = 0; i < start.size(); ++i) {
    probe.distance = std::max(
        probe.distance, std::abs(probe.report.final_state[i] - equilibrium.final_state[i]));
  }
  probe.reconverged =
      probe.report.terminated == Termination::converged && probe.distance <= radius;
  return probe;
}

}  // namespace krgg
