#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "krgg/graph.hpp"

namespace krgg {

/// One real phase per node, indexed by node id; read modulo 2pi.
struct PhaseState {
  std::vector<double> phases;

  PhaseState() = default;
  explicit PhaseState(std::vector<double> p) : phases(std::move(p)) {}
  static PhaseState constant(std::size_t n, double value = 0.0) {
    return PhaseState(std::vector<double>(n, value));
  }

  std::size_t size() const { return phases.size(); }
  double operator[](std::size_t i) const { return phases[i]; }
  double& operator[](std::size_t i) { return phases[i]; }
  std::span<const double> view() const { return phases; }

  double mean() const;
  /// Shifted copy with zero phase sum.
  PhaseState gauge_fixed() const;

  friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

struct EnergyReport {
  double energy = 0.0;
  double grad_inf_norm = 0.0;
  double scaling_factor = 0.0;
};

/// Largest |q| for which the class K_q is non-empty: floor((n - 1) / 2).
int max_winding(std::size_t n);

/// phases[i] = normalize(q * x_i).
PhaseState twisted_ansatz(const NodeSet& nodes, int q);

/// pi / (2 n^2 eps^3) with eps the graph's effective epsilon.
double scaling_factor(const Graph& g);

/// E(u) = pi/(2 n^2 eps^3) * sum_i sum_{j~i} w_ij (1 - cos(u_j - u_i)).
double energy(const Graph& g, const PhaseState& u);
double energy(const Graph& g, std::span<const double> u);

/// Component i: -(pi / (n^2 eps^3)) sum_{j~i} w_ij sin(u_j - u_i).
std::vector<double> energy_gradient(const Graph& g, const PhaseState& u);

/// The Kuramoto right-hand side (pi / (n^2 eps^3)) sum_{j~i} w_ij sin(u_j - u_i),
/// written into out. The gradient is its exact negation.
void kuramoto_rhs(const Graph& g, std::span<const double> u, std::span<double> out);

EnergyReport evaluate(const Graph& g, const PhaseState& u);

/// True iff every edge has |u_i (-) u_j| < pi/2.
bool pi_half_certificate(const Graph& g, const PhaseState& u);

/// (H v)_i = (pi / (n^2 eps^3)) sum_{j~i} w_ij cos(u_j - u_i) (v_i - v_j).
void hessian_vector_product(const Graph& g, std::span<const double> u, std::span<const double> v,
                            std::span<double> out);

struct EigenResult {
  bool converged = false;
  double value = 0.0;     // meaningful only when converged
  double residual = 0.0;  // ||H x - value x|| of the returned Ritz pair
  int iterations = 0;
};

/// Smallest eigenvalue of the Hessian restricted to the complement of
/// (1, ..., 1), by Lanczos with full reorthogonalization on matrix-free
/// products. Non-convergence within max_iterations is reported, not hidden.
EigenResult hessian_min_eigenvalue(const Graph& g, const PhaseState& u, double tol = 1e-10,
                                   int max_iterations = 600);

void check_dimension(const Graph& g, std::size_t len, const char* op);

}  // namespace krgg
