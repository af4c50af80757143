#include "krgg/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace krgg {

double PhaseState::mean() const {
  if (phases.empty()) return 0.0;
  return std::accumulate(phases.begin(), phases.end(), 0.0) / static_cast<double>(phases.size());
}

PhaseState PhaseState::gauge_fixed() const {
  PhaseState out = *this;
  const double m = mean();
  for (double& p : out.phases) p -= m;
  return out;
}

void check_dimension(const Graph& g, std::size_t len, const char* op) {
  if (len != g.size()) {
    throw DomainError(std::string(op) + ": state has " + std::to_string(len) +
                      " phases but graph has " + std::to_string(g.size()) + " nodes");
  }
}

int max_winding(std::size_t n) { return n == 0 ? 0 : static_cast<int>((n - 1) / 2); }

PhaseState twisted_ansatz(const NodeSet& nodes, int q) {
  if (std::abs(q) > max_winding(nodes.size())) {
    throw DomainError("twisted_ansatz: |q| = " + std::to_string(std::abs(q)) +
                      " exceeds floor((n-1)/2) = " + std::to_string(max_winding(nodes.size())));
  }
  PhaseState u;
  u.phases.reserve(nodes.size());
  for (double x : nodes.angles()) u.phases.push_back(normalize(q * x).value());
  return u;
}

double scaling_factor(const Graph& g) {
  const double n = static_cast<double>(g.normalization_size());
  const double eps = g.epsilon();
  return kPi / (2.0 * n * n * eps * eps * eps);
}

double energy(const Graph& g, std::span<const double> u) {
  check_dimension(g, u.size(), "energy");
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    const auto w = g.weights(i);
    const auto first = static_cast<std::size_t>(
        std::upper_bound(nb.begin(), nb.end(), static_cast<std::uint32_t>(i)) - nb.begin());
    double row = 0.0;
    for (std::size_t s = first; s < nb.size(); ++s) {
      // 1 - cos(d) = 2 sin^2(d/2), free of cancellation for small d.
      const double h = std::sin(0.5 * (u[nb[s]] - u[i]));
      row += (w.empty() ? 1.0 : w[s]) * h * h;
    }
    sum += row;
  }
  // Both orientations of each edge, times 2 sin^2.
  return 4.0 * scaling_factor(g) * sum;
}

double energy(const Graph& g, const PhaseState& u) { return energy(g, u.view()); }

void kuramoto_rhs(const Graph& g, std::span<const double> u, std::span<double> out) {
  check_dimension(g, u.size(), "flow_rhs");
  check_dimension(g, out.size(), "flow_rhs");
  const double c = 2.0 * scaling_factor(g);
  std::fill(out.begin(), out.end(), 0.0);
  // Each undirected edge is visited once from its smaller end; sin is odd.
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    const auto w = g.weights(i);
    const auto first = static_cast<std::size_t>(
        std::upper_bound(nb.begin(), nb.end(), static_cast<std::uint32_t>(i)) - nb.begin());
    const double ui = u[i];
    double acc = out[i];
    for (std::size_t s = first; s < nb.size(); ++s) {
      const std::uint32_t j = nb[s];
      const double t = w.empty() ? std::sin(u[j] - ui) : w[s] * std::sin(u[j] - ui);
      acc += t;
      out[j] -= t;
    }
    out[i] = acc;
  }
  for (double& x : out) x *= c;
}

std::vector<double> energy_gradient(const Graph& g, const PhaseState& u) {
  std::vector<double> grad(u.size());
  kuramoto_rhs(g, u.view(), grad);
  for (double& x : grad) x = -x;
  return grad;
}

EnergyReport evaluate(const Graph& g, const PhaseState& u) {
  EnergyReport r;
  r.energy = energy(g, u);
  r.scaling_factor = scaling_factor(g);
  for (double x : energy_gradient(g, u)) r.grad_inf_norm = std::max(r.grad_inf_norm, std::abs(x));
  return r;
}

bool pi_half_certificate(const Graph& g, const PhaseState& u) {
  check_dimension(g, u.size(), "pi_half_certificate");
  std::vector<Angle> a(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = normalize(u[i]);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (auto j : g.neighbors(i)) {
      if (j > i && !(std::abs(signed_diff(a[i], a[j])) < kPi / 2)) return false;
    }
  }
  return true;
}

void hessian_vector_product(const Graph& g, std::span<const double> u, std::span<const double> v,
                            std::span<double> out) {
  check_dimension(g, u.size(), "hessian_vector_product");
  check_dimension(g, v.size(), "hessian_vector_product");
  check_dimension(g, out.size(), "hessian_vector_product");
  const double c = 2.0 * scaling_factor(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    const auto w = g.weights(i);
    double acc = 0.0;
    for (std::size_t s = 0; s < nb.size(); ++s) {
      const auto j = nb[s];
      acc += (w.empty() ? 1.0 : w[s]) * std::cos(u[j] - u[i]) * (v[i] - v[j]);
    }
    out[i] = c * acc;
  }
}

}  // namespace krgg
