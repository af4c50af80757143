#include "krgg/winding.hpp"

#include <cmath>
#include <limits>

namespace krgg {

IndexResult winding_index(const NodeSet& nodes, const PhaseState& u, double antipodal_tol) {
  const std::size_t n = nodes.size();
  if (u.size() != n) {
    throw DomainError("winding_index: state has " + std::to_string(u.size()) +
                      " phases but there are " + std::to_string(n) + " nodes");
  }
  if (!(antipodal_tol >= 0.0)) throw DomainError("winding_index: negative tolerance");
  IndexResult r;
  if (n == 0) {
    r.value = 0;
    return r;
  }
  r.min_gap_to_antipodal = std::numeric_limits<double>::infinity();
  bool antipodal = false;
  double sum = 0.0;
  Angle prev = normalize(u[n - 1]);
  for (std::size_t j = 0; j < n; ++j) {
    const Angle cur = normalize(u[j]);
    const double d = signed_diff(cur, prev);
    r.min_gap_to_antipodal = std::min(r.min_gap_to_antipodal, kPi - std::abs(d));
    if (is_antipodal(cur, prev, antipodal_tol)) antipodal = true;
    sum += d;
    prev = cur;
  }
  if (antipodal) return r;
  const double turns = sum / kTwoPi;
  const double rounded = std::nearbyint(turns);
  const double residual = std::abs(turns - rounded);
  if (residual > 1e-6) {
    throw IndexResidualError("winding_index: signed-difference sum is " + std::to_string(turns) +
                             " turns, residual " + std::to_string(residual));
  }
  if (residual > 1e-9) r.residual = residual;
  r.value = static_cast<int>(rounded);
  return r;
}

KClass classify_K(const NodeSet& nodes, const PhaseState& u, double antipodal_tol) {
  const IndexResult r = winding_index(nodes, u, antipodal_tol);
  return r.defined() ? KClass::interior(*r.value) : KClass::on_boundary();
}

PhaseState boundary_probe_at(const NodeSet& nodes, int q, std::size_t k) {
  const std::size_t n = nodes.size();
  if (n < 3) throw DomainError("boundary_probe: need n >= 3");
  if (k >= n) throw DomainError("boundary_probe: node id out of range");
  PhaseState u = twisted_ansatz(nodes, q);
  const std::size_t prev = (k + n - 1) % n;
  u[k] = normalize(u[prev] + kPi).value();
  return u;
}

PhaseState boundary_probe(const NodeSet& nodes, int q) { return boundary_probe_at(nodes, q, 1); }

}  // namespace krgg
