#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "krgg/energy.hpp"
#include "krgg/graph.hpp"

namespace krgg {

/// Default antipodal tolerance for index computations.
inline constexpr double kIndexAntipodalTol = 1e-9;

/// Raised when the signed-difference sum is not within 1e-6 of a multiple of
/// 2pi, which points at corrupted input rather than a legitimate state.
class IndexResidualError : public std::runtime_error {
 public:
  explicit IndexResidualError(const std::string& what) : std::runtime_error(what) {}
};

struct IndexResult {
  std::optional<int> value;  // empty on the boundary of the classes K_q
  double min_gap_to_antipodal = 0.0;
  double residual = 0.0;  // |sum/2pi - value|, reported when above 1e-9

  bool defined() const { return value.has_value(); }
  friend bool operator==(const IndexResult&, const IndexResult&) = default;
};

/// (1/2pi) sum_j u_j (-) u_{j-1} over consecutive nodes in counterclockwise
/// order, wrapping (n-1) -> 0. Undefined when a consecutive pair is antipodal.
IndexResult winding_index(const NodeSet& nodes, const PhaseState& u,
                          double antipodal_tol = kIndexAntipodalTol);

struct KClass {
  bool boundary = false;
  int q = 0;  // valid when !boundary

  static KClass interior(int q) { return {false, q}; }
  static KClass on_boundary() { return {true, 0}; }
  friend bool operator==(const KClass&, const KClass&) = default;
};

KClass classify_K(const NodeSet& nodes, const PhaseState& u,
                  double antipodal_tol = kIndexAntipodalTol);

/// twisted_ansatz(q) with u_k := normalize(u_{k-1} + pi): a point of the
/// boundary with the consecutive pair (k-1, k) antipodal.
PhaseState boundary_probe_at(const NodeSet& nodes, int q, std::size_t k);

/// The probe at k = 1.
PhaseState boundary_probe(const NodeSet& nodes, int q);

}  // namespace krgg
