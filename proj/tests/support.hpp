#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// They go through dense loops over all pairs and never call into the library's
// energy or Hessian code.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "krgg/energy.hpp"
#include "krgg/graph.hpp"
#include "krgg/rng.hpp"

namespace krgg::testing {

inline constexpr double kPiRef = 3.14159265358979323846;

// Nodes {0, pi/2, pi, 3pi/2}.
inline NodeSet square_nodes() { return NodeSet::from_angles({0.0, kPiRef / 2, kPiRef, 3 * kPiRef / 2}); }

// The 4-cycle on the square nodes, via the rgg rule with eps = 1.6.
inline Graph square_cycle() { return build_graph(square_nodes(), GraphModel::rgg(1.6)); }

// Dense 0/1 (or weighted) adjacency from the public edge list.
inline Eigen::MatrixXd adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    a(e.i, e.j) = e.weight;
    a(e.j, e.i) = e.weight;
  }
  return a;
}

inline double pair_scale(const Graph& g) {
  const double n = static_cast<double>(g.normalization_size());
  const double eps = g.epsilon();
  return kPiRef / (2.0 * n * n * eps * eps * eps);
}

// Double sum over ordered pairs, textbook form.
inline double energy_oracle(const Graph& g, const std::vector<double>& u) {
  const Eigen::MatrixXd a = adjacency(g);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) sum += a(i, j) * (1.0 - std::cos(u[j] - u[i]));
    }
  }
  return pair_scale(g) * sum;
}

// Dense Hessian of the energy.
inline Eigen::MatrixXd hessian_oracle(const Graph& g, const std::vector<double>& u) {
  const Eigen::MatrixXd a = adjacency(g);
  const Eigen::Index n = a.rows();
  const double s = 2.0 * pair_scale(g);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || a(i, j) == 0.0) continue;
      const double c = s * a(i, j) * std::cos(u[j] - u[i]);
      h(i, j) -= c;
      h(i, i) += c;
    }
  }
  return h;
}

// Smallest eigenvalue of the Hessian restricted to the complement of (1, ..., 1).
inline double min_eigenvalue_oracle(const Graph& g, const std::vector<double>& u) {
  const Eigen::MatrixXd h = hessian_oracle(g, u);
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd basis(n, n);
  basis.col(0).setConstant(1.0);
  for (Eigen::Index k = 1; k < n; ++k) {
    basis.col(k).setZero();
    basis(k, k) = 1.0;
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd complement = q.rightCols(n - 1);
  const Eigen::MatrixXd projected = complement.transpose() * h * complement;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected);
  return es.eigenvalues().minCoeff();
}

inline std::vector<double> random_phases(std::size_t n, RngStream& rng) {
  std::vector<double> u(n);
  for (double& x : u) x = rng.uniform(0.0, 2.0 * kPiRef);
  return u;
}

inline NodeSet random_nodes(std::size_t n, RngStream& rng) {
  return sample_nodes(n, SamplingMode::fixed_n, rng);
}

}  // namespace krgg::testing
