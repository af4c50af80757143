#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "krgg/energy.hpp"
#include "krgg/rng.hpp"

namespace krgg {

namespace {

// Removes the component along (1, ..., 1).
void project_out_shift(std::span<double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

EigenResult hessian_min_eigenvalue(const Graph& g, const PhaseState& u, double tol,
                                   int max_iterations) {
  check_dimension(g, u.size(), "hessian_min_eigenvalue");
  EigenResult result;
  const std::size_t n = g.size();
  if (n < 2) {
    throw DomainError("hessian_min_eigenvalue: need at least 2 nodes");
  }
  const std::size_t dim = n - 1;  // dimension of the shift-free subspace
  const std::size_t m_max = std::min<std::size_t>(dim, static_cast<std::size_t>(std::max(1, max_iterations)));

  std::vector<std::vector<double>> basis;
  basis.reserve(m_max + 1);
  std::vector<double> alpha;
  std::vector<double> beta;

  std::vector<double> q(n);
  RngStream rng(0x5EEDULL + n);
  for (double& x : q) x = rng.uniform(-1.0, 1.0);
  project_out_shift(q);
  {
    const double nq = std::sqrt(dot(q, q));
    for (double& x : q) x /= nq;
  }

  std::vector<double> w(n);
  const auto check_ritz = [&](bool exhausted) {
    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double theta = tri.eigenvalues()(0);
    const double last = tri.eigenvectors()(m - 1, 0);
    const double b_next = beta.size() >= alpha.size() ? beta.back() : 0.0;
    const double res = exhausted ? 0.0 : std::abs(b_next * last);
    result.value = theta;
    result.residual = res;
    result.iterations = static_cast<int>(m);
    return exhausted || res <= tol;
  };

  for (std::size_t k = 0; k < m_max; ++k) {
    basis.push_back(q);
    hessian_vector_product(g, u.view(), q, w);
    project_out_shift(w);
    const double a = dot(w, q);
    alpha.push_back(a);
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = dot(w, b);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * b[i];
      }
      project_out_shift(w);
    }
    const double b = std::sqrt(dot(w, w));
    beta.push_back(b);

    const bool invariant = b <= 1e-14 * std::max(1.0, std::abs(a));
    const bool exhausted = invariant || alpha.size() == dim;
    const bool due = exhausted || k + 1 == m_max || (k + 1) % 8 == 0;
    if (due && check_ritz(exhausted)) {
      result.converged = true;
      return result;
    }
    if (exhausted) break;
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
  }
  result.converged = false;
  return result;
}

}  // namespace krgg
