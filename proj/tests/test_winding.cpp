#include <doctest.h>

#include <cmath>
#include <vector>

#include "krgg/winding.hpp"
#include "support.hpp"

using namespace krgg;
using krgg::testing::kPiRef;

namespace {

NodeSet equally_spaced(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 2 * kPiRef * static_cast<double>(i) / static_cast<double>(n);
  return NodeSet::from_angles(x);
}

// Integer count of counterclockwise turns, by unwrapping each step into
// (-pi, pi) with explicit branch arithmetic.
std::optional<int> turns_oracle(const std::vector<double>& u, double tol) {
  double total = 0.0;
  const std::size_t n = u.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = u[j] - u[(j + n - 1) % n];
    d -= 2 * kPiRef * std::floor(d / (2 * kPiRef));  // [0, 2pi)
    if (d > kPiRef) d -= 2 * kPiRef;                 // (-pi, pi]
    if (std::abs(std::abs(d) - kPiRef) <= tol) return std::nullopt;
    total += d;
  }
  return static_cast<int>(std::lround(total / (2 * kPiRef)));
}

}  // namespace

TEST_CASE("winding index examples") {
  RngStream rng(1);
  const NodeSet nodes = krgg::testing::random_nodes(37, rng);
  CHECK(winding_index(nodes, PhaseState{std::vector<double>(37, 2.0)}).value == 0);
  for (std::size_t n : {5u, 8u, 100u, 101u}) {
    const NodeSet eq = equally_spaced(n);
    for (int q = -max_winding(n); q <= max_winding(n); ++q) {
      CHECK(winding_index(eq, twisted_ansatz(eq, q)).value == q);
    }
  }
  const IndexResult undefined = winding_index(krgg::testing::square_nodes(), PhaseState{{0, kPiRef, 0, kPiRef}});
  CHECK_FALSE(undefined.defined());
  CHECK(undefined.min_gap_to_antipodal == 0.0);
}

TEST_CASE("winding index checks its input") {
  CHECK_THROWS_AS(winding_index(krgg::testing::square_nodes(), PhaseState{{0, 1}}), DomainError);
}

TEST_CASE("min gap to antipodal") {
  const NodeSet nodes = krgg::testing::square_nodes();
  const IndexResult r = winding_index(nodes, PhaseState{{0, 0.5, 0.5, 0.0}});
  CHECK(r.value == 0);
  CHECK(r.min_gap_to_antipodal == doctest::Approx(kPiRef - 0.5));
}

TEST_CASE("classify_K examples") {
  const NodeSet eq = equally_spaced(100);
  CHECK(classify_K(eq, twisted_ansatz(eq, 1)) == KClass::interior(1));
  CHECK(classify_K(eq, twisted_ansatz(eq, 0)) == KClass::interior(0));
  CHECK(classify_K(krgg::testing::square_nodes(), PhaseState{{0, kPiRef, 0, kPiRef}}) ==
        KClass::on_boundary());
}

TEST_CASE("boundary probe examples") {
  const NodeSet three = NodeSet::from_angles({0.0, 2 * kPiRef / 3, 4 * kPiRef / 3});
  const PhaseState p = boundary_probe(three, 0);
  CHECK(p.phases[0] == 0.0);
  CHECK(p.phases[1] == doctest::Approx(kPiRef));
  CHECK(p.phases[2] == 0.0);
  CHECK(classify_K(three, p).boundary);

  const NodeSet eq = equally_spaced(100);
  CHECK(classify_K(eq, boundary_probe(eq, 1)).boundary);
  for (std::size_t k : {0u, 1u, 50u, 99u}) CHECK(classify_K(eq, boundary_probe_at(eq, 2, k)).boundary);

  CHECK_THROWS_AS(boundary_probe(NodeSet::from_angles({0.0, 1.0}), 0), DomainError);
}

TEST_CASE("boundary probe energy bound when the forced pair is adjacent") {
  RngStream rng(7);
  const NodeSet nodes = krgg::testing::random_nodes(300, rng);
  const Graph g = build_graph(nodes, GraphModel::rgg(0.2));
  REQUIRE(g.has_edge(0, 1));
  const double bound = scaling_factor(g) * static_cast<double>(common_neighbors(g, 1, 0));
  CHECK(energy(g, boundary_probe(nodes, 1)) >= bound);
  CHECK(bound > 0.0);
}

TEST_CASE("any state with an adjacent antipodal pair obeys the common-neighbor bound") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RngStream rng(seed);
    const auto n = static_cast<std::size_t>(rng.uniform_int(3, 200));
    const NodeSet nodes = krgg::testing::random_nodes(n, rng);
    const Graph g = build_graph(nodes, GraphModel::rgg(rng.uniform(0.05, 1.0)));
    auto u = krgg::testing::random_phases(n, rng);
    const auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    const std::size_t prev = (k + n - 1) % n;
    if (!g.has_edge(k, prev)) continue;
    u[k] = u[prev] + kPiRef;
    ++checked;
    CHECK(energy(g, PhaseState{u}) >= scaling_factor(g) * static_cast<double>(common_neighbors(g, k, prev)));
  }
  CHECK(checked > 50);
}

TEST_CASE("winding index matches the unwrapping oracle and its invariances") {
  int defined = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    RngStream rng(derive_stream_seed(5, 0, seed));
    const auto n = static_cast<std::size_t>(rng.uniform_int(2, 60));
    const NodeSet nodes = krgg::testing::random_nodes(n, rng);
    std::vector<double> u = krgg::testing::random_phases(n, rng);
    // Smooth-ish states wind more often than uniform noise.
    if (seed % 2 == 0) {
      const int q = static_cast<int>(rng.uniform_int(-max_winding(n), max_winding(n)));
      for (std::size_t i = 0; i < n; ++i) u[i] = q * nodes[i] + 0.3 * (u[i] - kPiRef);
    }
    const IndexResult r = winding_index(nodes, PhaseState{u});
    const auto oracle = turns_oracle(u, kIndexAntipodalTol);
    CHECK(r.value == oracle);
    if (!r.defined()) continue;
    ++defined;
    CHECK(std::abs(*r.value) <= max_winding(n));
    const double c = rng.uniform(-50, 50);
    std::vector<double> shifted = u, reflected = u;
    for (double& p : shifted) p += c;
    for (double& p : reflected) p = -p;
    CHECK(winding_index(nodes, PhaseState{shifted}).value == r.value);
    CHECK(winding_index(nodes, PhaseState{reflected}).value == -*r.value);
  }
  CHECK(defined > 1900);
}
