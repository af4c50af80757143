#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "krgg/graph.hpp"
#include "support.hpp"

using namespace krgg;
using krgg::testing::kPiRef;

namespace {

using EdgeSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

EdgeSet edge_set(const Graph& g) {
  EdgeSet s;
  for (const Edge& e : g.edges()) s.emplace(e.i, e.j);
  return s;
}

double arc(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2 * kPiRef);
  return std::min(d, 2 * kPiRef - d);
}

// Symmetrized nearest-neighbor rule by exhaustive ranking of all other nodes.
EdgeSet knn_oracle(const NodeSet& nodes, const std::vector<int>& counts) {
  const std::size_t n = nodes.size();
  EdgeSet s;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
      return arc(nodes[i], nodes[a]) < arc(nodes[i], nodes[b]);
    });
    for (int r = 0; r < counts[i]; ++r) {
      const auto j = static_cast<std::uint32_t>(others[static_cast<std::size_t>(r)]);
      s.emplace(std::min<std::uint32_t>(i, j), std::max<std::uint32_t>(i, j));
    }
  }
  return s;
}

// log P(X = k) for X ~ Poisson(mean).
double poisson_log_pmf(double mean, int k) { return k * std::log(mean) - mean - std::lgamma(k + 1.0); }

}  // namespace

TEST_CASE("sample_nodes returns sorted angles in range") {
  RngStream rng(1);
  const NodeSet two = sample_nodes(2, SamplingMode::fixed_n, rng);
  REQUIRE(two.size() == 2);
  CHECK(two[0] < two[1]);
  CHECK(two[0] >= 0.0);
  CHECK(two[1] < 2 * kPiRef);

  const NodeSet many = sample_nodes(5000, SamplingMode::fixed_n, rng);
  CHECK(std::is_sorted(many.angles().begin(), many.angles().end()));
  CHECK(std::adjacent_find(many.angles().begin(), many.angles().end()) == many.angles().end());
}

TEST_CASE("sample_nodes is deterministic per seed") {
  RngStream a(99), b(99);
  CHECK(sample_nodes(300, SamplingMode::fixed_n, a) == sample_nodes(300, SamplingMode::fixed_n, b));
  RngStream c(99), d(99);
  CHECK(sample_nodes(300, SamplingMode::poissonized, c) ==
        sample_nodes(300, SamplingMode::poissonized, d));
}

TEST_CASE("sample_nodes rejects too few nodes") {
  RngStream rng(1);
  CHECK_THROWS_AS(sample_nodes(1, SamplingMode::fixed_n, rng), DomainError);
  CHECK_THROWS_AS(sample_nodes(0, SamplingMode::poissonized, rng), DomainError);
}

TEST_CASE("small Poisson intensities resample or fail per option") {
  RngStream rng(5);
  SamplingOptions strict;
  strict.resample_small_poisson = false;
  int failures = 0;
  for (int t = 0; t < 200; ++t) {
    try {
      const NodeSet s = sample_nodes(1, SamplingMode::poissonized, rng, strict);
      CHECK(s.size() >= 2);
    } catch (const DomainError&) {
      ++failures;
    }
  }
  // P(Poisson(1) < 2) = 2/e, so failures are common.
  CHECK(failures > 40);
  for (int t = 0; t < 200; ++t) CHECK(sample_nodes(1, SamplingMode::poissonized, rng).size() >= 2);
}

TEST_CASE("Poissonized counts concentrate as the Poisson tail predicts") {
  double inside = 0.0;
  for (int k = 9500; k <= 10500; ++k) inside += std::exp(poisson_log_pmf(1e4, k));
  CHECK(inside >= 0.9999);

  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RngStream rng(derive_stream_seed(2024, 0, seed));
    const NodeSet s = sample_nodes(10000, SamplingMode::poissonized, rng);
    CHECK(s.size() >= 9500);
    CHECK(s.size() <= 10500);
    CHECK(s.mode() == SamplingMode::poissonized);
  }
}

TEST_CASE("rgg on the square nodes") {
  const Graph g = krgg::testing::square_cycle();
  CHECK(edge_set(g) == EdgeSet{{0, 1}, {0, 3}, {1, 2}, {2, 3}});
  CHECK(build_graph(krgg::testing::square_nodes(), GraphModel::rgg(0.1)).edge_count() == 0);
}

TEST_CASE("knn on the square nodes matches the exhaustive rule") {
  const NodeSet nodes = krgg::testing::square_nodes();
  const Graph g = build_graph(nodes, GraphModel::knn(1));
  CHECK(edge_set(g) == knn_oracle(nodes, {1, 1, 1, 1}));
  // Every node has two nearest neighbors at pi/2; the smaller id wins, so
  // node 2 links to 1 and node 3 to 0, and the pair (2, 3) is never chosen.
  CHECK(edge_set(g) == EdgeSet{{0, 1}, {0, 3}, {1, 2}});
  // With two neighbors each the full cycle appears.
  CHECK(edge_set(build_graph(nodes, GraphModel::knn(2))) == EdgeSet{{0, 1}, {0, 3}, {1, 2}, {2, 3}});
}

TEST_CASE("rgg edges are exactly the pairs closer than eps") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed);
    const NodeSet nodes = sample_nodes(150, SamplingMode::fixed_n, rng);
    const double eps = rng.uniform(0.01, 3.0);
    const Graph g = build_graph(nodes, GraphModel::rgg(eps));
    EdgeSet expected;
    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
      for (std::uint32_t j = i + 1; j < nodes.size(); ++j) {
        if (geodesic_distance(nodes.angle(i), nodes.angle(j)) < eps) expected.emplace(i, j);
      }
    }
    CHECK(edge_set(g) == expected);
  }
}

TEST_CASE("rgg uses a strict inequality") {
  const NodeSet nodes = NodeSet::from_angles({0.0, 0.5, 3.0});
  const double eps = geodesic_distance(nodes.angle(0), nodes.angle(1));
  CHECK_FALSE(build_graph(nodes, GraphModel::rgg(eps)).has_edge(0, 1));
  CHECK(build_graph(nodes, GraphModel::rgg(std::nextafter(eps, 1.0))).has_edge(0, 1));
}

TEST_CASE("knn matches the exhaustive rule on random nodes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(100 + seed);
    const NodeSet nodes = sample_nodes(120, SamplingMode::fixed_n, rng);
    const int k = static_cast<int>(rng.uniform_int(1, 10));
    const Graph g = build_graph(nodes, GraphModel::knn(k));
    CHECK(edge_set(g) == knn_oracle(nodes, std::vector<int>(nodes.size(), k)));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.degree(i) >= static_cast<std::size_t>(k));
  }
}

TEST_CASE("knn ties go to the smaller node id") {
  // Node 1 sits midway between nodes 0 and 2.
  const NodeSet nodes = NodeSet::from_angles({0.0, 1.0, 2.0, 4.0});
  const Graph g = build_graph(nodes, GraphModel::knn(1));
  // Node 1 keeps 0 over 2; node 2 and node 3 still pick 1 and 2.
  CHECK(edge_set(g) == EdgeSet{{0, 1}, {1, 2}, {2, 3}});
  CHECK(edge_set(g) == knn_oracle(nodes, {1, 1, 1, 1}));
}

TEST_CASE("random-nn with counts replayed from the same stream") {
  RngStream rng(8);
  const NodeSet nodes = sample_nodes(100, SamplingMode::fixed_n, rng);
  const CountLaw law = CountLaw::uniform(1, 6);
  RngStream aux(77), replay(77);
  const Graph g = build_graph(nodes, GraphModel::random_nn(law), aux);
  std::vector<int> counts(nodes.size());
  for (int& c : counts) c = law.sample(replay);
  CHECK(edge_set(g) == knn_oracle(nodes, counts));
}

TEST_CASE("random-nn with a constant law reduces to knn") {
  RngStream rng(9);
  const NodeSet nodes = sample_nodes(100, SamplingMode::fixed_n, rng);
  RngStream aux(1);
  CHECK(edge_set(build_graph(nodes, GraphModel::random_nn(CountLaw::constant(4)), aux)) ==
        edge_set(build_graph(nodes, GraphModel::knn(4))));
}

TEST_CASE("boolean edges are the overlapping arcs") {
  RngStream rng(10);
  const NodeSet nodes = sample_nodes(200, SamplingMode::fixed_n, rng);
  const RadiusLaw law{0.05};
  RngStream aux(3), replay(3);
  const Graph g = build_graph(nodes, GraphModel::boolean(law), aux);
  std::vector<double> r(nodes.size());
  for (double& x : r) x = law.sample(replay);
  EdgeSet expected;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    CHECK(r[i] > 0.0);
    CHECK(r[i] < 0.05);
    for (std::uint32_t j = i + 1; j < nodes.size(); ++j) {
      if (arc(nodes[i], nodes[j]) < r[i] + r[j]) expected.emplace(i, j);
    }
  }
  CHECK(edge_set(g) == expected);
  CHECK(g.epsilon() == doctest::Approx(0.05));
}

TEST_CASE("the bump kernel is even, nonnegative and has unit integral") {
  const Kernel k;
  double integral = 0.0;
  const int m = 200000;
  const double h = 2.0 / m;
  for (int i = 0; i <= m; ++i) {
    const double z = -1.0 + i * h;
    const double w = (i == 0 || i == m) ? 0.5 : 1.0;
    integral += w * k(z) * h;
    CHECK(k(z) >= 0.0);
    CHECK(k(z) == k(-z));
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(k(1.0) == 0.0);
  CHECK(k(-1.5) == 0.0);
}

TEST_CASE("kernel weights are symmetric and positive on edges") {
  RngStream rng(12);
  const NodeSet nodes = sample_nodes(300, SamplingMode::fixed_n, rng);
  const double eps = 0.2;
  const Graph g = build_graph(nodes, GraphModel::weighted_kernel(eps));
  REQUIRE(g.weighted());
  const Kernel k;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    const auto w = g.weights(i);
    for (std::size_t s = 0; s < nb.size(); ++s) {
      CHECK(w[s] > 0.0);
      CHECK(arc(nodes[i], nodes[nb[s]]) < eps);
      CHECK(w[s] == doctest::Approx(k(arc(nodes[i], nodes[nb[s]]) / eps)).epsilon(1e-12));
      const auto back = g.neighbors(nb[s]);
      const auto pos = std::lower_bound(back.begin(), back.end(), static_cast<std::uint32_t>(i));
      REQUIRE(pos != back.end());
      CHECK(g.weights(nb[s])[static_cast<std::size_t>(pos - back.begin())] == w[s]);
    }
  }
}

TEST_CASE("adjacency is symmetric, sorted and loop-free") {
  RngStream rng(13);
  const NodeSet nodes = sample_nodes(400, SamplingMode::fixed_n, rng);
  RngStream aux(4);
  for (const GraphModel& m : {GraphModel::rgg(0.05), GraphModel::knn(3),
                              GraphModel::boolean(RadiusLaw{0.03}),
                              GraphModel::random_nn(CountLaw::uniform(1, 5))}) {
    const Graph g = build_graph(nodes, m, aux);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto nb = g.neighbors(i);
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      for (auto j : nb) {
        CHECK(j != i);
        CHECK(g.has_edge(j, i));
      }
    }
  }
}

TEST_CASE("build_graph validates parameters") {
  const NodeSet nodes = krgg::testing::square_nodes();
  CHECK_THROWS_AS(build_graph(nodes, GraphModel::rgg(0.0)), DomainError);
  CHECK_THROWS_AS(build_graph(nodes, GraphModel::rgg(4.0)), DomainError);
  CHECK_THROWS_AS(build_graph(nodes, GraphModel::knn(0)), DomainError);
  CHECK_THROWS_AS(build_graph(nodes, GraphModel::knn(4)), DomainError);
  CHECK_THROWS_AS(build_graph(NodeSet::from_angles({1.0}), GraphModel::rgg(0.5)), DomainError);
  // Random variants need their auxiliary stream.
  CHECK_THROWS_AS(build_graph(nodes, GraphModel::boolean(RadiusLaw{0.1})), DomainError);
}

TEST_CASE("project_from_tube examples") {
  const double eps = 0.1;
  const std::vector<std::vector<double>> pts{{1 + eps / 2, 0, 0}, {0, -(1 - eps / 2), 0}};
  const NodeSet s = project_from_tube(pts, eps);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(3 * kPiRef / 2));
  const std::vector<std::vector<double>> axis{{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(project_from_tube(axis, eps), DomainError);
  const std::vector<std::vector<double>> outside{{2.0, 0}, {0, 1}};
  CHECK_THROWS_AS(project_from_tube(outside, eps), DomainError);
}

TEST_CASE("connectivity examples") {
  CHECK(is_connected(krgg::testing::square_cycle()));
  CHECK_FALSE(is_connected(build_graph(krgg::testing::square_nodes(), GraphModel::rgg(0.1))));
  const NodeSet six = NodeSet::from_angles({0.0, 0.1, 0.2, 3.0, 3.1, 3.2});
  const Graph triangles = build_graph(six, GraphModel::rgg(0.25));
  CHECK(triangles.edge_count() == 6);
  CHECK_FALSE(is_connected(triangles));
  CHECK(component_count(triangles) == 2);
}

TEST_CASE("common neighbor examples") {
  const Graph g = krgg::testing::square_cycle();
  CHECK(common_neighbors(g, 0, 2) == 2);
  CHECK(common_neighbors(g, 0, 1) == 0);
  CHECK_THROWS_AS(common_neighbors(g, 1, 1), DomainError);
  CHECK_THROWS_AS(common_neighbors(g, 0, 9), DomainError);
}

TEST_CASE("mean degree concentrates at n eps / pi") {
  const std::size_t n = 10000;
  const double eps = std::pow(static_cast<double>(n), -0.7);
  const double expected = static_cast<double>(n) * eps / kPiRef;
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream rng(derive_stream_seed(31, 0, seed));
    const Graph g = build_graph(sample_nodes(n, SamplingMode::fixed_n, rng), GraphModel::rgg(eps));
    const double mean_degree = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(n);
    if (std::abs(mean_degree - expected) <= 0.1 * expected) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("component counts match the expected number of wide gaps") {
  // Each of the n circular spacings exceeds eps with probability
  // (1 - eps/2pi)^(n-1); a graph with g >= 1 wide gaps has g components.
  const std::size_t n = 10000;
  const double eps = std::pow(static_cast<double>(n), -0.7);
  const double expected_gaps = n * std::pow(1.0 - eps / (2 * kPiRef), static_cast<double>(n - 1));
  double total = 0.0;
  const int seeds = 40;
  for (int seed = 0; seed < seeds; ++seed) {
    RngStream rng(derive_stream_seed(32, 0, static_cast<std::uint64_t>(seed)));
    const Graph g = build_graph(sample_nodes(n, SamplingMode::fixed_n, rng), GraphModel::rgg(eps));
    total += static_cast<double>(component_count(g));
  }
  // Gap counts have standard deviation below sqrt(expected) ~ 29 per graph.
  CHECK(total / seeds == doctest::Approx(expected_gaps).epsilon(0.03));
  CHECK(expected_gaps > 100.0);
}

TEST_CASE("connectivity regime") {
  const std::size_t n = 10000;
  const double log_n = std::log(static_cast<double>(n));
  // Connected: eps = 2 * 2pi log n / n leaves about 1/n expected wide gaps.
  int connected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream rng(derive_stream_seed(33, 0, seed));
    const double eps = 4 * kPiRef * log_n / static_cast<double>(n);
    if (is_connected(build_graph(sample_nodes(n, SamplingMode::fixed_n, rng), GraphModel::rgg(eps)))) {
      ++connected;
    }
  }
  CHECK(connected >= 99);
  // Disconnected: eps = 0.2 log n / n.
  int disconnected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream rng(derive_stream_seed(34, 0, seed));
    const double eps = 0.2 * log_n / static_cast<double>(n);
    if (!is_connected(build_graph(sample_nodes(n, SamplingMode::fixed_n, rng), GraphModel::rgg(eps)))) {
      ++disconnected;
    }
  }
  CHECK(disconnected >= 50);
}

TEST_CASE("graph text format round trip") {
  RngStream rng(14);
  const NodeSet nodes = sample_nodes(50, SamplingMode::fixed_n, rng);
  for (const GraphModel& m : {GraphModel::rgg(0.3), GraphModel::weighted_kernel(0.3)}) {
    const Graph g = build_graph(nodes, m);
    std::stringstream ss;
    write_graph(ss, g);
    const GraphFile f = read_graph(ss);
    CHECK(f.n == 50);
    CHECK(f.epsilon == g.epsilon());
    CHECK(f.variant == to_string(m.variant));
    CHECK(f.weighted == g.weighted());
    const auto edges = g.edges();
    REQUIRE(f.edges.size() == edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      CHECK(f.edges[e].i == edges[e].i);
      CHECK(f.edges[e].j == edges[e].j);
      CHECK(f.edges[e].weight == edges[e].weight);
    }
  }
}

TEST_CASE("graph reader rejects malformed input") {
  std::stringstream bad_header("3 abc rgg\n");
  CHECK_THROWS(read_graph(bad_header));
  std::stringstream bad_edge("3 0.5 rgg\n0 7\n");
  CHECK_THROWS(read_graph(bad_edge));
}

TEST_CASE("effective epsilon per variant") {
  CHECK(GraphModel::knn(5).effective_epsilon(100) == doctest::Approx(kPiRef * 5 / 100));
  CHECK(GraphModel::boolean(RadiusLaw{0.2}).effective_epsilon(100) == doctest::Approx(0.2));
  CHECK(GraphModel::random_nn(CountLaw::uniform(2, 6)).effective_epsilon(100) ==
        doctest::Approx(kPiRef * 4 / 100));
  CHECK(GraphModel::rgg(0.3).effective_epsilon(100) == 0.3);
}
