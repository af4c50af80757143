#include "krgg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "krgg/format.hpp"

namespace krgg {

std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::fixed_n ? "fixed_n" : "poissonized";
}

SamplingMode sampling_mode_from_string(std::string_view name) {
  if (name == "fixed_n") return SamplingMode::fixed_n;
  if (name == "poissonized") return SamplingMode::poissonized;
  throw DomainError("unknown sampling mode: " + std::string(name));
}

NodeSet NodeSet::from_angles(std::vector<double> angles, SamplingMode mode) {
  for (double& a : angles) {
    a = normalize(a).value();
  }
  std::sort(angles.begin(), angles.end());
  if (std::adjacent_find(angles.begin(), angles.end()) != angles.end()) {
    throw DomainError("NodeSet: duplicate angles");
  }
  NodeSet s;
  s.angles_ = std::move(angles);
  s.mode_ = mode;
  return s;
}

namespace {

std::vector<double> draw_sorted_angles(std::size_t count, RngStream& rng) {
  std::vector<double> angles(count);
  for (;;) {
    for (double& a : angles) {
      a = normalize(rng.uniform(0.0, kTwoPi)).value();
    }
    std::sort(angles.begin(), angles.end());
    if (std::adjacent_find(angles.begin(), angles.end()) == angles.end()) {
      return angles;
    }
  }
}

}  // namespace

NodeSet sample_nodes(std::size_t n, SamplingMode mode, RngStream& rng,
                     const SamplingOptions& options) {
  if (mode == SamplingMode::fixed_n) {
    if (n < 2) throw DomainError("sample_nodes: fixed_n requires n >= 2");
    return NodeSet::from_angles(draw_sorted_angles(n, rng), mode);
  }
  if (n < 1) throw DomainError("sample_nodes: poissonized intensity must be >= 1");
  for (int attempt = 0; attempt < std::max(1, options.max_attempts); ++attempt) {
    const auto count = rng.poisson(static_cast<double>(n));
    if (count >= 2) {
      return NodeSet::from_angles(draw_sorted_angles(static_cast<std::size_t>(count), rng), mode);
    }
    if (!options.resample_small_poisson) {
      throw DomainError("sample_nodes: Poisson draw produced fewer than 2 nodes");
    }
  }
  throw DomainError("sample_nodes: Poisson draws kept producing fewer than 2 nodes");
}

NodeSet project_from_tube(std::span<const std::vector<double>> points, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("project_from_tube: epsilon must be positive");
  std::vector<double> angles;
  angles.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() < 2) throw DomainError("project_from_tube: points need d >= 2 coordinates");
    const double x = p[0];
    const double y = p[1];
    if (x == 0.0 && y == 0.0) {
      throw DomainError("project_from_tube: projection undefined on the center axis");
    }
    double off_plane = 0.0;
    for (std::size_t c = 2; c < p.size(); ++c) off_plane += p[c] * p[c];
    const double dist = std::sqrt((std::hypot(x, y) - 1.0) * (std::hypot(x, y) - 1.0) + off_plane);
    if (!(dist < epsilon)) {
      throw DomainError("project_from_tube: point outside the epsilon-tube");
    }
    angles.push_back(std::atan2(y, x));
  }
  return NodeSet::from_angles(std::move(angles));
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::rgg: return "rgg";
    case Variant::knn: return "knn";
    case Variant::boolean: return "boolean";
    case Variant::random_nn: return "random-nn";
    case Variant::weighted_kernel: return "kernel";
  }
  return "?";
}

Variant variant_from_string(std::string_view name) {
  if (name == "rgg") return Variant::rgg;
  if (name == "knn") return Variant::knn;
  if (name == "boolean") return Variant::boolean;
  if (name == "random-nn") return Variant::random_nn;
  if (name == "kernel") return Variant::weighted_kernel;
  throw DomainError("unknown graph variant: " + std::string(name));
}

double RadiusLaw::sample(RngStream& rng) const {
  double r;
  do {
    r = rho * rng.uniform01();
  } while (r <= 0.0);
  return r;
}

int CountLaw::sample(RngStream& rng) const {
  if (kind == Kind::constant) return lo;
  return static_cast<int>(rng.uniform_int(lo, hi));
}

namespace {

double bump_raw(double z) { return std::exp(-1.0 / (1.0 - z * z)); }

// All derivatives of the bump vanish at +-1, so the trapezoid rule converges
// faster than any power of the step.
double bump_normalizer() {
  constexpr int kPanels = 20000;
  const double h = 2.0 / kPanels;
  double sum = 0.0;
  for (int i = 1; i < kPanels; ++i) sum += bump_raw(-1.0 + i * h);
  return 1.0 / (sum * h);
}

}  // namespace

double Kernel::operator()(double z) const {
  static const double c = bump_normalizer();
  if (!(std::abs(z) < 1.0)) return 0.0;
  return c * bump_raw(z);
}

std::string Kernel::name() const { return "bump"; }

Kernel Kernel::from_name(std::string_view name) {
  if (name == "bump") return Kernel{};
  throw DomainError("unknown kernel: " + std::string(name));
}

GraphModel GraphModel::rgg(double epsilon) {
  GraphModel m;
  m.variant = Variant::rgg;
  m.epsilon = epsilon;
  return m;
}

GraphModel GraphModel::knn(int k) {
  GraphModel m;
  m.variant = Variant::knn;
  m.k = k;
  return m;
}

GraphModel GraphModel::boolean(RadiusLaw law) {
  GraphModel m;
  m.variant = Variant::boolean;
  m.radius = law;
  return m;
}

GraphModel GraphModel::random_nn(CountLaw law) {
  GraphModel m;
  m.variant = Variant::random_nn;
  m.count = law;
  return m;
}

GraphModel GraphModel::weighted_kernel(double epsilon, Kernel kernel) {
  GraphModel m;
  m.variant = Variant::weighted_kernel;
  m.epsilon = epsilon;
  m.kernel = kernel;
  return m;
}

bool GraphModel::needs_rng() const {
  return variant == Variant::boolean || variant == Variant::random_nn;
}

double GraphModel::effective_epsilon(std::size_t n) const {
  switch (variant) {
    case Variant::rgg:
    case Variant::weighted_kernel:
      return epsilon;
    case Variant::knn:
      return kPi * k / static_cast<double>(n);
    case Variant::boolean:
      return 2.0 * radius.mean();
    case Variant::random_nn:
      return kPi * count.mean() / static_cast<double>(n);
  }
  return epsilon;
}

void GraphModel::validate(std::size_t n) const {
  if (n < 2) throw DomainError("graph: need at least 2 nodes");
  switch (variant) {
    case Variant::rgg:
    case Variant::weighted_kernel:
      if (!(epsilon > 0.0 && epsilon < kPi)) {
        throw DomainError("graph: epsilon must lie in (0, pi)");
      }
      break;
    case Variant::knn:
      if (k < 1 || static_cast<std::size_t>(k) >= n) {
        throw DomainError("graph: knn requires 1 <= k < n");
      }
      break;
    case Variant::boolean:
      if (!(radius.rho > 0.0 && radius.rho <= kPi / 2)) {
        throw DomainError("graph: boolean radius law must produce values in (0, pi/2)");
      }
      break;
    case Variant::random_nn:
      if (count.lo < 1 || count.hi < count.lo || static_cast<std::size_t>(count.hi) >= n) {
        throw DomainError("graph: random-nn counts must lie in [1, n)");
      }
      break;
  }
}

Graph Graph::from_edges(NodeSet nodes, GraphModel model, std::span<const Edge> edges,
                        bool weighted) {
  const std::size_t n = nodes.size();
  std::vector<Edge> undirected;
  undirected.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) throw DomainError("graph: edge endpoint out of range");
    if (e.i == e.j) throw DomainError("graph: self-loop");
    if (weighted && !(e.weight > 0.0)) throw DomainError("graph: weights must be positive");
    undirected.push_back(e.i < e.j ? e : Edge{e.j, e.i, e.weight});
  }
  std::sort(undirected.begin(), undirected.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  undirected.erase(std::unique(undirected.begin(), undirected.end(),
                               [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; }),
                   undirected.end());

  Graph g;
  g.nodes_ = std::move(nodes);
  g.model_ = model;
  g.epsilon_ = model.effective_epsilon(n);
  g.norm_n_ = n;
  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : undirected) {
    ++g.offsets_[e.i + 1];
    ++g.offsets_[e.j + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.targets_.resize(2 * undirected.size());
  if (weighted) g.weights_.resize(2 * undirected.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted by (i, j), so appending keeps each list sorted.
  for (const Edge& e : undirected) {
    const std::size_t a = cursor[e.i]++;
    g.targets_[a] = e.j;
    if (weighted) g.weights_[a] = e.weight;
  }
  for (const Edge& e : undirected) {
    const std::size_t b = cursor[e.j]++;
    g.targets_[b] = e.i;
    if (weighted) g.weights_[b] = e.weight;
  }
  // Second pass appended lower ids after higher ones; restore sorted order.
  for (std::size_t i = 0; i < n; ++i) {
    const auto lo = g.offsets_[i];
    const auto hi = g.offsets_[i + 1];
    if (std::is_sorted(g.targets_.begin() + lo, g.targets_.begin() + hi)) continue;
    std::vector<std::size_t> perm(hi - lo);
    std::iota(perm.begin(), perm.end(), lo);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return g.targets_[a] < g.targets_[b]; });
    std::vector<std::uint32_t> t(perm.size());
    std::vector<double> w(weighted ? perm.size() : 0);
    for (std::size_t p = 0; p < perm.size(); ++p) {
      t[p] = g.targets_[perm[p]];
      if (weighted) w[p] = g.weights_[perm[p]];
    }
    std::copy(t.begin(), t.end(), g.targets_.begin() + lo);
    if (weighted) std::copy(w.begin(), w.end(), g.weights_.begin() + lo);
  }
  return g;
}

Graph Graph::with_normalization(std::size_t n) const {
  if (n == 0) throw DomainError("graph: normalization size must be positive");
  Graph g = *this;
  g.norm_n_ = n;
  g.epsilon_ = g.model_.effective_epsilon(n);
  return g;
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto nb = neighbors(i);
    const auto w = weights(i);
    for (std::size_t s = 0; s < nb.size(); ++s) {
      if (nb[s] > i) {
        out.push_back({static_cast<std::uint32_t>(i), nb[s], w.empty() ? 1.0 : w[s]});
      }
    }
  }
  return out;
}

namespace {

// Pairs (i, j) with geodesic distance below reach(i, j), found by walking
// counterclockwise from each node. max_reach < pi bounds every walk, so each
// unordered pair is visited from exactly one endpoint.
template <class Reach>
std::vector<Edge> forward_scan(const NodeSet& nodes, double max_reach, Reach reach) {
  const std::size_t n = nodes.size();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const Angle xi = nodes.angle(i);
    for (std::size_t step = 1; step < n; ++step) {
      const std::size_t j = (i + step) % n;
      const double d = geodesic_distance(xi, nodes.angle(j));
      const double ahead = j > i ? nodes[j] - nodes[i] : (nodes[j] - nodes[i]) + kTwoPi;
      if (ahead >= max_reach || ahead > kPi) break;
      if (d < reach(i, j)) {
        edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1.0});
      }
    }
  }
  return edges;
}

// Symmetrized nearest-neighbor rule: an edge joins i and j when either is
// among the other's counts[.] nearest. Ties go to the smaller node id.
std::vector<Edge> nearest_neighbor_edges(const NodeSet& nodes, const std::vector<int>& counts) {
  const std::size_t n = nodes.size();
  std::vector<Edge> edges;
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(counts[i]);
    cand.clear();
    if (2 * k >= n - 1) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) cand.push_back(j);
      }
    } else {
      // The k nearest points on a circle lie within k positions either side.
      for (std::size_t s = 1; s <= k; ++s) {
        cand.push_back((i + s) % n);
        cand.push_back((i + n - s) % n);
      }
    }
    const Angle xi = nodes.angle(i);
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
      const double da = geodesic_distance(xi, nodes.angle(a));
      const double db = geodesic_distance(xi, nodes.angle(b));
      return da != db ? da < db : a < b;
    });
    for (std::size_t r = 0; r < k && r < cand.size(); ++r) {
      edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(cand[r]), 1.0});
    }
  }
  return edges;
}

Graph build_impl(const NodeSet& nodes, const GraphModel& model, RngStream* aux) {
  const std::size_t n = nodes.size();
  model.validate(n);
  if (model.needs_rng() && aux == nullptr) {
    throw DomainError("build_graph: variant " + to_string(model.variant) +
                      " needs an auxiliary random stream");
  }
  switch (model.variant) {
    case Variant::rgg: {
      const double eps = model.epsilon;
      auto edges = forward_scan(nodes, eps, [eps](std::size_t, std::size_t) { return eps; });
      return Graph::from_edges(nodes, model, edges);
    }
    case Variant::weighted_kernel: {
      const double eps = model.epsilon;
      auto edges = forward_scan(nodes, eps, [eps](std::size_t, std::size_t) { return eps; });
      for (Edge& e : edges) {
        e.weight = model.kernel(signed_diff(nodes.angle(e.j), nodes.angle(e.i)) / eps);
      }
      // The bump kernel underflows to zero only within ~1e-3 of the support edge.
      std::erase_if(edges, [](const Edge& e) { return !(e.weight > 0.0); });
      return Graph::from_edges(nodes, model, edges, true);
    }
    case Variant::knn: {
      std::vector<int> counts(n, model.k);
      return Graph::from_edges(nodes, model, nearest_neighbor_edges(nodes, counts));
    }
    case Variant::random_nn: {
      std::vector<int> counts(n);
      for (int& c : counts) c = model.count.sample(*aux);
      return Graph::from_edges(nodes, model, nearest_neighbor_edges(nodes, counts));
    }
    case Variant::boolean: {
      std::vector<double> radii(n);
      for (double& r : radii) r = model.radius.sample(*aux);
      const double r_max = *std::max_element(radii.begin(), radii.end());
      auto edges = forward_scan(nodes, std::min(2.0 * r_max, kPi),
                                [&](std::size_t i, std::size_t j) { return radii[i] + radii[j]; });
      return Graph::from_edges(nodes, model, edges);
    }
  }
  throw DomainError("build_graph: unknown variant");
}

}  // namespace

Graph build_graph(const NodeSet& nodes, const GraphModel& model) {
  return build_impl(nodes, model, nullptr);
}

Graph build_graph(const NodeSet& nodes, const GraphModel& model, RngStream& aux) {
  return build_impl(nodes, model, &aux);
}

std::size_t component_count(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> stack;
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(static_cast<std::uint32_t>(s));
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : g.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return components;
}

bool is_connected(const Graph& g) { return g.size() > 0 && component_count(g) == 1; }

std::size_t common_neighbors(const Graph& g, std::size_t i, std::size_t j) {
  if (i >= g.size() || j >= g.size()) throw DomainError("common_neighbors: invalid node id");
  if (i == j) throw DomainError("common_neighbors: ids must differ");
  const auto a = g.neighbors(i);
  const auto b = g.neighbors(j);
  std::size_t count = 0;
  std::size_t p = 0;
  std::size_t q = 0;
  while (p < a.size() && q < b.size()) {
    if (a[p] < b[q]) {
      ++p;
    } else if (b[q] < a[p]) {
      ++q;
    } else {
      ++count;
      ++p;
      ++q;
    }
  }
  return count;
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.size() << ' ' << format_double(g.epsilon()) << ' ' << to_string(g.model().variant)
      << '\n';
  for (const Edge& e : g.edges()) {
    out << e.i << ' ' << e.j;
    if (g.weighted()) out << ' ' << format_double(e.weight);
    out << '\n';
  }
}

GraphFile read_graph(std::istream& in) {
  GraphFile f;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_graph: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> f.n >> f.epsilon >> f.variant)) throw DomainError("read_graph: malformed header");
  }
  f.weighted = f.variant == "kernel";
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Edge e;
    if (!(ls >> e.i >> e.j)) {
      throw DomainError("read_graph: malformed edge on line " + std::to_string(lineno));
    }
    if (f.weighted && !(ls >> e.weight)) {
      throw DomainError("read_graph: missing weight on line " + std::to_string(lineno));
    }
    if (e.i >= f.n || e.j >= f.n || e.i == e.j) {
      throw DomainError("read_graph: invalid edge on line " + std::to_string(lineno));
    }
    f.edges.push_back(e);
  }
  return f;
}

}  // namespace krgg
