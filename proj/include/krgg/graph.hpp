#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krgg/circle.hpp"
#include "krgg/rng.hpp"

namespace krgg {

enum class SamplingMode { fixed_n, poissonized };

std::string to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(std::string_view name);

/// Node positions on the circle, strictly increasing in [0, 2pi).
/// Node ids are positions in this order, so label order and counterclockwise
/// order coincide.
class NodeSet {
 public:
  NodeSet() = default;

  /// Normalizes and sorts the given angles. Duplicates are rejected.
  static NodeSet from_angles(std::vector<double> angles,
                             SamplingMode mode = SamplingMode::fixed_n);

  std::span<const double> angles() const { return angles_; }
  Angle angle(std::size_t i) const { return normalize(angles_[i]); }
  double operator[](std::size_t i) const { return angles_[i]; }
  std::size_t size() const { return angles_.size(); }
  SamplingMode mode() const { return mode_; }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<double> angles_;
  SamplingMode mode_ = SamplingMode::fixed_n;
};

struct SamplingOptions {
  // Poissonized draws with fewer than two points are redrawn when set,
  // otherwise they raise DomainError.
  bool resample_small_poisson = true;
  int max_attempts = 64;
};

/// fixed_n: exactly n i.i.d. uniform angles. poissonized: Poisson(n) of them.
NodeSet sample_nodes(std::size_t n, SamplingMode mode, RngStream& rng,
                     const SamplingOptions& options = {});

/// Radial projection of points lying in the epsilon-tube around the unit
/// circle {(x, y, 0, ..., 0) : x^2 + y^2 = 1}.
NodeSet project_from_tube(std::span<const std::vector<double>> points, double epsilon);

enum class Variant { rgg, knn, boolean, random_nn, weighted_kernel };

std::string to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Radius law for the boolean model: uniform on (0, rho).
struct RadiusLaw {
  double rho = 0.0;

  double mean() const { return 0.5 * rho; }
  double sample(RngStream& rng) const;

  friend bool operator==(const RadiusLaw&, const RadiusLaw&) = default;
};

/// Neighbor-count law for the random N-nn model.
struct CountLaw {
  enum class Kind { constant, uniform_int };
  Kind kind = Kind::constant;
  int lo = 1;
  int hi = 1;

  static CountLaw constant(int k) { return {Kind::constant, k, k}; }
  static CountLaw uniform(int lo, int hi) { return {Kind::uniform_int, lo, hi}; }

  double mean() const { return 0.5 * (lo + hi); }
  int sample(RngStream& rng) const;

  friend bool operator==(const CountLaw&, const CountLaw&) = default;
};

/// Even, smooth kernel supported in (-1, 1) with unit integral.
struct Kernel {
  enum class Kind { bump };
  Kind kind = Kind::bump;

  double operator()(double z) const;
  std::string name() const;
  static Kernel from_name(std::string_view name);

  friend bool operator==(const Kernel&, const Kernel&) = default;
};

struct GraphModel {
  Variant variant = Variant::rgg;
  double epsilon = 0.0;  // rgg, weighted_kernel
  int k = 0;             // knn
  RadiusLaw radius;      // boolean
  CountLaw count;        // random_nn
  Kernel kernel;         // weighted_kernel

  static GraphModel rgg(double epsilon);
  static GraphModel knn(int k);
  static GraphModel boolean(RadiusLaw law);
  static GraphModel random_nn(CountLaw law);
  static GraphModel weighted_kernel(double epsilon, Kernel kernel = {});

  /// Random variants draw auxiliary radii or counts.
  bool needs_rng() const;
  bool weighted() const { return variant == Variant::weighted_kernel; }

  /// Length scale entering the energy normalization pi / (2 n^2 eps^3).
  /// knn uses pi k / n, boolean 2 E(r), random_nn pi E(N) / n.
  double effective_epsilon(std::size_t n) const;

  /// Throws DomainError when the parameters are invalid for n nodes.
  void validate(std::size_t n) const;

  friend bool operator==(const GraphModel&, const GraphModel&) = default;
};

struct Edge {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double weight = 1.0;
};

/// Undirected graph over a NodeSet in compressed adjacency form. Adjacency
/// lists are sorted; weights, when present, are stored per directed slot.
class Graph {
 public:
  Graph() = default;

  /// Builds the symmetric structure from undirected edges. Duplicate edges are
  /// merged; self-loops and out-of-range ids raise DomainError.
  static Graph from_edges(NodeSet nodes, GraphModel model, std::span<const Edge> edges,
                          bool weighted = false);

  const NodeSet& nodes() const { return nodes_; }
  const GraphModel& model() const { return model_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return targets_.size() / 2; }
  bool weighted() const { return !weights_.empty(); }

  /// Effective epsilon used for the energy scaling.
  double epsilon() const { return epsilon_; }
  /// The n of the energy scaling pi / (2 n^2 eps^3). Equals size() unless
  /// overridden, e.g. by the Poisson intensity for Poissonized node sets.
  std::size_t normalization_size() const { return norm_n_; }
  /// Copy whose energy scaling uses n in place of the node count.
  Graph with_normalization(std::size_t n) const;

  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Empty span for unweighted graphs.
  std::span<const double> weights(std::size_t i) const {
    if (weights_.empty()) return {};
    return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(std::size_t i, std::size_t j) const;

  /// Undirected edges with i < j, in lexicographic order.
  std::vector<Edge> edges() const;

 private:
  NodeSet nodes_;
  GraphModel model_;
  double epsilon_ = 0.0;
  std::size_t norm_n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
};

/// Deterministic variants only (rgg, knn, weighted_kernel).
Graph build_graph(const NodeSet& nodes, const GraphModel& model);
/// aux supplies the per-node radii or neighbor counts of the random variants.
Graph build_graph(const NodeSet& nodes, const GraphModel& model, RngStream& aux);

bool is_connected(const Graph& g);
std::size_t component_count(const Graph& g);

/// |N(i) ∩ N(j)|.
std::size_t common_neighbors(const Graph& g, std::size_t i, std::size_t j);

/// Line-oriented text: header "n epsilon variant", then "i j [w]" per edge.
void write_graph(std::ostream& out, const Graph& g);

struct GraphFile {
  std::size_t n = 0;
  double epsilon = 0.0;
  std::string variant;
  std::vector<Edge> edges;
  bool weighted = false;
};
GraphFile read_graph(std::istream& in);

}  // namespace krgg
