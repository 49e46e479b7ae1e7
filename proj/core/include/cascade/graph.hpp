#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cascade/network_spec.hpp"

namespace cascade {

// Immutable simple undirected graph in compressed adjacency form. Safe to
// share read-only between simulation workers.
class Graph {
 public:
  using Edge = std::pair<std::uint32_t, std::uint32_t>;

  // `edges` must be simple (no self loops, no duplicates); pairs may be in
  // any order. Throws std::invalid_argument otherwise.
  static Graph from_edges(const NetworkSpec& spec, std::vector<Edge> edges);

  std::uint64_t num_nodes() const { return num_nodes_; }
  std::uint64_t num_links() const { return num_links_; }

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(std::uint32_t v) const {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }

  const NetworkSpec& spec() const { return spec_; }

  // Canonical sorted (a < b) edge list, rebuilt from the adjacency.
  std::vector<Edge> edge_list() const;

 private:
  Graph() = default;

  std::uint64_t num_nodes_ = 0;
  std::uint64_t num_links_ = 0;
  std::vector<std::uint64_t> offsets_;   // size num_nodes + 1
  std::vector<std::uint32_t> neighbors_; // size 2 * num_links
  NetworkSpec spec_;
};

// Static-model scale-free generator: node i in {1..N} carries weight
// i^(-1/(gamma-1)); endpoints are drawn with probability proportional to the
// weights until num_links distinct edges exist. Deterministic in spec.seed.
Graph generate_scale_free(const NetworkSpec& spec);

// Square lattice of linear_size^2 nodes, optionally periodic.
Graph generate_square_lattice(const NetworkSpec& spec);

// Dispatch on spec.model.
Graph generate(const NetworkSpec& spec);

struct DegreeHistogram {
  std::map<std::uint32_t, std::uint64_t> counts;
  std::optional<double> tail_exponent; // fitted over k >= tail_fit_kmin
  std::uint32_t tail_fit_kmin = 0;
  std::uint64_t tail_fit_samples = 0;
};

// Histogram of node degrees; for scale-free graphs the power-law tail
// exponent is estimated by maximum likelihood over k >= 20.
DegreeHistogram degree_distribution(const Graph& g);

// Continuous-approximation ML estimator for the exponent of a power-law
// tail, fitted over samples >= kmin: gamma_hat = 1 + n / sum ln(k/(kmin-0.5)).
// Exposed so tests can calibrate it against exact power-law samples.
std::optional<double> power_law_tail_mle(std::span<const std::uint32_t> samples,
                                         std::uint32_t kmin);

class GraphIoError : public std::runtime_error {
 public:
  enum class Kind { Malformed, VersionMismatch, ChecksumMismatch };

  GraphIoError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Binary graph file: header with spec echo, sorted edge list, FNV-1a64
// checksum. Layout documented in docs/graph_format.md.
void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

}  // namespace cascade
