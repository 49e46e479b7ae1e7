#include "cascade/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "cascade/hash.hpp"
#include "cascade/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "graph file layout assumes a little-endian host");

namespace cascade {

namespace {

constexpr char kGraphMagic[8] = {'C', 'A', 'S', 'G', 'R', 'P', 'H', '\0'};
constexpr std::uint32_t kGraphFormatVersion = 1;
constexpr std::uint64_t kMaxConsecutiveRejections = 2'000'000;

}  // namespace

std::string to_string(NetworkModel model) {
  switch (model) {
    case NetworkModel::ScaleFreeStatic: return "static";
    case NetworkModel::SquareLattice: return "lattice";
  }
  return "unknown";
}

NetworkModel network_model_from_string(const std::string& name) {
  if (name == "static") return NetworkModel::ScaleFreeStatic;
  if (name == "lattice") return NetworkModel::SquareLattice;
  throw std::invalid_argument("unknown network model '" + name + "'");
}

NetworkSpec NetworkSpec::scale_free(std::uint64_t nodes, double gamma, std::uint64_t links,
                                    std::uint64_t seed) {
  NetworkSpec spec;
  spec.model = NetworkModel::ScaleFreeStatic;
  spec.num_nodes = nodes;
  spec.gamma = gamma;
  spec.num_links = links;
  spec.seed = seed;
  spec.validate();
  return spec;
}

NetworkSpec NetworkSpec::lattice(std::uint32_t linear_size, bool periodic, std::uint64_t seed) {
  NetworkSpec spec;
  spec.model = NetworkModel::SquareLattice;
  spec.linear_size = linear_size;
  spec.num_nodes = static_cast<std::uint64_t>(linear_size) * linear_size;
  spec.periodic = periodic;
  spec.seed = seed;
  spec.validate();
  return spec;
}

void NetworkSpec::validate() const {
  if (num_nodes == 0) throw std::invalid_argument("num_nodes must be positive");
  if (num_nodes > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("num_nodes exceeds 32-bit node id range");
  switch (model) {
    case NetworkModel::ScaleFreeStatic: {
      if (num_nodes < 2) throw std::invalid_argument("scale-free graph needs >= 2 nodes");
      if (!(gamma > 2.0))
        throw std::invalid_argument("gamma must exceed 2 (finite mean degree)");
      if (num_links == 0) throw std::invalid_argument("num_links must be positive");
      const std::uint64_t max_links = num_nodes * (num_nodes - 1) / 2;
      if (num_links > max_links)
        throw std::invalid_argument("num_links exceeds simple-graph capacity N(N-1)/2");
      break;
    }
    case NetworkModel::SquareLattice: {
      if (linear_size < 2) throw std::invalid_argument("linear_size must be >= 2");
      if (periodic && linear_size < 3)
        throw std::invalid_argument("periodic lattice needs linear_size >= 3 "
                                    "(wrap links duplicate otherwise)");
      if (num_nodes != static_cast<std::uint64_t>(linear_size) * linear_size)
        throw std::invalid_argument("num_nodes must equal linear_size^2");
      break;
    }
  }
}

Graph Graph::from_edges(const NetworkSpec& spec, std::vector<Edge> edges) {
  spec.validate();
  const std::uint64_t n = spec.num_nodes;

  Graph g;
  g.num_nodes_ = n;
  g.num_links_ = edges.size();
  g.spec_ = spec;
  g.offsets_.assign(n + 1, 0);

  for (auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self loop in edge list");
    if (a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
    if (a > b) std::swap(a, b);
    ++g.offsets_[a + 1];
    ++g.offsets_[b + 1];
  }
  for (std::uint64_t v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];

  g.neighbors_.resize(2 * edges.size());
  std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    g.neighbors_[cursor[a]++] = b;
    g.neighbors_[cursor[b]++] = a;
  }
  for (std::uint64_t v = 0; v < n; ++v) {
    auto begin = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto end = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(begin, end);
    if (std::adjacent_find(begin, end) != end)
      throw std::invalid_argument("duplicate edge in edge list");
  }
  return g;
}

std::vector<Graph::Edge> Graph::edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(num_links_);
  for (std::uint32_t v = 0; v < num_nodes_; ++v) {
    for (std::uint32_t u : neighbors(v)) {
      if (v < u) edges.emplace_back(v, u);
    }
  }
  return edges;
}

namespace {

// Sorted-vector adjacency used only while generating; memory-lean and gives
// O(log deg) membership tests.
class EdgeAccumulator {
 public:
  explicit EdgeAccumulator(std::uint64_t n) : adj_(n) {}

  bool contains(std::uint32_t a, std::uint32_t b) const {
    const auto& list = adj_[a].size() <= adj_[b].size() ? adj_[a] : adj_[b];
    const std::uint32_t key = adj_[a].size() <= adj_[b].size() ? b : a;
    return std::binary_search(list.begin(), list.end(), key);
  }

  void insert(std::uint32_t a, std::uint32_t b) {
    insert_one(adj_[a], b);
    insert_one(adj_[b], a);
  }

  std::vector<Graph::Edge> take_edges() {
    std::vector<Graph::Edge> edges;
    for (std::uint32_t v = 0; v < adj_.size(); ++v) {
      for (std::uint32_t u : adj_[v]) {
        if (v < u) edges.emplace_back(v, u);
      }
    }
    return edges;
  }

 private:
  static void insert_one(std::vector<std::uint32_t>& list, std::uint32_t value) {
    list.insert(std::lower_bound(list.begin(), list.end(), value), value);
  }

  std::vector<std::vector<std::uint32_t>> adj_;
};

}  // namespace

Graph generate_scale_free(const NetworkSpec& spec) {
  spec.validate();
  if (spec.model != NetworkModel::ScaleFreeStatic)
    throw std::invalid_argument("generate_scale_free requires a ScaleFreeStatic spec");

  const std::uint64_t n = spec.num_nodes;
  const double alpha = 1.0 / (spec.gamma - 1.0);

  // Cumulative weights w_i = i^-alpha, i = 1..N.
  std::vector<double> cumulative(n);
  long double running = 0.0L;
  for (std::uint64_t i = 0; i < n; ++i) {
    running += std::pow(static_cast<double>(i + 1), -alpha);
    cumulative[i] = static_cast<double>(running);
  }
  const double total_weight = cumulative.back();

  Rng rng(spec.seed);
  auto draw_node = [&]() -> std::uint32_t {
    const double u = rng.u01() * total_weight;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative.begin());
  };

  EdgeAccumulator acc(n);
  std::uint64_t placed = 0;
  std::uint64_t consecutive_rejections = 0;
  while (placed < spec.num_links) {
    const std::uint32_t a = draw_node();
    const std::uint32_t b = draw_node();
    if (a == b || acc.contains(a, b)) {
      if (++consecutive_rejections > kMaxConsecutiveRejections)
        throw std::runtime_error(
            "edge insertion stalled: rejection budget exhausted "
            "(link count too close to saturation for this weight profile)");
      continue;
    }
    acc.insert(a, b);
    ++placed;
    consecutive_rejections = 0;
  }

  return Graph::from_edges(spec, acc.take_edges());
}

Graph generate_square_lattice(const NetworkSpec& spec) {
  spec.validate();
  if (spec.model != NetworkModel::SquareLattice)
    throw std::invalid_argument("generate_square_lattice requires a SquareLattice spec");

  const std::uint32_t l = spec.linear_size;
  std::vector<Graph::Edge> edges;
  edges.reserve(2ULL * l * l);
  auto id = [l](std::uint32_t r, std::uint32_t c) { return r * l + c; };
  for (std::uint32_t r = 0; r < l; ++r) {
    for (std::uint32_t c = 0; c < l; ++c) {
      if (c + 1 < l) edges.emplace_back(id(r, c), id(r, c + 1));
      else if (spec.periodic) edges.emplace_back(id(r, c), id(r, 0));
      if (r + 1 < l) edges.emplace_back(id(r, c), id(r + 1, c));
      else if (spec.periodic) edges.emplace_back(id(r, c), id(0, c));
    }
  }
  return Graph::from_edges(spec, std::move(edges));
}

Graph generate(const NetworkSpec& spec) {
  return spec.model == NetworkModel::ScaleFreeStatic ? generate_scale_free(spec)
                                                     : generate_square_lattice(spec);
}

std::optional<double> power_law_tail_mle(std::span<const std::uint32_t> samples,
                                         std::uint32_t kmin) {
  double log_sum = 0.0;
  std::uint64_t n = 0;
  for (std::uint32_t k : samples) {
    if (k < kmin) continue;
    log_sum += std::log(static_cast<double>(k) / (kmin - 0.5));
    ++n;
  }
  if (n < 10 || log_sum <= 0.0) return std::nullopt;
  return 1.0 + static_cast<double>(n) / log_sum;
}

DegreeHistogram degree_distribution(const Graph& g) {
  constexpr std::uint32_t kTailFitKmin = 20;

  DegreeHistogram hist;
  std::vector<std::uint32_t> degrees(g.num_nodes());
  for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
    degrees[v] = g.degree(v);
    ++hist.counts[degrees[v]];
  }
  if (g.spec().model == NetworkModel::ScaleFreeStatic) {
    hist.tail_fit_kmin = kTailFitKmin;
    hist.tail_exponent = power_law_tail_mle(degrees, kTailFitKmin);
    for (std::uint32_t k : degrees)
      if (k >= kTailFitKmin) ++hist.tail_fit_samples;
  }
  return hist;
}

namespace {

struct GraphHeader {
  char magic[8];
  std::uint32_t version;
  std::uint8_t model;
  std::uint8_t periodic;
  std::uint16_t reserved;
  std::uint64_t num_nodes;
  std::uint64_t num_links;
  double gamma;
  std::uint64_t linear_size;
  std::uint64_t seed;
};
static_assert(sizeof(GraphHeader) == 56);

}  // namespace

void save_graph(const Graph& g, const std::filesystem::path& path) {
  const auto edges = g.edge_list();
  const NetworkSpec& spec = g.spec();

  GraphHeader header{};
  std::memcpy(header.magic, kGraphMagic, sizeof(kGraphMagic));
  header.version = kGraphFormatVersion;
  header.model = static_cast<std::uint8_t>(spec.model);
  header.periodic = spec.periodic ? 1 : 0;
  header.reserved = 0;
  header.num_nodes = spec.num_nodes;
  header.num_links = g.num_links();
  header.gamma = spec.gamma;
  header.linear_size = spec.linear_size;
  header.seed = spec.seed;

  Fnv1a64 checksum;
  checksum.update(&header, sizeof(header));
  if (!edges.empty())
    checksum.update(edges.data(), edges.size() * sizeof(Graph::Edge));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(&header), sizeof(header));
  if (!edges.empty())
    out.write(reinterpret_cast<const char*>(edges.data()),
              static_cast<std::streamsize>(edges.size() * sizeof(Graph::Edge)));
  const std::uint64_t digest = checksum.value();
  out.write(reinterpret_cast<const char*>(&digest), sizeof(digest));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw GraphIoError(GraphIoError::Kind::Malformed, "cannot open " + path.string());

  GraphHeader header{};
  if (!in.read(reinterpret_cast<char*>(&header), sizeof(header)))
    throw GraphIoError(GraphIoError::Kind::Malformed, "malformed graph file: truncated header");
  if (std::memcmp(header.magic, kGraphMagic, sizeof(kGraphMagic)) != 0)
    throw GraphIoError(GraphIoError::Kind::Malformed, "malformed graph file: bad magic");
  if (header.version != kGraphFormatVersion)
    throw GraphIoError(GraphIoError::Kind::VersionMismatch,
                       "graph file version " + std::to_string(header.version) +
                           " unsupported (expected " + std::to_string(kGraphFormatVersion) + ")");

  std::vector<Graph::Edge> edges(header.num_links);
  if (header.num_links > 0 &&
      !in.read(reinterpret_cast<char*>(edges.data()),
               static_cast<std::streamsize>(edges.size() * sizeof(Graph::Edge))))
    throw GraphIoError(GraphIoError::Kind::Malformed, "malformed graph file: truncated edge list");

  std::uint64_t stored_digest = 0;
  if (!in.read(reinterpret_cast<char*>(&stored_digest), sizeof(stored_digest)))
    throw GraphIoError(GraphIoError::Kind::Malformed, "malformed graph file: missing checksum");
  char extra = 0;
  if (in.read(&extra, 1))
    throw GraphIoError(GraphIoError::Kind::Malformed, "malformed graph file: trailing bytes");

  Fnv1a64 checksum;
  checksum.update(&header, sizeof(header));
  if (!edges.empty()) checksum.update(edges.data(), edges.size() * sizeof(Graph::Edge));
  if (checksum.value() != stored_digest)
    throw GraphIoError(GraphIoError::Kind::ChecksumMismatch, "graph file checksum mismatch");

  NetworkSpec spec;
  spec.model = static_cast<NetworkModel>(header.model);
  if (spec.model != NetworkModel::ScaleFreeStatic && spec.model != NetworkModel::SquareLattice)
    throw GraphIoError(GraphIoError::Kind::Malformed, "malformed graph file: unknown model");
  spec.num_nodes = header.num_nodes;
  spec.num_links = header.num_links;
  spec.gamma = header.gamma;
  spec.linear_size = static_cast<std::uint32_t>(header.linear_size);
  spec.periodic = header.periodic != 0;
  spec.seed = header.seed;
  if (spec.model == NetworkModel::SquareLattice) spec.num_links = 0; // lattice spec carries no link count

  try {
    return Graph::from_edges(spec, std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw GraphIoError(GraphIoError::Kind::Malformed,
                       std::string("malformed graph file: ") + e.what());
  }
}

}  // namespace cascade
