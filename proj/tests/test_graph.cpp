#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <vector>

#include "cascade/graph.hpp"
#include "cascade/io.hpp"
#include "cascade/rng.hpp"
#include "support/oracles.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

void check_graph_invariants(const Graph& g) {
  std::uint64_t degree_sum = 0;
  for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
    const auto neigh = g.neighbors(v);
    degree_sum += neigh.size();
    CHECK(std::is_sorted(neigh.begin(), neigh.end()));
    CHECK(std::adjacent_find(neigh.begin(), neigh.end()) == neigh.end());
    for (std::uint32_t u : neigh) {
      CHECK(u != v);
      const auto back = g.neighbors(u);
      CHECK(std::binary_search(back.begin(), back.end(), v));
    }
  }
  CHECK(degree_sum == 2 * g.num_links());
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "cascade_graph_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("scale-free: edge-count saturation yields the complete graph") {
  const auto spec = NetworkSpec::scale_free(4, 3.0, 6, 12345);
  const Graph g = generate_scale_free(spec);
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_links() == 6);
  for (std::uint32_t v = 0; v < 4; ++v) CHECK(g.degree(v) == 3);

  const auto hist = degree_distribution(g);
  CHECK(hist.counts.size() == 1);
  CHECK(hist.counts.at(3) == 4);
  CHECK(!hist.tail_exponent.has_value());
}

TEST_CASE("scale-free: generation is deterministic in the seed") {
  const auto spec = NetworkSpec::scale_free(2000, 2.5, 20000, 1);
  const Graph a = generate_scale_free(spec);
  const Graph b = generate_scale_free(spec);
  CHECK(a.edge_list() == b.edge_list());

  const Graph c = generate_scale_free(NetworkSpec::scale_free(2000, 2.5, 20000, 2));
  CHECK(a.edge_list() != c.edge_list());
}

TEST_CASE("scale-free: structural invariants hold across seeds") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = generate_scale_free(NetworkSpec::scale_free(500, 2.5, 5000, seed));
    CHECK(g.num_links() == 5000);
    check_graph_invariants(g);
  }
}

TEST_CASE("scale-free: invalid specs are rejected") {
  CHECK_THROWS_AS(NetworkSpec::scale_free(100, 2.0, 500, 1), std::invalid_argument);
  CHECK_THROWS_AS(NetworkSpec::scale_free(100, 1.5, 500, 1), std::invalid_argument);
  CHECK_THROWS_AS(NetworkSpec::scale_free(4, 3.0, 7, 1), std::invalid_argument);
  CHECK_THROWS_AS(NetworkSpec::scale_free(0, 3.0, 1, 1), std::invalid_argument);
}

TEST_CASE("scale-free: near-uniform weights behave like a uniform random graph") {
  // gamma = 10 -> alpha ~ 0.11; degree variance should be close to the
  // Erdos-Renyi value for the same density.
  const std::uint64_t n = 10'000;
  const std::uint64_t links = 50'000;
  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t count = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = generate_scale_free(NetworkSpec::scale_free(n, 10.0, links, seed));
    for (std::uint32_t v = 0; v < n; ++v) {
      const double d = g.degree(v);
      sum += d;
      sum_sq += d * d;
      ++count;
    }
  }
  const double mean = sum / count;
  const double variance = sum_sq / count - mean * mean;
  const double p = 2.0 * double(links) / (double(n) * double(n - 1));
  const double er_variance = double(n - 1) * p * (1.0 - p);
  CHECK(variance < 3.0 * er_variance);
}

TEST_CASE("power-law tail MLE recovers exact power-law samples") {
  Rng rng(2024);
  for (double gamma : {2.5, 3.0}) {
    oracles::DiscretePowerLawSampler sampler(gamma, 20, 2'000'000);
    std::vector<std::uint32_t> samples;
    samples.reserve(200'000);
    for (int i = 0; i < 200'000; ++i) samples.push_back(sampler.draw(rng));
    const auto fit = power_law_tail_mle(samples, 20);
    REQUIRE(fit.has_value());
    CHECK(*fit == doctest::Approx(gamma).epsilon(0.02));
  }
}

TEST_CASE("scale-free: degree tail follows the requested exponent") {
  for (double gamma : {2.5, 3.0, 4.0}) {
    const Graph g = generate_scale_free(NetworkSpec::scale_free(100'000, gamma, 1'000'000, 7));
    const auto hist = degree_distribution(g);
    REQUIRE(hist.tail_exponent.has_value());
    CHECK(std::fabs(*hist.tail_exponent - gamma) < 0.2);
  }
}

TEST_CASE("lattice: small cases") {
  const Graph open2 = generate_square_lattice(NetworkSpec::lattice(2, false, 0));
  CHECK(open2.num_nodes() == 4);
  CHECK(open2.num_links() == 4);
  for (std::uint32_t v = 0; v < 4; ++v) CHECK(open2.degree(v) == 2);

  const Graph per3 = generate_square_lattice(NetworkSpec::lattice(3, true, 0));
  CHECK(per3.num_nodes() == 9);
  CHECK(per3.num_links() == 18);
  for (std::uint32_t v = 0; v < 9; ++v) CHECK(per3.degree(v) == 4);
  const auto hist = degree_distribution(per3);
  CHECK(hist.counts.size() == 1);
  CHECK(hist.counts.at(4) == 9);

  const Graph open3 = generate_square_lattice(NetworkSpec::lattice(3, false, 0));
  for (std::uint32_t v = 0; v < 9; ++v) {
    CHECK(open3.degree(v) >= 2);
    CHECK(open3.degree(v) <= 4);
  }
  check_graph_invariants(open3);
}

TEST_CASE("lattice: periodic 128 has N=L^2 nodes and 2N links") {
  const Graph g = generate_square_lattice(NetworkSpec::lattice(128, true, 0));
  CHECK(g.num_nodes() == 16384);
  CHECK(g.num_links() == 32768);
  for (std::uint32_t v = 0; v < g.num_nodes(); ++v) CHECK(g.degree(v) == 4);
}

TEST_CASE("lattice: degenerate sizes rejected") {
  CHECK_THROWS_AS(NetworkSpec::lattice(1, false, 0), std::invalid_argument);
  CHECK_THROWS_AS(NetworkSpec::lattice(2, true, 0), std::invalid_argument);
}

TEST_CASE("degree histogram counts sum to the node count") {
  const Graph g = generate_scale_free(NetworkSpec::scale_free(3000, 2.8, 15000, 3));
  const auto hist = degree_distribution(g);
  std::uint64_t total = 0;
  for (const auto& [k, c] : hist.counts) total += c;
  CHECK(total == g.num_nodes());
}

TEST_CASE("graph file: save/load round trip") {
  const auto dir = temp_dir();
  const Graph g = generate_scale_free(NetworkSpec::scale_free(2000, 2.5, 20000, 11));
  const fs::path path = dir / "roundtrip.graph";
  save_graph(g, path);
  const Graph loaded = load_graph(path);

  CHECK(loaded.num_nodes() == g.num_nodes());
  CHECK(loaded.num_links() == g.num_links());
  CHECK(loaded.edge_list() == g.edge_list());
  CHECK(loaded.spec() == g.spec());

  const auto h1 = degree_distribution(g).counts;
  const auto h2 = degree_distribution(loaded).counts;
  CHECK(h1 == h2);
}

TEST_CASE("graph file: large graph round trip preserves the degree histogram") {
  const auto dir = temp_dir();
  const Graph g = generate_scale_free(NetworkSpec::scale_free(100'000, 2.5, 1'000'000, 23));
  const fs::path path = dir / "large.graph";
  save_graph(g, path);
  const Graph loaded = load_graph(path);
  CHECK(degree_distribution(loaded).counts == degree_distribution(g).counts);
  CHECK(loaded.edge_list() == g.edge_list());
}

TEST_CASE("graph file: error kinds are distinguishable") {
  const auto dir = temp_dir();
  const Graph g = generate_scale_free(NetworkSpec::scale_free(100, 2.5, 500, 5));
  const fs::path path = dir / "witness.graph";
  save_graph(g, path);

  auto read_bytes = [&] {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
  };
  auto write_bytes = [&](const fs::path& p, const std::vector<char>& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  };
  const auto original = read_bytes();

  SUBCASE("truncated file is malformed") {
    auto bytes = original;
    bytes.resize(bytes.size() / 2);
    write_bytes(dir / "truncated.graph", bytes);
    try {
      load_graph(dir / "truncated.graph");
      FAIL("expected GraphIoError");
    } catch (const GraphIoError& e) {
      CHECK(e.kind() == GraphIoError::Kind::Malformed);
    }
  }

  SUBCASE("bad magic is malformed") {
    auto bytes = original;
    bytes[0] = 'X';
    write_bytes(dir / "badmagic.graph", bytes);
    try {
      load_graph(dir / "badmagic.graph");
      FAIL("expected GraphIoError");
    } catch (const GraphIoError& e) {
      CHECK(e.kind() == GraphIoError::Kind::Malformed);
    }
  }

  SUBCASE("future version is a version mismatch") {
    auto bytes = original;
    bytes[8] = 99; // version field
    write_bytes(dir / "version.graph", bytes);
    try {
      load_graph(dir / "version.graph");
      FAIL("expected GraphIoError");
    } catch (const GraphIoError& e) {
      CHECK(e.kind() == GraphIoError::Kind::VersionMismatch);
    }
  }

  SUBCASE("flipped payload byte is a checksum mismatch") {
    auto bytes = original;
    bytes[60] ^= 0x40; // inside the edge list
    write_bytes(dir / "corrupt.graph", bytes);
    try {
      load_graph(dir / "corrupt.graph");
      FAIL("expected GraphIoError");
    } catch (const GraphIoError& e) {
      CHECK(e.kind() == GraphIoError::Kind::ChecksumMismatch);
    }
  }
}

TEST_CASE("graph file: byte-identical output for identical specs") {
  const auto dir = temp_dir();
  const auto spec = NetworkSpec::scale_free(1000, 2.5, 10000, 77);
  save_graph(generate_scale_free(spec), dir / "a.graph");
  save_graph(generate_scale_free(spec), dir / "b.graph");
  CHECK(io::read_text_file(dir / "a.graph") == io::read_text_file(dir / "b.graph"));
}

TEST_CASE("from_edges rejects malformed edge lists") {
  const auto spec = NetworkSpec::scale_free(4, 3.0, 2, 0);
  CHECK_THROWS_AS(Graph::from_edges(spec, {{0, 0}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(spec, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(spec, {{0, 7}, {1, 2}}), std::invalid_argument);
}
