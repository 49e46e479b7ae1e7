#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cascade/graph.hpp"
#include "cascade/rng.hpp"

namespace cascade {

// Snapshot capture rule. BeforeLargeAvalanche records the multiset of
// vulnerable-cluster sizes just before any burn that would destroy at least
// threshold_fraction * N nodes.
struct SnapshotPolicy {
  bool enabled = false;
  double threshold_fraction = 0.0;

  static SnapshotPolicy none() { return {}; }
  static SnapshotPolicy before_large_avalanche(double threshold_fraction) {
    return {true, threshold_fraction};
  }
};

inline constexpr std::uint64_t kWarmupAuto = ~0ULL;

// One run = warmup (discarded) + record_steps (recorded).
//
// With warmup_steps == kWarmupAuto the transient length is decided at run
// time: windows of N steps are simulated until at least 50*N steps have
// passed and the last three window mean densities agree pairwise within 1%,
// capped at 150 windows (the cap sets the non-stationarity flag).
struct SimConfig {
  double q = 0.0;                        // liquidity parameter, q = theta/N
  std::uint64_t record_steps = 0;        // steps recorded after warmup
  std::uint64_t warmup_steps = kWarmupAuto;
  std::uint64_t seed = 0;
  SnapshotPolicy snapshot = SnapshotPolicy::none();
  // Keep every k-th pre-shock density sample in the output list (summary
  // statistics always use the full stream). 0 = pick automatically so at
  // most ~10^6 samples are retained.
  std::uint64_t density_stride = 0;

  void validate(std::uint64_t num_nodes) const; // throws std::invalid_argument
};

struct AvalancheEvent {
  std::uint64_t time = 0;      // step index within the run (warmup included)
  std::uint32_t trigger_node = 0;
  std::uint32_t size = 0;      // failed-cluster size, >= 1

  bool operator==(const AvalancheEvent&) const = default;
};

struct DensitySample {
  std::uint64_t time = 0;
  double rho = 0.0;            // vulnerable fraction just before the shock

  bool operator==(const DensitySample&) const = default;
};

struct ClusterSnapshot {
  std::uint64_t time = 0;
  std::vector<std::uint32_t> cluster_sizes; // sorted ascending
};

struct SummaryStats {
  double mean_size = 0.0;          // <s> over recorded avalanches
  double mean_density = 0.0;       // pre-shock density mean, full stream
  std::uint64_t event_count = 0;
  double identity_residual = 0.0;  // |<s> - qN(1-rho)/rho| / <s>
  double mean_size_stderr = 0.0;
  double mean_density_stderr = 0.0; // batch-means estimate
  std::uint64_t density_sample_count = 0;
  bool stationarity_warning = false;
};

struct SimulationResult {
  std::vector<AvalancheEvent> events;
  std::vector<DensitySample> density_samples; // strided, see SimConfig
  std::vector<ClusterSnapshot> snapshots;
  SummaryStats summary;
  std::uint64_t warmup_steps_used = 0;
  std::uint64_t total_steps = 0;
  SimConfig config;
};

// Sequential forest-fire dynamics bound to one graph. Per step, in this
// order and consuming randomness exactly as listed:
//   1. growth:  node g = rng.below(N); if healthy it turns vulnerable
//   2. shock roll: rng.u01() < 1/(qN)
//   3. if the roll fired: node t = rng.below(N); the pre-shock density is
//      sampled here; if t is vulnerable its whole vulnerable cluster burns
// The draw order is part of the reproducibility contract.
class Simulator {
 public:
  Simulator(const Graph& graph, const SimConfig& config);

  std::optional<AvalancheEvent> step();

  // Burns the connected vulnerable cluster containing `start` (which must be
  // vulnerable; asserted) and returns its size.
  std::uint32_t burn_cluster(std::uint32_t start);

  ClusterSnapshot cluster_size_snapshot() const;

  bool vulnerable(std::uint32_t v) const { return state_[v] != 0; }
  void set_vulnerable(std::uint32_t v, bool on);
  std::uint64_t num_vulnerable() const { return num_vulnerable_; }
  std::uint64_t time() const { return time_; }
  double density() const {
    return static_cast<double>(num_vulnerable_) / static_cast<double>(graph_->num_nodes());
  }
  const Graph& graph() const { return *graph_; }

  // Recomputes the vulnerable count from the state vector and throws
  // std::logic_error on mismatch. step() calls this every 10^6 steps; debug
  // builds check every step.
  void check_counter_coherence() const;

  // Pre-shock density of the most recent step, if that step rolled a shock.
  std::optional<double> last_pre_shock_density() const { return last_pre_shock_rho_; }

 private:
  const Graph* graph_;
  SimConfig config_;
  double shock_probability_;
  Rng rng_;
  std::vector<std::uint8_t> state_;
  std::uint64_t num_vulnerable_ = 0;
  std::uint64_t time_ = 0;
  std::optional<double> last_pre_shock_rho_;
  std::vector<std::uint32_t> burn_queue_;
};

// Full protocol: warmup (explicit or adaptive), then record_steps recorded
// steps. Deterministic in (graph, config).
SimulationResult run(const Graph& graph, const SimConfig& config);

}  // namespace cascade
