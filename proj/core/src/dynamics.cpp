#include "cascade/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "cascade/accumulators.hpp"

namespace cascade {

namespace {

constexpr std::uint64_t kCoherenceCheckInterval = 1'000'000;
constexpr std::uint64_t kAutoWarmupMinWindows = 50;
constexpr std::uint64_t kAutoWarmupMaxWindows = 150;
constexpr double kAutoWarmupTolerance = 0.01;
constexpr std::uint64_t kMaxRetainedDensitySamples = 1'000'000;

}  // namespace

void SimConfig::validate(std::uint64_t num_nodes) const {
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
  const double theta = q * static_cast<double>(num_nodes);
  if (theta < 1.0)
    throw std::invalid_argument("q*N must be >= 1 so the shock probability 1/(qN) is <= 1");
  if (snapshot.enabled &&
      !(snapshot.threshold_fraction > 0.0 && snapshot.threshold_fraction <= 1.0))
    throw std::invalid_argument("snapshot threshold fraction must be in (0, 1]");
}

Simulator::Simulator(const Graph& graph, const SimConfig& config)
    : graph_(&graph), config_(config), rng_(config.seed) {
  config.validate(graph.num_nodes());
  shock_probability_ = 1.0 / (config.q * static_cast<double>(graph.num_nodes()));
  state_.assign(graph.num_nodes(), 0);
  burn_queue_.reserve(1024);
}

void Simulator::set_vulnerable(std::uint32_t v, bool on) {
  if (vulnerable(v) == on) return;
  state_[v] = on ? 1 : 0;
  num_vulnerable_ += on ? 1 : static_cast<std::uint64_t>(-1);
}

std::uint32_t Simulator::burn_cluster(std::uint32_t start) {
  assert(vulnerable(start) && "burn_cluster requires a vulnerable start node");
  burn_queue_.clear();
  burn_queue_.push_back(start);
  state_[start] = 0;
  std::size_t head = 0;
  while (head < burn_queue_.size()) {
    const std::uint32_t v = burn_queue_[head++];
    for (std::uint32_t u : graph_->neighbors(v)) {
      if (state_[u]) {
        state_[u] = 0;
        burn_queue_.push_back(u);
      }
    }
  }
  const auto size = static_cast<std::uint32_t>(burn_queue_.size());
  num_vulnerable_ -= size;
  return size;
}

std::optional<AvalancheEvent> Simulator::step() {
  const auto n = static_cast<std::uint64_t>(graph_->num_nodes());

  // growth
  const auto grown = static_cast<std::uint32_t>(rng_.below(n));
  if (!state_[grown]) {
    state_[grown] = 1;
    ++num_vulnerable_;
  }

  // shock
  std::optional<AvalancheEvent> event;
  last_pre_shock_rho_.reset();
  if (rng_.u01() < shock_probability_) {
    last_pre_shock_rho_ = density();
    const auto target = static_cast<std::uint32_t>(rng_.below(n));
    if (state_[target]) {
      const std::uint32_t size = burn_cluster(target);
      event = AvalancheEvent{time_, target, size};
    }
  }

  ++time_;
#ifndef NDEBUG
  check_counter_coherence();
#else
  if (time_ % kCoherenceCheckInterval == 0) check_counter_coherence();
#endif
  return event;
}

void Simulator::check_counter_coherence() const {
  std::uint64_t count = 0;
  for (std::uint8_t s : state_) count += s;
  if (count != num_vulnerable_)
    throw std::logic_error("vulnerable counter diverged from state vector");
}

ClusterSnapshot Simulator::cluster_size_snapshot() const {
  ClusterSnapshot snap;
  snap.time = time_;
  std::vector<std::uint8_t> seen(state_.begin(), state_.end());
  std::vector<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < graph_->num_nodes(); ++v) {
    if (!seen[v]) continue;
    queue.clear();
    queue.push_back(v);
    seen[v] = 0;
    std::size_t head = 0;
    while (head < queue.size()) {
      const std::uint32_t w = queue[head++];
      for (std::uint32_t u : graph_->neighbors(w)) {
        if (seen[u]) {
          seen[u] = 0;
          queue.push_back(u);
        }
      }
    }
    snap.cluster_sizes.push_back(static_cast<std::uint32_t>(queue.size()));
  }
  std::sort(snap.cluster_sizes.begin(), snap.cluster_sizes.end());
  return snap;
}

namespace {

// Runs windows of N steps until the last three window mean densities agree
// pairwise within 1% (and at least kAutoWarmupMinWindows windows have run).
// Returns false if the window cap was hit without convergence.
bool adaptive_warmup(Simulator& sim, std::uint64_t* steps_used) {
  const std::uint64_t window = sim.graph().num_nodes();
  double means[3] = {-1.0, -1.0, -1.0};
  for (std::uint64_t w = 0; w < kAutoWarmupMaxWindows; ++w) {
    long double acc = 0.0L;
    for (std::uint64_t i = 0; i < window; ++i) {
      sim.step();
      acc += sim.density();
    }
    means[0] = means[1];
    means[1] = means[2];
    means[2] = static_cast<double>(acc / window);
    *steps_used += window;
    if (w + 1 < kAutoWarmupMinWindows || means[0] < 0.0) continue;
    bool settled = true;
    for (int a = 0; a < 3 && settled; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const double scale = std::max({std::fabs(means[a]), std::fabs(means[b]), 1e-12});
        if (std::fabs(means[a] - means[b]) > kAutoWarmupTolerance * scale) {
          settled = false;
          break;
        }
      }
    }
    if (settled) return true;
  }
  return false;
}

}  // namespace

SimulationResult run(const Graph& graph, const SimConfig& config) {
  config.validate(graph.num_nodes());
  Simulator sim(graph, config);

  SimulationResult result;
  result.config = config;

  bool warmup_converged = true;
  if (config.warmup_steps == kWarmupAuto) {
    warmup_converged = adaptive_warmup(sim, &result.warmup_steps_used);
  } else {
    for (std::uint64_t i = 0; i < config.warmup_steps; ++i) sim.step();
    result.warmup_steps_used = config.warmup_steps;
  }

  // Retention stride for the density list; the summary uses every sample.
  std::uint64_t stride = config.density_stride;
  if (stride == 0) {
    const double expected =
        static_cast<double>(config.record_steps) / (config.q * static_cast<double>(graph.num_nodes()));
    stride = expected <= static_cast<double>(kMaxRetainedDensitySamples)
                 ? 1
                 : static_cast<std::uint64_t>(expected / kMaxRetainedDensitySamples) + 1;
  }

  BatchMeans density_stream;
  RunningStats density_spread;
  RunningStats size_stream;
  // Density trend over thirds of the recording window, for the
  // non-stationarity diagnostic.
  long double third_sum[3] = {0.0L, 0.0L, 0.0L};
  std::uint64_t third_count[3] = {0, 0, 0};

  std::uint64_t shocks_seen = 0;
  const std::uint64_t third = config.record_steps / 3;
  for (std::uint64_t i = 0; i < config.record_steps; ++i) {
    auto event = sim.step();
    if (auto rho = sim.last_pre_shock_density()) {
      density_stream.add(*rho);
      density_spread.add(*rho);
      const int bucket = third == 0 ? 0 : std::min<std::uint64_t>(i / third, 2);
      third_sum[bucket] += *rho;
      ++third_count[bucket];
      if (shocks_seen % stride == 0)
        result.density_samples.push_back({sim.time() - 1, *rho});
      ++shocks_seen;
    }
    if (event) {
      size_stream.add(event->size);
      result.events.push_back(*event);
      if (config.snapshot.enabled &&
          event->size >= config.snapshot.threshold_fraction *
                             static_cast<double>(graph.num_nodes())) {
        // The burned cluster was one maximal component; gluing its size onto
        // the post-burn component list reproduces the pre-burn snapshot.
        ClusterSnapshot snap = sim.cluster_size_snapshot();
        snap.time = event->time;
        snap.cluster_sizes.insert(
            std::lower_bound(snap.cluster_sizes.begin(), snap.cluster_sizes.end(), event->size),
            event->size);
        result.snapshots.push_back(std::move(snap));
      }
    }
  }
  result.total_steps = result.warmup_steps_used + config.record_steps;

  SummaryStats& s = result.summary;
  s.event_count = size_stream.count();
  s.mean_size = size_stream.mean();
  s.mean_size_stderr = size_stream.stderr_mean();
  s.mean_density = density_stream.mean();
  s.mean_density_stderr = density_stream.stderr_mean();
  s.density_sample_count = density_stream.count();
  if (s.event_count > 0 && s.mean_density > 0.0) {
    const double predicted = config.q * static_cast<double>(graph.num_nodes()) *
                             (1.0 - s.mean_density) / s.mean_density;
    s.identity_residual = std::fabs(s.mean_size - predicted) / s.mean_size;
  }

  // Trend diagnostic: the first and last thirds must agree within 2%, with
  // the threshold widened for processes whose steady state itself swings
  // hard between shocks (large sawtooth amplitude).
  bool trend = false;
  if (third_count[0] >= 100 && third_count[2] >= 100) {
    const double m0 = static_cast<double>(third_sum[0] / third_count[0]);
    const double m2 = static_cast<double>(third_sum[2] / third_count[2]);
    const double threshold =
        std::max(0.02 * std::max(m0, m2), 0.5 * std::sqrt(density_spread.variance()));
    trend = std::fabs(m0 - m2) > threshold;
  }
  s.stationarity_warning = !warmup_converged || trend;
  return result;
}

}  // namespace cascade
