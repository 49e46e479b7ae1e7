#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cascade/dynamics.hpp"
#include "cascade/network_spec.hpp"

namespace cascade {

// Provenance attached to a histogram; merge refuses to combine histograms
// from different ensembles.
struct HistogramMeta {
  NetworkModel model = NetworkModel::ScaleFreeStatic;
  std::uint64_t nodes = 0;
  double gamma = 0.0;            // static model only
  std::uint32_t linear_size = 0; // lattice only
  double q = 0.0;
  std::vector<std::uint64_t> seeds;

  bool compatible_with(const HistogramMeta& other) const;

  static HistogramMeta for_graph(const NetworkSpec& spec, double q,
                                 std::vector<std::uint64_t> seeds = {});
};

// Log-binned probability density of avalanche sizes. Bins are geometric,
// bins_per_decade per decade, anchored at 1; the per-bin density is
// count / (total_events * bin_width) so the curve integrates to one.
class BinnedDistribution {
 public:
  // Sizes on a bin boundary land in the upper bin. Throws on empty input or
  // on any size < 1.
  static BinnedDistribution from_sizes(std::span<const std::uint32_t> sizes,
                                       int bins_per_decade, HistogramMeta meta);
  static BinnedDistribution from_events(std::span<const AvalancheEvent> events,
                                        int bins_per_decade, HistogramMeta meta);
  // Rebuild from raw per-bin counts (bin k spans [edge(k), edge(k+1))).
  static BinnedDistribution from_counts(int bins_per_decade,
                                        std::vector<std::uint64_t> counts, HistogramMeta meta);

  static double edge(int bins_per_decade, std::size_t k);

  int bins_per_decade() const { return bins_per_decade_; }
  std::size_t num_bins() const { return counts_.size(); }
  std::uint64_t total_events() const { return total_events_; }
  const HistogramMeta& meta() const { return meta_; }
  HistogramMeta& meta() { return meta_; }

  double bin_low(std::size_t i) const { return edge(bins_per_decade_, i); }
  double bin_high(std::size_t i) const { return edge(bins_per_decade_, i + 1); }
  double bin_mid(std::size_t i) const; // geometric midpoint
  double bin_width(std::size_t i) const { return bin_high(i) - bin_low(i); }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  double density(std::size_t i) const;

  void save_csv(const std::filesystem::path& path) const;
  static BinnedDistribution load_csv(const std::filesystem::path& path);

 private:
  BinnedDistribution() = default;

  int bins_per_decade_ = 10;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_events_ = 0;
  HistogramMeta meta_;
};

// Counts add bin-by-bin; inputs must share bins_per_decade and compatible
// meta (the shorter histogram is treated as zero-padded).
BinnedDistribution merge(const BinnedDistribution& a, const BinnedDistribution& b);

// <s>, pre-shock density mean and the steady-state identity residual
// |<s> - qN(1-rho)/rho| / <s>. Throws on empty inputs.
SummaryStats summarize(std::span<const AvalancheEvent> events,
                       std::span<const DensitySample> density_samples, double q,
                       std::uint64_t nodes);

struct DensityScanPoint {
  double q = 0.0;
  double rho_mean = 0.0;
  double rho_stderr = 0.0;
  std::uint64_t samples = 0;
};

struct DensityScan {
  std::vector<DensityScanPoint> points;               // strictly increasing q
  std::optional<std::pair<double, double>> plateau_range;
  std::optional<double> q0_estimate;                  // upper end of plateau
};

// Marks the widest run (>= 3 points) of consecutive q whose densities agree
// pairwise within two joint standard errors. Needs >= 3 points to attempt
// detection.
void detect_plateau(DensityScan& scan);

// One simulation per q on the given substrate; sim seeds derive from
// base.seed and the q index. base.record_steps/warmup apply per q.
DensityScan density_scan(const Graph& graph, std::span<const double> q_list,
                         const SimConfig& base);
DensityScan density_scan(const NetworkSpec& spec, std::span<const double> q_list,
                         const SimConfig& base);

}  // namespace cascade
