#include "cascade/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cascade/accumulators.hpp"
#include "cascade/io.hpp"
#include "cascade/rng.hpp"

namespace cascade {

bool HistogramMeta::compatible_with(const HistogramMeta& other) const {
  if (model != other.model || nodes != other.nodes || q != other.q) return false;
  if (model == NetworkModel::ScaleFreeStatic && gamma != other.gamma) return false;
  if (model == NetworkModel::SquareLattice && linear_size != other.linear_size) return false;
  return true;
}

HistogramMeta HistogramMeta::for_graph(const NetworkSpec& spec, double q,
                                       std::vector<std::uint64_t> seeds) {
  HistogramMeta meta;
  meta.model = spec.model;
  meta.nodes = spec.num_nodes;
  meta.gamma = spec.model == NetworkModel::ScaleFreeStatic ? spec.gamma : 0.0;
  meta.linear_size = spec.model == NetworkModel::SquareLattice ? spec.linear_size : 0;
  meta.q = q;
  meta.seeds = std::move(seeds);
  std::sort(meta.seeds.begin(), meta.seeds.end());
  return meta;
}

double BinnedDistribution::edge(int bins_per_decade, std::size_t k) {
  return std::pow(10.0, static_cast<double>(k) / bins_per_decade);
}

double BinnedDistribution::bin_mid(std::size_t i) const {
  return std::pow(10.0, (static_cast<double>(i) + 0.5) / bins_per_decade_);
}

double BinnedDistribution::density(std::size_t i) const {
  return static_cast<double>(counts_[i]) /
         (static_cast<double>(total_events_) * bin_width(i));
}

namespace {

std::size_t bin_index(int bpd, std::uint64_t size) {
  auto k = static_cast<long>(std::floor(std::log10(static_cast<double>(size)) * bpd));
  if (k < 0) k = 0;
  // Guard against floating rounding at bin boundaries.
  while (BinnedDistribution::edge(bpd, static_cast<std::size_t>(k) + 1) <=
         static_cast<double>(size))
    ++k;
  while (k > 0 &&
         BinnedDistribution::edge(bpd, static_cast<std::size_t>(k)) > static_cast<double>(size))
    --k;
  return static_cast<std::size_t>(k);
}

}  // namespace

BinnedDistribution BinnedDistribution::from_sizes(std::span<const std::uint32_t> sizes,
                                                  int bins_per_decade, HistogramMeta meta) {
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  if (sizes.empty()) throw std::invalid_argument("no events");

  BinnedDistribution dist;
  dist.bins_per_decade_ = bins_per_decade;
  dist.meta_ = std::move(meta);
  for (std::uint32_t s : sizes) {
    if (s < 1) throw std::invalid_argument("avalanche sizes must be >= 1");
    const std::size_t k = bin_index(bins_per_decade, s);
    if (k >= dist.counts_.size()) dist.counts_.resize(k + 1, 0);
    ++dist.counts_[k];
  }
  dist.total_events_ = sizes.size();
  return dist;
}

BinnedDistribution BinnedDistribution::from_events(std::span<const AvalancheEvent> events,
                                                   int bins_per_decade, HistogramMeta meta) {
  std::vector<std::uint32_t> sizes;
  sizes.reserve(events.size());
  for (const auto& e : events) sizes.push_back(e.size);
  return from_sizes(sizes, bins_per_decade, std::move(meta));
}

BinnedDistribution BinnedDistribution::from_counts(int bins_per_decade,
                                                   std::vector<std::uint64_t> counts,
                                                   HistogramMeta meta) {
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  while (!counts.empty() && counts.back() == 0) counts.pop_back();
  if (counts.empty()) throw std::invalid_argument("no events");

  BinnedDistribution dist;
  dist.bins_per_decade_ = bins_per_decade;
  dist.counts_ = std::move(counts);
  dist.meta_ = std::move(meta);
  dist.total_events_ = 0;
  for (std::uint64_t c : dist.counts_) dist.total_events_ += c;
  if (dist.total_events_ == 0) throw std::invalid_argument("no events");
  return dist;
}

void BinnedDistribution::save_csv(const std::filesystem::path& path) const {
  std::string out = "# cascade-histogram v1\n# ";
  out += "model=" + to_string(meta_.model);
  out += " nodes=" + std::to_string(meta_.nodes);
  if (meta_.model == NetworkModel::ScaleFreeStatic)
    out += " gamma=" + io::format_double(meta_.gamma);
  else
    out += " linear_size=" + std::to_string(meta_.linear_size);
  out += " q=" + io::format_double(meta_.q);
  out += " bins_per_decade=" + std::to_string(bins_per_decade_);
  out += " total_events=" + std::to_string(total_events_);
  out += "\n# seeds=";
  for (std::size_t i = 0; i < meta_.seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(meta_.seeds[i]);
  }
  out += "\ns_low,s_high,s_mid,count,density\n";
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out += io::format_double(bin_low(i));
    out += ',';
    out += io::format_double(bin_high(i));
    out += ',';
    out += io::format_double(bin_mid(i));
    out += ',';
    out += std::to_string(counts_[i]);
    out += ',';
    out += io::format_double(density(i));
    out += '\n';
  }
  io::write_text_file(path, out);
}

BinnedDistribution BinnedDistribution::load_csv(const std::filesystem::path& path) {
  const std::string text = io::read_text_file(path);
  if (text.rfind("# cascade-histogram v1", 0) != 0)
    throw std::runtime_error(path.string() + " is not a cascade histogram CSV");

  HistogramMeta meta;
  int bins_per_decade = 0;
  std::vector<std::uint64_t> counts;

  std::size_t pos = 0;
  bool header_skipped = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view body = line.substr(1);
      std::size_t cursor = 0;
      while (cursor < body.size()) {
        while (cursor < body.size() && body[cursor] == ' ') ++cursor;
        std::size_t tok_end = body.find(' ', cursor);
        if (tok_end == std::string_view::npos) tok_end = body.size();
        std::string_view token = body.substr(cursor, tok_end - cursor);
        cursor = tok_end;
        const std::size_t eq = token.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string_view key = token.substr(0, eq);
        const std::string_view value = token.substr(eq + 1);
        if (key == "model") meta.model = network_model_from_string(std::string(value));
        else if (key == "nodes") meta.nodes = io::parse_u64(value);
        else if (key == "gamma") meta.gamma = io::parse_double(value);
        else if (key == "linear_size")
          meta.linear_size = static_cast<std::uint32_t>(io::parse_u64(value));
        else if (key == "q") meta.q = io::parse_double(value);
        else if (key == "bins_per_decade")
          bins_per_decade = static_cast<int>(io::parse_u64(value));
        else if (key == "seeds" && !value.empty()) {
          std::size_t s = 0;
          while (s <= value.size()) {
            std::size_t comma = value.find(',', s);
            if (comma == std::string_view::npos) comma = value.size();
            meta.seeds.push_back(io::parse_u64(value.substr(s, comma - s)));
            s = comma + 1;
          }
        }
      }
      continue;
    }
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    // data row: s_low,s_high,s_mid,count,density
    std::size_t field = 0, start = 0;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (field == 3) count = io::parse_u64(line.substr(start, i - start));
        start = i + 1;
        ++field;
      }
    }
    if (field != 5) throw std::runtime_error("bad histogram row in " + path.string());
    counts.push_back(count);
  }

  if (bins_per_decade < 1)
    throw std::runtime_error(path.string() + " lacks a bins_per_decade header");
  return from_counts(bins_per_decade, std::move(counts), std::move(meta));
}

BinnedDistribution merge(const BinnedDistribution& a, const BinnedDistribution& b) {
  if (a.bins_per_decade() != b.bins_per_decade())
    throw std::invalid_argument("cannot merge histograms with different bin lattices");
  if (!a.meta().compatible_with(b.meta()))
    throw std::invalid_argument("cannot merge histograms with incompatible metadata");

  std::vector<std::uint64_t> counts(std::max(a.num_bins(), b.num_bins()), 0);
  for (std::size_t i = 0; i < a.num_bins(); ++i) counts[i] += a.count(i);
  for (std::size_t i = 0; i < b.num_bins(); ++i) counts[i] += b.count(i);

  HistogramMeta meta = a.meta();
  meta.seeds.insert(meta.seeds.end(), b.meta().seeds.begin(), b.meta().seeds.end());
  std::sort(meta.seeds.begin(), meta.seeds.end());
  meta.seeds.erase(std::unique(meta.seeds.begin(), meta.seeds.end()), meta.seeds.end());
  return BinnedDistribution::from_counts(a.bins_per_decade(), std::move(counts),
                                         std::move(meta));
}

SummaryStats summarize(std::span<const AvalancheEvent> events,
                       std::span<const DensitySample> density_samples, double q,
                       std::uint64_t nodes) {
  if (events.empty()) throw std::invalid_argument("no events");
  if (density_samples.empty()) throw std::invalid_argument("no density samples");

  RunningStats sizes;
  for (const auto& e : events) sizes.add(e.size);
  RunningStats rho;
  for (const auto& d : density_samples) rho.add(d.rho);

  SummaryStats s;
  s.event_count = sizes.count();
  s.mean_size = sizes.mean();
  s.mean_size_stderr = sizes.stderr_mean();
  s.mean_density = rho.mean();
  s.mean_density_stderr = rho.stderr_mean();
  s.density_sample_count = rho.count();
  if (s.mean_density > 0.0) {
    const double predicted =
        q * static_cast<double>(nodes) * (1.0 - s.mean_density) / s.mean_density;
    s.identity_residual = std::fabs(s.mean_size - predicted) / s.mean_size;
  }
  return s;
}

void detect_plateau(DensityScan& scan) {
  scan.plateau_range.reset();
  scan.q0_estimate.reset();
  const auto& pts = scan.points;
  if (pts.size() < 3) return;

  // Pairwise equality within two joint standard errors, with a 2% relative
  // floor: at finite N the flat region drifts by a fraction of a percent per
  // decade, which long runs resolve statistically even though the plateau is
  // physically there.
  constexpr double kRelativeFloor = 0.02;
  auto pair_ok = [&](std::size_t a, std::size_t b) {
    const double joint =
        std::sqrt(pts[a].rho_stderr * pts[a].rho_stderr + pts[b].rho_stderr * pts[b].rho_stderr);
    const double tolerance =
        std::max(2.0 * joint, kRelativeFloor * std::max(pts[a].rho_mean, pts[b].rho_mean));
    return std::fabs(pts[a].rho_mean - pts[b].rho_mean) < tolerance;
  };

  std::size_t best_lo = 0, best_len = 0;
  for (std::size_t lo = 0; lo < pts.size(); ++lo) {
    std::size_t hi = lo;
    while (hi + 1 < pts.size()) {
      bool ok = true;
      for (std::size_t k = lo; k <= hi && ok; ++k) ok = pair_ok(k, hi + 1);
      if (!ok) break;
      ++hi;
    }
    const std::size_t len = hi - lo + 1;
    if (len > best_len) {
      best_len = len;
      best_lo = lo;
    }
  }
  if (best_len < 3) return;
  scan.plateau_range = {pts[best_lo].q, pts[best_lo + best_len - 1].q};
  scan.q0_estimate = pts[best_lo + best_len - 1].q;
}

DensityScan density_scan(const Graph& graph, std::span<const double> q_list,
                         const SimConfig& base) {
  if (q_list.empty()) throw std::invalid_argument("empty q list");
  for (std::size_t i = 1; i < q_list.size(); ++i)
    if (!(q_list[i] > q_list[i - 1]))
      throw std::invalid_argument("q list must be strictly increasing");

  DensityScan scan;
  for (std::size_t i = 0; i < q_list.size(); ++i) {
    SimConfig config = base;
    config.q = q_list[i];
    config.seed = Rng::derive_seed(base.seed, i);
    config.snapshot = SnapshotPolicy::none();
    config.density_stride = std::max<std::uint64_t>(config.density_stride, 1);
    const SimulationResult result = run(graph, config);
    scan.points.push_back({q_list[i], result.summary.mean_density,
                           result.summary.mean_density_stderr,
                           result.summary.density_sample_count});
  }
  detect_plateau(scan);
  return scan;
}

DensityScan density_scan(const NetworkSpec& spec, std::span<const double> q_list,
                         const SimConfig& base) {
  const Graph graph = generate(spec);
  return density_scan(graph, q_list, base);
}

}  // namespace cascade
