#include "cascade/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "cascade/hash.hpp"
#include "cascade/version.hpp"

namespace cascade::io {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return {buf, ptr};
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("bad floating point value '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("bad integer value '" + std::string(text) + "'");
  return value;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Fnv1a64 hash;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    hash.update(buf, static_cast<std::size_t>(in.gcount()));
    if (!in) break;
  }
  return hash.value();
}

namespace {

// Splits one CSV line on commas; no quoting, our files never need it.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// Yields data lines, skipping comments, the header, and blank lines.
template <typename Fn>
void for_each_data_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    fn(std::string_view(line));
  }
}

}  // namespace

void write_events_csv(const std::filesystem::path& path,
                      std::span<const AvalancheEvent> events) {
  std::string out;
  out.reserve(32 + events.size() * 24);
  out += "time,trigger_node,size\n";
  for (const auto& e : events) {
    out += std::to_string(e.time);
    out += ',';
    out += std::to_string(e.trigger_node);
    out += ',';
    out += std::to_string(e.size);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<AvalancheEvent> read_events_csv(const std::filesystem::path& path) {
  std::vector<AvalancheEvent> events;
  for_each_data_line(path, [&](std::string_view line) {
    const auto fields = split_fields(line);
    if (fields.size() != 3)
      throw std::runtime_error("bad events row in " + path.string());
    events.push_back({parse_u64(fields[0]), static_cast<std::uint32_t>(parse_u64(fields[1])),
                      static_cast<std::uint32_t>(parse_u64(fields[2]))});
  });
  return events;
}

void write_density_csv(const std::filesystem::path& path,
                       std::span<const DensitySample> samples) {
  std::string out;
  out.reserve(16 + samples.size() * 28);
  out += "time,rho\n";
  for (const auto& s : samples) {
    out += std::to_string(s.time);
    out += ',';
    out += format_double(s.rho);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<DensitySample> read_density_csv(const std::filesystem::path& path) {
  std::vector<DensitySample> samples;
  for_each_data_line(path, [&](std::string_view line) {
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw std::runtime_error("bad density row in " + path.string());
    samples.push_back({parse_u64(fields[0]), parse_double(fields[1])});
  });
  return samples;
}

void write_snapshots_csv(const std::filesystem::path& path,
                         std::span<const ClusterSnapshot> snapshots) {
  std::string out = "time,cluster_size,count\n";
  for (const auto& snap : snapshots) {
    std::size_t i = 0;
    while (i < snap.cluster_sizes.size()) {
      std::size_t j = i;
      while (j < snap.cluster_sizes.size() && snap.cluster_sizes[j] == snap.cluster_sizes[i]) ++j;
      out += std::to_string(snap.time);
      out += ',';
      out += std::to_string(snap.cluster_sizes[i]);
      out += ',';
      out += std::to_string(j - i);
      out += '\n';
      i = j;
    }
  }
  write_text_file(path, out);
}

void write_degrees_csv(const std::filesystem::path& path, const DegreeHistogram& hist) {
  std::string out = "degree,count\n";
  for (const auto& [degree, count] : hist.counts) {
    out += std::to_string(degree);
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_scan_csv(const std::filesystem::path& path, const DensityScan& scan) {
  std::string out = "# cascade-density-scan v1\n";
  if (scan.plateau_range) {
    out += "# plateau_q_low=" + format_double(scan.plateau_range->first) +
           " plateau_q_high=" + format_double(scan.plateau_range->second) +
           " q0=" + format_double(*scan.q0_estimate) + "\n";
  } else {
    out += "# plateau=none\n";
  }
  out += "q,rho_mean,rho_stderr,samples\n";
  for (const auto& p : scan.points) {
    out += format_double(p.q);
    out += ',';
    out += format_double(p.rho_mean);
    out += ',';
    out += format_double(p.rho_stderr);
    out += ',';
    out += std::to_string(p.samples);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<std::pair<double, double>> read_points_csv(const std::filesystem::path& path) {
  std::vector<std::pair<double, double>> points;
  for_each_data_line(path, [&](std::string_view line) {
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw std::runtime_error("bad points row in " + path.string());
    points.emplace_back(parse_double(fields[0]), parse_double(fields[1]));
  });
  return points;
}

ordered_json network_spec_to_json(const NetworkSpec& spec) {
  ordered_json j;
  j["model"] = to_string(spec.model);
  j["num_nodes"] = spec.num_nodes;
  if (spec.model == NetworkModel::ScaleFreeStatic) {
    j["gamma"] = spec.gamma;
    j["num_links"] = spec.num_links;
  } else {
    j["linear_size"] = spec.linear_size;
    j["periodic"] = spec.periodic;
  }
  j["seed"] = spec.seed;
  return j;
}

NetworkSpec network_spec_from_json(const ordered_json& j) {
  const auto model = network_model_from_string(j.at("model").get<std::string>());
  if (model == NetworkModel::ScaleFreeStatic) {
    return NetworkSpec::scale_free(j.at("num_nodes").get<std::uint64_t>(),
                                   j.at("gamma").get<double>(),
                                   j.at("num_links").get<std::uint64_t>(),
                                   j.value("seed", std::uint64_t{0}));
  }
  return NetworkSpec::lattice(j.at("linear_size").get<std::uint32_t>(),
                              j.value("periodic", true), j.value("seed", std::uint64_t{0}));
}

ordered_json sim_config_to_json(const SimConfig& config) {
  ordered_json j;
  j["q"] = config.q;
  j["record_steps"] = config.record_steps;
  if (config.warmup_steps == kWarmupAuto)
    j["warmup"] = "auto";
  else
    j["warmup"] = config.warmup_steps;
  j["seed"] = config.seed;
  if (config.snapshot.enabled) j["snapshot_threshold"] = config.snapshot.threshold_fraction;
  if (config.density_stride != 0) j["density_stride"] = config.density_stride;
  return j;
}

ordered_json summary_to_json(const SummaryStats& summary) {
  ordered_json j;
  j["mean_size"] = summary.mean_size;
  j["mean_size_stderr"] = summary.mean_size_stderr;
  j["mean_density"] = summary.mean_density;
  j["mean_density_stderr"] = summary.mean_density_stderr;
  j["event_count"] = summary.event_count;
  j["density_samples"] = summary.density_sample_count;
  j["identity_residual"] = summary.identity_residual;
  j["stationarity_warning"] = summary.stationarity_warning;
  return j;
}

void write_sim_sidecar(const std::filesystem::path& data_path, const NetworkSpec& substrate,
                       const SimConfig& config, const SimulationResult& result) {
  ordered_json j;
  j["code_version"] = std::string(kVersion);
  j["rng"] = std::string(kRngIdentity);
  j["substrate"] = network_spec_to_json(substrate);
  j["config"] = sim_config_to_json(config);
  j["warmup_steps_used"] = result.warmup_steps_used;
  j["total_steps"] = result.total_steps;
  j["summary"] = summary_to_json(result.summary);
  write_json_file(data_path.string() + ".meta.json", j);
}

void write_json_file(const std::filesystem::path& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

ordered_json read_json_file(const std::filesystem::path& path) {
  return ordered_json::parse(read_text_file(path));
}

}  // namespace cascade::io
