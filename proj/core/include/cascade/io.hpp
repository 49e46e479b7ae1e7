#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cascade/dynamics.hpp"
#include "cascade/graph.hpp"
#include "cascade/network_spec.hpp"
#include "cascade/stats.hpp"

namespace cascade::io {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal form, locale independent.
std::string format_double(double value);
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::uint64_t file_checksum(const std::filesystem::path& path); // FNV-1a64 over bytes

// CSV layouts (documented in the README):
//   events.csv   time,trigger_node,size
//   density.csv  time,rho
//   snaps.csv    time,cluster_size,count
//   degrees.csv  degree,count
//   scan.csv     q,rho_mean,rho_stderr,samples (+ plateau comment header)
void write_events_csv(const std::filesystem::path& path, std::span<const AvalancheEvent> events);
std::vector<AvalancheEvent> read_events_csv(const std::filesystem::path& path);

void write_density_csv(const std::filesystem::path& path, std::span<const DensitySample> samples);
std::vector<DensitySample> read_density_csv(const std::filesystem::path& path);

void write_snapshots_csv(const std::filesystem::path& path,
                         std::span<const ClusterSnapshot> snapshots);

void write_degrees_csv(const std::filesystem::path& path, const DegreeHistogram& hist);

void write_scan_csv(const std::filesystem::path& path, const DensityScan& scan);

// (scale, crossover) pairs for crossover-scaling fits.
std::vector<std::pair<double, double>> read_points_csv(const std::filesystem::path& path);

ordered_json network_spec_to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const ordered_json& j);

ordered_json sim_config_to_json(const SimConfig& config);

ordered_json summary_to_json(const SummaryStats& summary);

// Sidecar written next to every simulation output (config echo, substrate
// spec, RNG identity, code version).
void write_sim_sidecar(const std::filesystem::path& data_path, const NetworkSpec& substrate,
                       const SimConfig& config, const SimulationResult& result);

void write_json_file(const std::filesystem::path& path, const ordered_json& j);
ordered_json read_json_file(const std::filesystem::path& path);

}  // namespace cascade::io
