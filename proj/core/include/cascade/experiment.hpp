#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cascade/dynamics.hpp"
#include "cascade/io.hpp"
#include "cascade/network_spec.hpp"

namespace cascade {

// One homogeneous block of ensemble cells: every combination of size, q and
// seed index in the group becomes a cell.
struct PlanGroup {
  NetworkModel model = NetworkModel::ScaleFreeStatic;
  double gamma = 2.5;                 // static only
  std::uint64_t links_per_node = 10;  // static only; num_links = N * links_per_node
  bool periodic = true;               // lattice only
  std::vector<std::uint64_t> sizes;   // N (static) or linear size (lattice)
  std::vector<double> q_values;
  std::uint32_t seeds_per_cell = 1;
  std::uint64_t record_steps = 0;
  std::uint64_t warmup = kWarmupAuto;
  bool store_events = true;
  bool store_density = true;
  double snapshot_threshold = 0.0;    // 0 disables snapshots

  bool operator==(const PlanGroup&) const = default;
};

struct ExperimentPlan {
  std::string name;
  std::string description;
  std::uint64_t master_seed = 1;
  int bins_per_decade = 10;
  std::vector<PlanGroup> groups;

  // Validates every cell the plan would expand to; throws on the first
  // problem so nothing runs from a broken plan.
  void validate() const;

  bool operator==(const ExperimentPlan&) const = default;
};

io::ordered_json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const io::ordered_json& j);
void save_plan(const ExperimentPlan& plan, const std::filesystem::path& path);
ExperimentPlan load_plan(const std::filesystem::path& path);

// A flattened cell, including its derived seeds. Seeds depend only on the
// master seed and the cell parameters, never on the cell's position in the
// plan, so a cell run alone reproduces its in-ensemble results.
struct CellSpec {
  std::string name;
  NetworkModel model = NetworkModel::ScaleFreeStatic;
  std::uint64_t nodes = 0;
  double gamma = 0.0;
  std::uint64_t num_links = 0;
  std::uint32_t linear_size = 0;
  bool periodic = true;
  double q = 0.0;
  std::uint32_t seed_index = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t sim_seed = 0;
  std::uint64_t record_steps = 0;
  std::uint64_t warmup = kWarmupAuto;
  bool store_events = true;
  bool store_density = true;
  double snapshot_threshold = 0.0;
  int bins_per_decade = 10;

  NetworkSpec substrate() const;
  SimConfig sim_config() const;
};

std::vector<CellSpec> expand_plan(const ExperimentPlan& plan);

struct CellOutput {
  std::string role;  // "events", "density", "snapshots"
  std::string path;  // relative to the manifest directory
  std::uint64_t checksum = 0;
};

struct CellRecord {
  CellSpec cell;
  std::string status = "ok";  // "ok" | "failed"
  std::string error;
  std::uint64_t wall_ms = 0;
  std::uint64_t warmup_steps_used = 0;
  SummaryStats summary;
  std::vector<CellOutput> files;
};

struct MergedRecord {
  std::string path;
  std::uint64_t checksum = 0;
  NetworkModel model = NetworkModel::ScaleFreeStatic;
  std::uint64_t nodes = 0;
  double gamma = 0.0;
  std::uint32_t linear_size = 0;
  double q = 0.0;
  std::uint64_t total_events = 0;
};

struct RunManifest {
  ExperimentPlan plan;
  std::string code_version;
  std::string rng_identity;
  std::vector<CellRecord> cells;
  std::vector<MergedRecord> merged;
};

// Executes every cell of the plan (cells sharing a substrate run on one
// generated graph), writes per-cell CSVs, merged per-(N, q) histograms and
// manifest.json under out_dir. Cell failures are recorded in the manifest
// without aborting sibling cells. workers == 0 means CASCADE_WORKERS or the
// hardware concurrency.
RunManifest run_experiment(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                           unsigned workers = 0);

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
};

// Re-checksums every file referenced by the manifest.
VerifyReport verify_manifest(const std::filesystem::path& manifest_path);

// Built-in experiment plans ("fig2a", "fig2b", "collapse25", "collapse30",
// "density25", "lattice", "smoke"). Unknown names throw, listing the
// available presets.
ExperimentPlan preset(const std::string& name);
std::vector<std::string> preset_names();

unsigned resolve_worker_count(unsigned requested);

}  // namespace cascade
