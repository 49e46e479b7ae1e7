#include "cascade/experiment.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cascade/hash.hpp"
#include "cascade/rng.hpp"
#include "cascade/stats.hpp"
#include "cascade/version.hpp"

namespace cascade {

namespace fs = std::filesystem;
using io::ordered_json;

void ExperimentPlan::validate() const {
  if (groups.empty()) throw std::invalid_argument("plan has no groups");
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  for (const CellSpec& cell : expand_plan(*this)) {
    const NetworkSpec substrate = cell.substrate(); // validates itself
    cell.sim_config().validate(substrate.num_nodes);
  }
}

NetworkSpec CellSpec::substrate() const {
  if (model == NetworkModel::ScaleFreeStatic)
    return NetworkSpec::scale_free(nodes, gamma, num_links, graph_seed);
  return NetworkSpec::lattice(linear_size, periodic, graph_seed);
}

SimConfig CellSpec::sim_config() const {
  SimConfig config;
  config.q = q;
  config.record_steps = record_steps;
  config.warmup_steps = warmup;
  config.seed = sim_seed;
  if (snapshot_threshold > 0.0)
    config.snapshot = SnapshotPolicy::before_large_avalanche(snapshot_threshold);
  return config;
}

namespace {

// Substrate key: everything that determines the generated graph except the
// master seed. Seeds derived from it are independent of plan composition.
std::uint64_t substrate_key(const PlanGroup& group, std::uint64_t size,
                            std::uint32_t seed_index) {
  Fnv1a64 h;
  h.update("cascade-substrate");
  h.update_u64(static_cast<std::uint64_t>(group.model));
  if (group.model == NetworkModel::ScaleFreeStatic) {
    h.update_u64(size);
    h.update_u64(std::bit_cast<std::uint64_t>(group.gamma));
    h.update_u64(group.links_per_node);
  } else {
    h.update_u64(size);
    h.update_u64(group.periodic ? 1 : 0);
  }
  h.update_u64(seed_index);
  return h.value();
}

std::string cell_name(const PlanGroup& group, std::uint64_t size, double q,
                      std::uint32_t seed_index) {
  std::string name = to_string(group.model);
  if (group.model == NetworkModel::ScaleFreeStatic) {
    name += "_g" + io::format_double(group.gamma);
    name += "_N" + std::to_string(size);
  } else {
    name += "_L" + std::to_string(size);
  }
  name += "_q" + io::format_double(q);
  name += "_s" + std::to_string(seed_index);
  return name;
}

}  // namespace

std::vector<CellSpec> expand_plan(const ExperimentPlan& plan) {
  std::vector<CellSpec> cells;
  for (const PlanGroup& group : plan.groups) {
    if (group.sizes.empty()) throw std::invalid_argument("plan group has no sizes");
    if (group.q_values.empty()) throw std::invalid_argument("plan group has no q values");
    if (group.seeds_per_cell == 0)
      throw std::invalid_argument("seeds_per_cell must be >= 1");
    for (std::uint64_t size : group.sizes) {
      for (double q : group.q_values) {
        for (std::uint32_t s = 0; s < group.seeds_per_cell; ++s) {
          CellSpec cell;
          cell.model = group.model;
          if (group.model == NetworkModel::ScaleFreeStatic) {
            cell.nodes = size;
            cell.gamma = group.gamma;
            cell.num_links = group.links_per_node * size;
          } else {
            cell.linear_size = static_cast<std::uint32_t>(size);
            cell.nodes = size * size;
            cell.periodic = group.periodic;
          }
          cell.q = q;
          cell.seed_index = s;
          const std::uint64_t key = substrate_key(group, size, s);
          cell.graph_seed = Rng::derive_seed(plan.master_seed, key);
          Fnv1a64 sim_h;
          sim_h.update("cascade-sim");
          sim_h.update_u64(key);
          sim_h.update_u64(std::bit_cast<std::uint64_t>(q));
          cell.sim_seed = Rng::derive_seed(plan.master_seed, sim_h.value());
          cell.record_steps = group.record_steps;
          cell.warmup = group.warmup;
          cell.store_events = group.store_events;
          cell.store_density = group.store_density;
          cell.snapshot_threshold = group.snapshot_threshold;
          cell.bins_per_decade = plan.bins_per_decade;
          cell.name = cell_name(group, size, q, s);
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

ordered_json plan_to_json(const ExperimentPlan& plan) {
  ordered_json j;
  j["name"] = plan.name;
  j["description"] = plan.description;
  j["master_seed"] = plan.master_seed;
  j["bins_per_decade"] = plan.bins_per_decade;
  j["groups"] = ordered_json::array();
  for (const PlanGroup& g : plan.groups) {
    ordered_json gj;
    gj["model"] = to_string(g.model);
    if (g.model == NetworkModel::ScaleFreeStatic) {
      gj["gamma"] = g.gamma;
      gj["links_per_node"] = g.links_per_node;
    } else {
      gj["periodic"] = g.periodic;
    }
    gj["sizes"] = g.sizes;
    gj["q_values"] = g.q_values;
    gj["seeds_per_cell"] = g.seeds_per_cell;
    gj["record_steps"] = g.record_steps;
    if (g.warmup == kWarmupAuto)
      gj["warmup"] = "auto";
    else
      gj["warmup"] = g.warmup;
    gj["store_events"] = g.store_events;
    gj["store_density"] = g.store_density;
    if (g.snapshot_threshold > 0.0) gj["snapshot_threshold"] = g.snapshot_threshold;
    j["groups"].push_back(std::move(gj));
  }
  return j;
}

ExperimentPlan plan_from_json(const ordered_json& j) {
  ExperimentPlan plan;
  plan.name = j.value("name", std::string{});
  plan.description = j.value("description", std::string{});
  plan.master_seed = j.value("master_seed", std::uint64_t{1});
  plan.bins_per_decade = j.value("bins_per_decade", 10);
  for (const auto& gj : j.at("groups")) {
    PlanGroup g;
    g.model = network_model_from_string(gj.at("model").get<std::string>());
    if (g.model == NetworkModel::ScaleFreeStatic) {
      g.gamma = gj.at("gamma").get<double>();
      g.links_per_node = gj.value("links_per_node", std::uint64_t{10});
    } else {
      g.periodic = gj.value("periodic", true);
    }
    g.sizes = gj.at("sizes").get<std::vector<std::uint64_t>>();
    g.q_values = gj.at("q_values").get<std::vector<double>>();
    g.seeds_per_cell = gj.value("seeds_per_cell", 1u);
    g.record_steps = gj.at("record_steps").get<std::uint64_t>();
    if (gj.contains("warmup") && gj["warmup"].is_string()) {
      if (gj["warmup"].get<std::string>() != "auto")
        throw std::invalid_argument("warmup must be an integer or \"auto\"");
      g.warmup = kWarmupAuto;
    } else if (gj.contains("warmup")) {
      g.warmup = gj["warmup"].get<std::uint64_t>();
    }
    g.store_events = gj.value("store_events", true);
    g.store_density = gj.value("store_density", true);
    g.snapshot_threshold = gj.value("snapshot_threshold", 0.0);
    plan.groups.push_back(std::move(g));
  }
  return plan;
}

void save_plan(const ExperimentPlan& plan, const fs::path& path) {
  io::write_json_file(path, plan_to_json(plan));
}

ExperimentPlan load_plan(const fs::path& path) {
  return plan_from_json(io::read_json_file(path));
}

unsigned resolve_worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CASCADE_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

struct CellResult {
  CellRecord record;
  std::optional<BinnedDistribution> histogram;
};

CellResult run_cell(const CellSpec& cell, const Graph& graph, const fs::path& out_dir) {
  CellResult result;
  result.record.cell = cell;

  const auto start = std::chrono::steady_clock::now();
  const SimConfig config = cell.sim_config();
  const SimulationResult sim = run(graph, config);
  result.record.warmup_steps_used = sim.warmup_steps_used;
  result.record.summary = sim.summary;

  const fs::path cells_dir = out_dir / "cells";
  auto add_file = [&](const std::string& role, const fs::path& path) {
    result.record.files.push_back(
        {role, fs::relative(path, out_dir).generic_string(), io::file_checksum(path)});
  };

  if (cell.store_events) {
    const fs::path path = cells_dir / (cell.name + ".events.csv");
    io::write_events_csv(path, sim.events);
    io::write_sim_sidecar(path, graph.spec(), config, sim);
    add_file("events", path);
  }
  if (cell.store_density) {
    const fs::path path = cells_dir / (cell.name + ".density.csv");
    io::write_density_csv(path, sim.density_samples);
    io::write_sim_sidecar(path, graph.spec(), config, sim);
    add_file("density", path);
  }
  if (config.snapshot.enabled && !sim.snapshots.empty()) {
    const fs::path path = cells_dir / (cell.name + ".snaps.csv");
    io::write_snapshots_csv(path, sim.snapshots);
    add_file("snapshots", path);
  }

  if (!sim.events.empty()) {
    HistogramMeta meta = HistogramMeta::for_graph(graph.spec(), cell.q, {cell.sim_seed});
    result.histogram =
        BinnedDistribution::from_events(sim.events, cell.bins_per_decade, std::move(meta));
  }

  result.record.wall_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            start)
          .count());
  return result;
}

std::string merged_name(const CellSpec& cell) {
  std::string name = "hist_" + to_string(cell.model);
  if (cell.model == NetworkModel::ScaleFreeStatic) {
    name += "_g" + io::format_double(cell.gamma);
    name += "_N" + std::to_string(cell.nodes);
  } else {
    name += "_L" + std::to_string(cell.linear_size);
  }
  name += "_q" + io::format_double(cell.q);
  return name + ".csv";
}

}  // namespace

RunManifest run_experiment(const ExperimentPlan& plan, const fs::path& out_dir,
                           unsigned workers) {
  plan.validate();
  fs::create_directories(out_dir / "cells");
  fs::create_directories(out_dir / "hist");

  const std::vector<CellSpec> cells = expand_plan(plan);

  // Cells sharing a substrate run back to back on one generated graph.
  std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> tasks;
  {
    std::map<std::uint64_t, std::size_t> task_of_seed;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto [it, inserted] = task_of_seed.try_emplace(cells[i].graph_seed, tasks.size());
      if (inserted) tasks.push_back({cells[i].graph_seed, {}});
      tasks[it->second].second.push_back(i);
    }
  }

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next_task{0};
  const unsigned worker_count =
      std::min<unsigned>(resolve_worker_count(workers), static_cast<unsigned>(tasks.size()));

  auto worker = [&] {
    while (true) {
      const std::size_t t = next_task.fetch_add(1);
      if (t >= tasks.size()) break;
      const auto& cell_indices = tasks[t].second;

      std::optional<Graph> graph;
      std::string graph_error;
      try {
        graph.emplace(generate(cells[cell_indices.front()].substrate()));
      } catch (const std::exception& e) {
        graph_error = e.what();
      }

      for (std::size_t idx : cell_indices) {
        if (!graph) {
          results[idx].record.cell = cells[idx];
          results[idx].record.status = "failed";
          results[idx].record.error = "graph generation failed: " + graph_error;
          continue;
        }
        try {
          results[idx] = run_cell(cells[idx], *graph, out_dir);
        } catch (const std::exception& e) {
          results[idx] = {};
          results[idx].record.cell = cells[idx];
          results[idx].record.status = "failed";
          results[idx].record.error = e.what();
        }
      }
    }
  };

  std::vector<std::thread> threads;
  for (unsigned w = 0; w + 1 < worker_count; ++w) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();

  RunManifest manifest;
  manifest.plan = plan;
  manifest.code_version = std::string(kVersion);
  manifest.rng_identity = std::string(kRngIdentity);

  // Merge per (substrate parameters, q) in cell order; merge is commutative
  // and integer-exact, so the outcome is schedule independent anyway.
  std::map<std::string, BinnedDistribution> merged;
  std::vector<std::string> merged_order;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    manifest.cells.push_back(results[i].record);
    if (!results[i].histogram) continue;
    const std::string name = merged_name(cells[i]);
    auto it = merged.find(name);
    if (it == merged.end()) {
      merged.emplace(name, *results[i].histogram);
      merged_order.push_back(name);
    } else {
      it->second = merge(it->second, *results[i].histogram);
    }
  }
  for (const std::string& name : merged_order) {
    const BinnedDistribution& hist = merged.at(name);
    const fs::path path = out_dir / "hist" / name;
    hist.save_csv(path);
    MergedRecord record;
    record.path = fs::relative(path, out_dir).generic_string();
    record.checksum = io::file_checksum(path);
    record.model = hist.meta().model;
    record.nodes = hist.meta().nodes;
    record.gamma = hist.meta().gamma;
    record.linear_size = hist.meta().linear_size;
    record.q = hist.meta().q;
    record.total_events = hist.total_events();
    manifest.merged.push_back(std::move(record));
  }

  save_plan(plan, out_dir / "plan.json");
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

namespace {

ordered_json cell_record_to_json(const CellRecord& r) {
  ordered_json j;
  j["name"] = r.cell.name;
  j["model"] = to_string(r.cell.model);
  j["nodes"] = r.cell.nodes;
  if (r.cell.model == NetworkModel::ScaleFreeStatic) {
    j["gamma"] = r.cell.gamma;
    j["num_links"] = r.cell.num_links;
  } else {
    j["linear_size"] = r.cell.linear_size;
    j["periodic"] = r.cell.periodic;
  }
  j["q"] = r.cell.q;
  j["seed_index"] = r.cell.seed_index;
  j["graph_seed"] = r.cell.graph_seed;
  j["sim_seed"] = r.cell.sim_seed;
  j["record_steps"] = r.cell.record_steps;
  if (r.cell.warmup == kWarmupAuto)
    j["warmup"] = "auto";
  else
    j["warmup"] = r.cell.warmup;
  j["bins_per_decade"] = r.cell.bins_per_decade;
  j["store_events"] = r.cell.store_events;
  j["store_density"] = r.cell.store_density;
  if (r.cell.snapshot_threshold > 0.0) j["snapshot_threshold"] = r.cell.snapshot_threshold;
  j["status"] = r.status;
  if (!r.error.empty()) j["error"] = r.error;
  j["wall_ms"] = r.wall_ms;
  j["warmup_steps_used"] = r.warmup_steps_used;
  j["summary"] = io::summary_to_json(r.summary);
  j["files"] = ordered_json::array();
  for (const CellOutput& f : r.files) {
    ordered_json fj;
    fj["role"] = f.role;
    fj["path"] = f.path;
    fj["checksum"] = f.checksum;
    j["files"].push_back(std::move(fj));
  }
  return j;
}

CellRecord cell_record_from_json(const ordered_json& j) {
  CellRecord r;
  r.cell.name = j.at("name").get<std::string>();
  r.cell.model = network_model_from_string(j.at("model").get<std::string>());
  r.cell.nodes = j.at("nodes").get<std::uint64_t>();
  if (r.cell.model == NetworkModel::ScaleFreeStatic) {
    r.cell.gamma = j.at("gamma").get<double>();
    r.cell.num_links = j.at("num_links").get<std::uint64_t>();
  } else {
    r.cell.linear_size = j.at("linear_size").get<std::uint32_t>();
    r.cell.periodic = j.value("periodic", true);
  }
  r.cell.q = j.at("q").get<double>();
  r.cell.seed_index = j.at("seed_index").get<std::uint32_t>();
  r.cell.graph_seed = j.at("graph_seed").get<std::uint64_t>();
  r.cell.sim_seed = j.at("sim_seed").get<std::uint64_t>();
  r.cell.record_steps = j.at("record_steps").get<std::uint64_t>();
  if (j.at("warmup").is_string())
    r.cell.warmup = kWarmupAuto;
  else
    r.cell.warmup = j.at("warmup").get<std::uint64_t>();
  r.cell.bins_per_decade = j.value("bins_per_decade", 10);
  r.cell.store_events = j.value("store_events", true);
  r.cell.store_density = j.value("store_density", true);
  r.cell.snapshot_threshold = j.value("snapshot_threshold", 0.0);
  r.status = j.value("status", std::string("ok"));
  r.error = j.value("error", std::string{});
  r.wall_ms = j.value("wall_ms", std::uint64_t{0});
  r.warmup_steps_used = j.value("warmup_steps_used", std::uint64_t{0});
  if (j.contains("files")) {
    for (const auto& fj : j["files"]) {
      r.files.push_back({fj.at("role").get<std::string>(), fj.at("path").get<std::string>(),
                         fj.at("checksum").get<std::uint64_t>()});
    }
  }
  return r;
}

}  // namespace

void save_manifest(const RunManifest& manifest, const fs::path& path) {
  ordered_json j;
  j["code_version"] = manifest.code_version;
  j["rng"] = manifest.rng_identity;
  j["plan"] = plan_to_json(manifest.plan);
  j["cells"] = ordered_json::array();
  for (const CellRecord& r : manifest.cells) j["cells"].push_back(cell_record_to_json(r));
  j["merged"] = ordered_json::array();
  for (const MergedRecord& m : manifest.merged) {
    ordered_json mj;
    mj["path"] = m.path;
    mj["checksum"] = m.checksum;
    mj["model"] = to_string(m.model);
    mj["nodes"] = m.nodes;
    if (m.model == NetworkModel::ScaleFreeStatic)
      mj["gamma"] = m.gamma;
    else
      mj["linear_size"] = m.linear_size;
    mj["q"] = m.q;
    mj["total_events"] = m.total_events;
    j["merged"].push_back(std::move(mj));
  }
  io::write_json_file(path, j);
}

RunManifest load_manifest(const fs::path& path) {
  const ordered_json j = io::read_json_file(path);
  RunManifest manifest;
  manifest.code_version = j.value("code_version", std::string{});
  manifest.rng_identity = j.value("rng", std::string{});
  manifest.plan = plan_from_json(j.at("plan"));
  for (const auto& cj : j.at("cells")) manifest.cells.push_back(cell_record_from_json(cj));
  if (j.contains("merged")) {
    for (const auto& mj : j["merged"]) {
      MergedRecord m;
      m.path = mj.at("path").get<std::string>();
      m.checksum = mj.at("checksum").get<std::uint64_t>();
      m.model = network_model_from_string(mj.at("model").get<std::string>());
      m.nodes = mj.at("nodes").get<std::uint64_t>();
      if (m.model == NetworkModel::ScaleFreeStatic)
        m.gamma = mj.value("gamma", 0.0);
      else
        m.linear_size = mj.value("linear_size", 0u);
      m.q = mj.at("q").get<double>();
      m.total_events = mj.value("total_events", std::uint64_t{0});
      manifest.merged.push_back(std::move(m));
    }
  }
  return manifest;
}

VerifyReport verify_manifest(const fs::path& manifest_path) {
  VerifyReport report;
  RunManifest manifest;
  try {
    manifest = load_manifest(manifest_path);
  } catch (const std::exception& e) {
    report.ok = false;
    report.problems.push_back(std::string("cannot load manifest: ") + e.what());
    return report;
  }
  const fs::path base = manifest_path.parent_path();

  auto check_file = [&](const std::string& rel, std::uint64_t expected,
                        const std::string& owner) {
    const fs::path path = base / rel;
    if (!fs::exists(path)) {
      report.problems.push_back(owner + ": missing file " + rel);
      return;
    }
    const std::uint64_t actual = io::file_checksum(path);
    if (actual != expected)
      report.problems.push_back(owner + ": checksum mismatch for " + rel);
  };

  for (const CellRecord& cell : manifest.cells) {
    if (cell.status != "ok") {
      report.problems.push_back("cell " + cell.cell.name + " failed: " + cell.error);
      continue;
    }
    for (const CellOutput& f : cell.files) check_file(f.path, f.checksum, cell.cell.name);
  }
  for (const MergedRecord& m : manifest.merged) check_file(m.path, m.checksum, m.path);

  report.ok = report.problems.empty();
  return report;
}

namespace {

PlanGroup static_group(double gamma, std::vector<std::uint64_t> sizes,
                       std::vector<double> q_values, std::uint32_t seeds,
                       std::uint64_t record_steps) {
  PlanGroup g;
  g.model = NetworkModel::ScaleFreeStatic;
  g.gamma = gamma;
  g.links_per_node = 10;
  g.sizes = std::move(sizes);
  g.q_values = std::move(q_values);
  g.seeds_per_cell = seeds;
  g.record_steps = record_steps;
  return g;
}

PlanGroup lattice_group(std::uint64_t linear, std::uint32_t seeds, std::uint64_t record_steps,
                        std::uint64_t warmup) {
  PlanGroup g;
  g.model = NetworkModel::SquareLattice;
  g.periodic = true;
  g.sizes = {linear};
  g.q_values = {0.7};
  g.seeds_per_cell = seeds;
  g.record_steps = record_steps;
  g.warmup = warmup;
  return g;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"smoke", "fig2a", "fig2b", "collapse25", "collapse30", "density25", "lattice"};
}

ExperimentPlan preset(const std::string& name) {
  ExperimentPlan plan;
  plan.name = name;
  plan.bins_per_decade = 10;

  if (name == "smoke") {
    plan.description = "Two quick cells (gamma=2.5, N=1e4, q=1e-3) for pipeline checks.";
    plan.master_seed = 715;
    plan.groups = {static_group(2.5, {10'000}, {1e-3}, 2, 2'000'000)};
    return plan;
  }
  if (name == "fig2a") {
    plan.description =
        "Avalanche-size distributions at gamma=2.5, N=1e6 for q = 1e-4, 1e-5, 1e-6 "
        "(ensemble budgets sized for a workstation).";
    plan.master_seed = 9121;
    plan.groups = {static_group(2.5, {1'000'000}, {1e-4}, 10, 50'000'000),
                   static_group(2.5, {1'000'000}, {1e-5}, 4, 30'000'000),
                   static_group(2.5, {1'000'000}, {1e-6}, 2, 15'000'000)};
    plan.groups[2].store_events = false;
    return plan;
  }
  if (name == "fig2b") {
    plan.description =
        "Avalanche-size distributions at q=1e-4, N=1e6 for gamma = 2.5, 3.0, 4.0.";
    plan.master_seed = 9122;
    plan.groups = {static_group(2.5, {1'000'000}, {1e-4}, 6, 30'000'000),
                   static_group(3.0, {1'000'000}, {1e-4}, 6, 30'000'000),
                   static_group(4.0, {1'000'000}, {1e-4}, 6, 30'000'000)};
    return plan;
  }
  if (name == "collapse25" || name == "collapse30") {
    const double gamma = name == "collapse25" ? 2.5 : 3.0;
    plan.description = "Finite-size ensembles (N = 1e5, 3e5, 1e6) at q=1e-4, gamma=" +
                       io::format_double(gamma) + ", for the data-collapse pipeline.";
    plan.master_seed = name == "collapse25" ? 9123 : 9124;
    plan.groups = {static_group(gamma, {100'000}, {1e-4}, 16, 24'000'000),
                   static_group(gamma, {300'000}, {1e-4}, 12, 45'000'000),
                   static_group(gamma, {1'000'000}, {1e-4}, 10, 100'000'000)};
    for (auto& g : plan.groups) {
      g.store_events = false;
      g.store_density = false;
    }
    return plan;
  }
  if (name == "density25") {
    plan.description =
        "Pre-shock density versus q at gamma=2.5, N=1e6, q log-spaced in [1e-6, 1e-3].";
    plan.master_seed = 9125;
    plan.groups = {
        static_group(2.5, {1'000'000}, {1e-6, 3.16e-6, 1e-5}, 1, 20'000'000),
        static_group(2.5, {1'000'000}, {3.16e-5, 1e-4}, 1, 30'000'000),
        static_group(2.5, {1'000'000}, {3.16e-4, 1e-3}, 1, 50'000'000)};
    for (auto& g : plan.groups) g.store_events = false;
    return plan;
  }
  if (name == "lattice") {
    plan.description =
        "Periodic square lattices (L = 64, 128, 256) at q=0.7 for crossover scaling.";
    plan.master_seed = 9126;
    plan.groups = {lattice_group(64, 8, 150'000'000, 2'000'000),
                   lattice_group(128, 6, 600'000'000, 8'000'000),
                   lattice_group(256, 4, 2'000'000'000, 30'000'000)};
    return plan;
  }

  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown preset '" + name + "' (available: " + known + ")");
}

}  // namespace cascade
