// cascade: generate substrates, run forest-fire avalanche ensembles, and
// reduce the results to distributions, density scans and scaling fits.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cascade/experiment.hpp"
#include "cascade/graph.hpp"
#include "cascade/io.hpp"
#include "cascade/scaling.hpp"
#include "cascade/stats.hpp"
#include "cascade/version.hpp"

namespace fs = std::filesystem;
using namespace cascade;
using io::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    if (comma > start) out.push_back(csv.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::uint64_t parse_warmup(const std::string& text) {
  if (text == "auto") return kWarmupAuto;
  return io::parse_u64(text);
}

// ---------------------------------------------------------------- net ----

struct NetGenArgs {
  std::string model = "static";
  std::uint64_t nodes = 0;
  double gamma = 2.5;
  std::uint64_t links = 0;
  std::uint32_t linear_size = 0;
  bool periodic = true;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_net_gen(const NetGenArgs& args) {
  NetworkSpec spec;
  if (args.model == "static") {
    spec = NetworkSpec::scale_free(args.nodes, args.gamma, args.links, args.seed);
  } else if (args.model == "lattice") {
    spec = NetworkSpec::lattice(args.linear_size, args.periodic, args.seed);
  } else {
    throw CLI::ValidationError("--model must be 'static' or 'lattice'");
  }
  const Graph g = generate(spec);
  save_graph(g, args.out);
  std::printf("wrote %s: %llu nodes, %llu links\n", args.out.c_str(),
              static_cast<unsigned long long>(g.num_nodes()),
              static_cast<unsigned long long>(g.num_links()));
  return 0;
}

int cmd_net_stats(const std::string& in, const std::string& out) {
  const Graph g = load_graph(in);
  const DegreeHistogram hist = degree_distribution(g);
  io::write_degrees_csv(out, hist);
  std::printf("%llu nodes, %llu links", static_cast<unsigned long long>(g.num_nodes()),
              static_cast<unsigned long long>(g.num_links()));
  if (hist.tail_exponent)
    std::printf(", degree-tail exponent %.3f (k >= %u, %llu nodes in fit)",
                *hist.tail_exponent, hist.tail_fit_kmin,
                static_cast<unsigned long long>(hist.tail_fit_samples));
  std::printf("\n");
  return 0;
}

// ---------------------------------------------------------------- sim ----

struct SimRunArgs {
  std::string graph;
  double q = 0.0;
  std::uint64_t steps = 0;
  std::string warmup = "auto";
  std::uint64_t seed = 1;
  std::string events_out;
  std::string density_out;
  double snapshot_threshold = 0.0;
  std::string snapshots_out;
  std::uint64_t density_stride = 0;
};

int cmd_sim_run(const SimRunArgs& args) {
  const Graph g = load_graph(args.graph);

  SimConfig config;
  config.q = args.q;
  config.seed = args.seed;
  config.density_stride = args.density_stride;
  const std::uint64_t warmup = parse_warmup(args.warmup);
  if (warmup == kWarmupAuto) {
    config.warmup_steps = kWarmupAuto;
    config.record_steps = args.steps;
  } else {
    if (warmup > args.steps)
      throw CLI::ValidationError("--warmup must not exceed --steps");
    config.warmup_steps = warmup;
    config.record_steps = args.steps - warmup;
  }
  if (args.snapshot_threshold > 0.0)
    config.snapshot = SnapshotPolicy::before_large_avalanche(args.snapshot_threshold);

  const SimulationResult result = run(g, config);

  io::write_events_csv(args.events_out, result.events);
  io::write_sim_sidecar(args.events_out, g.spec(), config, result);
  io::write_density_csv(args.density_out, result.density_samples);
  io::write_sim_sidecar(args.density_out, g.spec(), config, result);
  if (!args.snapshots_out.empty()) {
    io::write_snapshots_csv(args.snapshots_out, result.snapshots);
    io::write_sim_sidecar(args.snapshots_out, g.spec(), config, result);
  }

  const SummaryStats& s = result.summary;
  std::printf("%llu events over %llu recorded steps (warmup %llu)\n",
              static_cast<unsigned long long>(s.event_count),
              static_cast<unsigned long long>(config.record_steps),
              static_cast<unsigned long long>(result.warmup_steps_used));
  std::printf("<s>=%.4g rho=%.5g identity residual %.4f%s\n", s.mean_size, s.mean_density,
              s.identity_residual,
              s.stationarity_warning ? "  [warning: recording window looks non-stationary]"
                                     : "");
  return 0;
}

// -------------------------------------------------------------- stats ----

HistogramMeta meta_from_sidecar_or_flags(const std::string& events_path, std::uint64_t nodes,
                                         double gamma, std::uint32_t linear_size, double q) {
  const fs::path sidecar = events_path + ".meta.json";
  if (fs::exists(sidecar)) {
    const ordered_json j = io::read_json_file(sidecar);
    const NetworkSpec spec = io::network_spec_from_json(j.at("substrate"));
    return HistogramMeta::for_graph(spec, j.at("config").at("q").get<double>(),
                                    {j.at("config").at("seed").get<std::uint64_t>()});
  }
  if (nodes == 0)
    throw CLI::ValidationError(
        "no metadata sidecar found next to the events file; pass --nodes, --q and "
        "--gamma/--linear-size");
  HistogramMeta meta;
  if (linear_size > 0) {
    meta.model = NetworkModel::SquareLattice;
    meta.linear_size = linear_size;
  } else {
    meta.model = NetworkModel::ScaleFreeStatic;
    meta.gamma = gamma;
  }
  meta.nodes = nodes;
  meta.q = q;
  return meta;
}

int cmd_stats_bin(const std::string& in, int bins_per_decade, const std::string& out,
                  std::uint64_t nodes, double gamma, std::uint32_t linear_size, double q) {
  const auto events = io::read_events_csv(in);
  const HistogramMeta meta = meta_from_sidecar_or_flags(in, nodes, gamma, linear_size, q);
  const auto dist = BinnedDistribution::from_events(events, bins_per_decade, meta);
  dist.save_csv(out);
  std::printf("binned %llu events into %zu bins\n",
              static_cast<unsigned long long>(dist.total_events()), dist.num_bins());
  return 0;
}

int cmd_stats_merge(const std::string& in, const std::string& out) {
  const auto paths = split_list(in);
  if (paths.size() < 2) throw CLI::ValidationError("--in needs at least two histograms");
  BinnedDistribution acc = BinnedDistribution::load_csv(paths[0]);
  for (std::size_t i = 1; i < paths.size(); ++i)
    acc = merge(acc, BinnedDistribution::load_csv(paths[i]));
  acc.save_csv(out);
  std::printf("merged %zu histograms: %llu events\n", paths.size(),
              static_cast<unsigned long long>(acc.total_events()));
  return 0;
}

int cmd_stats_density_scan(const std::string& spec_path, const std::string& q_list,
                           std::uint64_t steps, const std::string& warmup, std::uint64_t seed,
                           const std::string& out) {
  const NetworkSpec spec = io::network_spec_from_json(io::read_json_file(spec_path));
  std::vector<double> qs;
  for (const auto& tok : split_list(q_list)) qs.push_back(io::parse_double(tok));

  SimConfig base;
  base.q = qs.front();
  base.record_steps = steps;
  base.warmup_steps = parse_warmup(warmup);
  base.seed = seed;

  const DensityScan scan = density_scan(spec, qs, base);
  io::write_scan_csv(out, scan);
  if (scan.plateau_range)
    std::printf("plateau: q in [%g, %g], q0 = %g\n", scan.plateau_range->first,
                scan.plateau_range->second, *scan.q0_estimate);
  else
    std::printf("no plateau detected\n");
  return 0;
}

int cmd_stats_summary(const std::string& events_path, const std::string& density_path,
                      double q, std::uint64_t nodes, const std::string& out) {
  const auto events = io::read_events_csv(events_path);
  const auto density = io::read_density_csv(density_path);
  const SummaryStats s = summarize(events, density, q, nodes);
  ordered_json j = io::summary_to_json(s);
  j["q"] = q;
  j["nodes"] = nodes;
  io::write_json_file(out, j);
  std::printf("<s>=%.6g rho=%.6g residual=%.4f (%llu events)\n", s.mean_size, s.mean_density,
              s.identity_residual, static_cast<unsigned long long>(s.event_count));
  return 0;
}

// ------------------------------------------------------------ scaling ----

ordered_json crossover_json(const BinnedDistribution& dist) {
  const CrossoverResult r = detect_crossovers(dist);
  ordered_json j;
  j["nodes"] = dist.meta().nodes;
  j["q"] = dist.meta().q;
  j["bump"] = r.has_bump;
  if (r.has_bump) {
    j["s_c1"] = r.estimate.s_c1;
    j["s_c2"] = r.estimate.s_c2;
    j["peak_size"] = r.estimate.peak_size;
    j["peak_density"] = r.estimate.peak_density;
    j["smoothing_window"] = r.estimate.smoothing_window;
  }
  return j;
}

int cmd_scaling_crossovers(const std::string& in, const std::string& out) {
  const auto dist = BinnedDistribution::load_csv(in);
  const ordered_json j = crossover_json(dist);
  io::write_json_file(out, j);
  if (j["bump"].get<bool>())
    std::printf("bump: s_c1=%.4g s_c2=%.4g\n", j["s_c1"].get<double>(),
                j["s_c2"].get<double>());
  else
    std::printf("no bump\n");
  return 0;
}

int cmd_scaling_collapse(const std::string& in, const std::string& out) {
  std::vector<BinnedDistribution> dists;
  for (const auto& path : split_list(in))
    dists.push_back(BinnedDistribution::load_csv(path));
  const ExponentSet fit = estimate_exponents(dists);

  ordered_json j;
  j["tau"] = fit.tau;
  j["mu"] = fit.mu;
  j["zeta"] = fit.zeta;
  j["err_lower"] = fit.collapse_error_lower;
  j["err_upper"] = fit.collapse_error_upper;
  j["relation_residual"] = fit.relation_residual;
  j["converged"] = fit.converged;
  j["per_N_crossovers"] = ordered_json::array();
  for (const auto& d : dists) j["per_N_crossovers"].push_back(crossover_json(d));
  io::write_json_file(out, j);
  std::printf("tau=%.3f mu=%.3f zeta=%.3f (relation residual %.3f)\n", fit.tau, fit.mu,
              fit.zeta, fit.relation_residual);
  return 0;
}

int cmd_scaling_fit_crossover(const std::string& points_path, const std::string& out) {
  const auto points = io::read_points_csv(points_path);
  const PowerLawFit fit = fit_crossover_scaling(points);
  ordered_json j;
  j["exponent"] = fit.exponent;
  j["amplitude"] = fit.amplitude;
  j["exponent_stderr"] = fit.exponent_stderr;
  j["points"] = points.size();
  io::write_json_file(out, j);
  std::printf("exponent %.4f +- %.4f, amplitude %.4g\n", fit.exponent, fit.exponent_stderr,
              fit.amplitude);
  return 0;
}

int cmd_scaling_master_curve(const std::string& in, const std::string& exponents_path,
                             const std::string& region_name, const std::string& out) {
  std::vector<BinnedDistribution> dists;
  for (const auto& path : split_list(in))
    dists.push_back(BinnedDistribution::load_csv(path));
  const ordered_json ej = io::read_json_file(exponents_path);
  const double tau = ej.at("tau").get<double>();
  const double mu = ej.at("mu").get<double>();
  const double zeta = ej.at("zeta").get<double>();

  std::vector<std::pair<std::string, Region>> regions;
  if (region_name == "lower" || region_name == "both") regions.push_back({"lower", Region::Lower});
  if (region_name == "upper" || region_name == "both") regions.push_back({"upper", Region::Upper});
  if (regions.empty())
    throw CLI::ValidationError("--region must be lower, upper or both");

  std::string text = "# cascade-master-curve v1\n";
  text += "# tau=" + io::format_double(tau) + " mu=" + io::format_double(mu) +
          " zeta=" + io::format_double(zeta) + "\n";
  text += "x,y,nodes,region\n";
  std::size_t total = 0;
  for (const auto& [name, region] : regions) {
    const auto points = master_curve(dists, tau, mu, zeta, region);
    total += points.size();
    for (const auto& p : points) {
      text += io::format_double(p.x);
      text += ',';
      text += io::format_double(p.y);
      text += ',';
      text += std::to_string(p.nodes);
      text += ',';
      text += name;
      text += '\n';
    }
  }
  io::write_text_file(out, text);
  std::printf("wrote %zu rescaled points\n", total);
  return 0;
}

// ---------------------------------------------------------------- run ----

int cmd_run(const std::string& plan_path, const std::string& preset_name,
            const std::string& emit_plan, const std::string& out_dir, unsigned workers) {
  ExperimentPlan plan;
  if (!preset_name.empty())
    plan = preset(preset_name);
  else if (!plan_path.empty())
    plan = load_plan(plan_path);
  else
    throw CLI::ValidationError("pass --plan FILE or --preset NAME");

  if (!emit_plan.empty()) {
    save_plan(plan, emit_plan);
    std::printf("wrote plan to %s\n", emit_plan.c_str());
    if (out_dir.empty()) return 0;
  }
  if (out_dir.empty()) throw CLI::ValidationError("--out DIR is required to run");

  const RunManifest manifest = run_experiment(plan, out_dir, workers);
  std::size_t failed = 0, warned = 0;
  for (const auto& cell : manifest.cells) {
    if (cell.status != "ok") ++failed;
    else if (cell.summary.stationarity_warning) ++warned;
  }
  std::printf("ran %zu cells (%zu failed), %zu merged histograms -> %s\n",
              manifest.cells.size(), failed, manifest.merged.size(),
              (fs::path(out_dir) / "manifest.json").string().c_str());
  if (warned > 0)
    std::printf("warning: %zu cell(s) look non-stationary over their recording window\n",
                warned);
  return failed == 0 ? 0 : 3;
}

int cmd_verify(const std::string& manifest_path) {
  const VerifyReport report = verify_manifest(manifest_path);
  if (report.ok) {
    std::printf("manifest ok\n");
    return 0;
  }
  for (const auto& problem : report.problems)
    std::fprintf(stderr, "problem: %s\n", problem.c_str());
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forest-fire avalanche simulator and scaling pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // net
  auto* net = app.add_subcommand("net", "substrate graphs");
  net->require_subcommand(1);
  NetGenArgs gen_args;
  auto* net_gen = net->add_subcommand("gen", "generate a graph");
  net_gen->add_option("--model", gen_args.model, "static|lattice")->required();
  net_gen->add_option("--nodes", gen_args.nodes, "node count (static)");
  net_gen->add_option("--gamma", gen_args.gamma, "degree exponent (static)");
  net_gen->add_option("--links", gen_args.links, "link count (static)");
  net_gen->add_option("--linear-size", gen_args.linear_size, "lattice linear size");
  net_gen->add_option("--periodic", gen_args.periodic, "periodic boundaries (lattice)");
  net_gen->add_option("--seed", gen_args.seed, "generation seed");
  net_gen->add_option("--out", gen_args.out, "output graph file")->required();

  std::string net_stats_in, net_stats_out;
  auto* net_stats = net->add_subcommand("stats", "degree distribution of a graph");
  net_stats->add_option("--in", net_stats_in)->required();
  net_stats->add_option("--out", net_stats_out, "degrees.csv path")->required();

  // sim
  auto* sim = app.add_subcommand("sim", "forest-fire dynamics");
  sim->require_subcommand(1);
  SimRunArgs sim_args;
  auto* sim_run = sim->add_subcommand("run", "run one simulation");
  sim_run->add_option("--graph", sim_args.graph)->required();
  sim_run->add_option("--q", sim_args.q, "liquidity parameter q = theta/N")->required();
  sim_run->add_option("--steps", sim_args.steps,
                      "total steps (recorded steps when --warmup auto)")
      ->required();
  sim_run->add_option("--warmup", sim_args.warmup, "steps to discard, or 'auto'");
  sim_run->add_option("--seed", sim_args.seed);
  sim_run->add_option("--events-out", sim_args.events_out)->required();
  sim_run->add_option("--density-out", sim_args.density_out)->required();
  sim_run->add_option("--snapshot-threshold", sim_args.snapshot_threshold,
                      "snapshot before burns >= fraction*N");
  sim_run->add_option("--snapshots-out", sim_args.snapshots_out);
  sim_run->add_option("--density-stride", sim_args.density_stride,
                      "keep every k-th density sample (0 = auto)");

  // stats
  auto* stats = app.add_subcommand("stats", "event statistics");
  stats->require_subcommand(1);
  std::string bin_in, bin_out;
  int bin_bpd = 10;
  std::uint64_t bin_nodes = 0;
  double bin_gamma = 0.0, bin_q = 0.0;
  std::uint32_t bin_linear = 0;
  auto* stats_bin = stats->add_subcommand("bin", "log-bin avalanche sizes");
  stats_bin->add_option("--in", bin_in, "events.csv")->required();
  stats_bin->add_option("--bins-per-decade", bin_bpd);
  stats_bin->add_option("--out", bin_out)->required();
  stats_bin->add_option("--nodes", bin_nodes, "override when no sidecar is present");
  stats_bin->add_option("--gamma", bin_gamma);
  stats_bin->add_option("--linear-size", bin_linear);
  stats_bin->add_option("--q", bin_q);

  std::string merge_in, merge_out;
  auto* stats_merge = stats->add_subcommand("merge", "merge compatible histograms");
  stats_merge->add_option("--in", merge_in, "comma-separated hist CSVs")->required();
  stats_merge->add_option("--out", merge_out)->required();

  std::string scan_spec, scan_qs, scan_warmup = "auto", scan_out;
  std::uint64_t scan_steps = 0, scan_seed = 1;
  auto* stats_scan = stats->add_subcommand("density-scan", "pre-shock density vs q");
  stats_scan->add_option("--spec", scan_spec, "network spec JSON")->required();
  stats_scan->add_option("--q-list", scan_qs, "comma-separated, increasing")->required();
  stats_scan->add_option("--steps", scan_steps, "recorded steps per q")->required();
  stats_scan->add_option("--warmup", scan_warmup);
  stats_scan->add_option("--seed", scan_seed);
  stats_scan->add_option("--out", scan_out)->required();

  std::string sum_events, sum_density, sum_out;
  double sum_q = 0.0;
  std::uint64_t sum_nodes = 0;
  auto* stats_summary = stats->add_subcommand("summary", "steady-state summary");
  stats_summary->add_option("--events", sum_events)->required();
  stats_summary->add_option("--density", sum_density)->required();
  stats_summary->add_option("--q", sum_q)->required();
  stats_summary->add_option("--nodes", sum_nodes)->required();
  stats_summary->add_option("--out", sum_out)->required();

  // scaling
  auto* scaling = app.add_subcommand("scaling", "finite-size scaling analysis");
  scaling->require_subcommand(1);
  std::string xo_in, xo_out;
  auto* sc_xo = scaling->add_subcommand("crossovers", "detect s_c1 and s_c2");
  sc_xo->add_option("--in", xo_in, "hist.csv")->required();
  sc_xo->add_option("--out", xo_out, "xover.json")->required();

  std::string col_in, col_out;
  auto* sc_col = scaling->add_subcommand("collapse", "estimate (tau, mu, zeta)");
  sc_col->add_option("--in", col_in, "comma-separated hist CSVs, distinct N")->required();
  sc_col->add_option("--out", col_out, "exponents.json")->required();

  std::string fit_points, fit_out;
  auto* sc_fit = scaling->add_subcommand("fit-crossover", "power-law fit of crossover scales");
  sc_fit->add_option("--points", fit_points, "CSV with scale,crossover rows")->required();
  sc_fit->add_option("--out", fit_out, "fit.json")->required();

  std::string mc_in, mc_exp, mc_region = "both", mc_out;
  auto* sc_mc = scaling->add_subcommand("master-curve", "rescaled plot-ready points");
  sc_mc->add_option("--in", mc_in, "comma-separated hist CSVs")->required();
  sc_mc->add_option("--exponents", mc_exp, "exponents.json")->required();
  sc_mc->add_option("--region", mc_region, "lower|upper|both");
  sc_mc->add_option("--out", mc_out, "master.csv")->required();

  // run / verify
  std::string run_plan, run_preset, run_emit, run_out;
  unsigned run_workers = 0;
  auto* runc = app.add_subcommand("run", "execute an experiment plan");
  runc->add_option("--plan", run_plan, "plan JSON file");
  runc->add_option("--preset", run_preset, "built-in plan name");
  runc->add_option("--emit-plan", run_emit, "write the plan JSON and continue");
  runc->add_option("--out", run_out, "output directory");
  runc->add_option("--workers", run_workers, "worker threads (0 = auto/CASCADE_WORKERS)");

  std::string verify_path;
  auto* verifyc = app.add_subcommand("verify", "re-check a run manifest");
  verifyc->add_option("--manifest", verify_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (net_gen->parsed()) return cmd_net_gen(gen_args);
    if (net_stats->parsed()) return cmd_net_stats(net_stats_in, net_stats_out);
    if (sim_run->parsed()) return cmd_sim_run(sim_args);
    if (stats_bin->parsed())
      return cmd_stats_bin(bin_in, bin_bpd, bin_out, bin_nodes, bin_gamma, bin_linear, bin_q);
    if (stats_merge->parsed()) return cmd_stats_merge(merge_in, merge_out);
    if (stats_scan->parsed())
      return cmd_stats_density_scan(scan_spec, scan_qs, scan_steps, scan_warmup, scan_seed,
                                    scan_out);
    if (stats_summary->parsed())
      return cmd_stats_summary(sum_events, sum_density, sum_q, sum_nodes, sum_out);
    if (sc_xo->parsed()) return cmd_scaling_crossovers(xo_in, xo_out);
    if (sc_col->parsed()) return cmd_scaling_collapse(col_in, col_out);
    if (sc_fit->parsed()) return cmd_scaling_fit_crossover(fit_points, fit_out);
    if (sc_mc->parsed()) return cmd_scaling_master_curve(mc_in, mc_exp, mc_region, mc_out);
    if (runc->parsed()) return cmd_run(run_plan, run_preset, run_emit, run_out, run_workers);
    if (verifyc->parsed()) return cmd_verify(verify_path);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
