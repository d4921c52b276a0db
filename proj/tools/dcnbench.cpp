#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "dcn/builders.hpp"
#include "dcn/edge_list.hpp"
#include "dcn/errors.hpp"
#include "dcn/experiment.hpp"
#include "dcn/flit_sim.hpp"
#include "dcn/flow_model.hpp"
#include "dcn/metrics.hpp"
#include "dcn/routing.hpp"
#include "dcn/traffic.hpp"

namespace {

using namespace dcn;

struct Source {
  std::string positional;
  std::string preset;
  std::string config;
};

struct Loaded {
  Topology topology;
  std::string label;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A preset name, an edge-list file, or the first run of an experiment config.
Loaded load(const Source& src) {
  const BuildOptions options{size_cap_from_env()};
  const int given = !src.positional.empty() + !src.preset.empty() + !src.config.empty();
  if (given != 1) throw std::invalid_argument("give exactly one topology: a preset, a file, or --config");

  if (!src.config.empty()) {
    const auto config = parse_experiment(slurp(src.config));
    const auto& run = config.runs.front();
    return {run.params ? build_from_params(*run.params, options) : build_preset(run.preset, options),
            run.label};
  }
  const std::string& name = src.preset.empty() ? src.positional : src.preset;
  if (!src.preset.empty() || is_preset(name) || !std::filesystem::exists(name))
    return {build_preset(name, options), name};

  auto imported = import_edge_list(slurp(name));
  for (const auto& v : imported.report.violations) {
    if (v.kind != ViolationKind::Disconnected)
      throw std::runtime_error(fmt::format("{}: {}", name, v.message));
  }
  return {std::move(imported.topology), std::filesystem::path(name).stem().string()};
}

void add_source(CLI::App* cmd, Source& src) {
  cmd->add_option("topology", src.positional, "Preset name or edge-list file");
  cmd->add_option("--preset", src.preset, "Named topology");
  cmd->add_option("--config", src.config, "Experiment config; its first run supplies the topology");
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", out));
  f << text;
}

// Bit patterns on a non power of two host count run on a prefix of hosts.
void note_participants(const Topology& t, const TrafficPattern& pattern) {
  const auto used = pattern_participants(pattern, t.host_count());
  if (used.size() != t.host_count())
    std::fprintf(stderr, "note: %s uses hosts 0..%zu of %zu\n", to_string(pattern).c_str(),
                 used.size() - 1, t.host_count());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data center topology builder, metrics and simulators"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  std::string out;

  // build
  Source build_src;
  auto* build = app.add_subcommand("build", "Write a topology as an edge list");
  add_source(build, build_src);
  build->add_option("--out", out, "Output file (default stdout)");

  // metrics
  Source metrics_src;
  unsigned restarts = 8;
  auto* metrics = app.add_subcommand("metrics", "Diameter, path length, bisection, oversubscription");
  add_source(metrics, metrics_src);
  metrics->add_option("--restarts", restarts, "Heuristic bisection restarts");
  metrics->add_option("--seed", seed);
  metrics->add_option("--out", out);

  // route-check
  Source route_src;
  std::string route_mode = "specialized";
  auto* route = app.add_subcommand("route-check", "Route every host pair and compare with BFS");
  add_source(route, route_src);
  route->add_option("--routing", route_mode, "specialized, ecmp or random")
      ->check(CLI::IsMember({"specialized", "ecmp", "random"}));
  route->add_option("--seed", seed);
  route->add_option("--out", out);

  // sim
  Source sim_src;
  SimConfig sim_cfg;
  std::string sim_pattern = "uniform", sim_routing = "random";
  std::uint64_t warmup = 0;
  bool no_drop = false;
  auto* sim = app.add_subcommand("sim", "One flit-level simulation");
  add_source(sim, sim_src);
  sim->add_option("--rate", sim_cfg.injection_rate, "Packets per host per cycle");
  sim->add_option("--pattern", sim_pattern);
  sim->add_option("--routing", sim_routing, "random, ecmp or specialized");
  sim->add_option("--vcs", sim_cfg.vcs_per_port);
  sim->add_option("--cycles", sim_cfg.sim_cycles);
  auto* warmup_opt = sim->add_option("--warmup", warmup);
  sim->add_option("--router-pipeline", sim_cfg.router_pipeline);
  sim->add_option("--link-latency", sim_cfg.link_latency);
  sim->add_flag("--no-drop", no_drop, "Wait for buffer space instead of dropping");
  sim->add_option("--seed", seed);
  sim->add_option("--out", out);

  // flow
  Source flow_src;
  std::string flow_routing = "ecmp", flow_pattern = "complement";
  auto* flow = app.add_subcommand("flow", "Max-min fair bisection test");
  add_source(flow, flow_src);
  flow->add_option("--routing", flow_routing, "ecmp, specialized or conflict-min");
  flow->add_option("--pattern", flow_pattern);
  flow->add_option("--seed", seed);
  flow->add_option("--out", out);

  // sweep
  std::string sweep_name, sweep_config;
  auto* sweep = app.add_subcommand("sweep", "Injection-rate sweep from a config file or fig11..fig15");
  sweep->add_option("experiment", sweep_name, "fig11, fig12, fig13, fig14 or fig15");
  sweep->add_option("--preset", sweep_name, "Same as the positional name");
  sweep->add_option("--config", sweep_config, "Experiment config file");
  auto* sweep_seed = sweep->add_option("--seed", seed);
  auto* sweep_out = sweep->add_option("--out", out);

  // failures
  Source fail_src;
  double fraction = 0.2;
  std::size_t trials = 30;
  auto* failures = app.add_subcommand("failures", "Random switch failures and two-path survival");
  add_source(failures, fail_src);
  failures->add_option("--fraction", fraction)->check(CLI::Range(0.0, 1.0));
  failures->add_option("--trials", trials);
  failures->add_option("--seed", seed);
  failures->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      emit(export_edge_list(load(build_src).topology), out);
    } else if (*metrics) {
      const auto [t, label] = load(metrics_src);
      emit(metrics_csv_header() + "\n" + to_csv_row(compute_metrics(t, label, restarts, seed)) + "\n", out);
    } else if (*route) {
      const auto [t, label] = load(route_src);
      const auto mode = parse_routing_mode(route_mode);
      if (mode == RoutingMode::Specialized && !has_specialized_routing(t))
        throw std::invalid_argument(fmt::format("{} has no specialized routing", label));
      const RoutingTable table = compute_ecmp_tables(t);
      Rng rng(seed);
      std::string text = "src,dst,route,length,shortest,ok\n";
      bool all_ok = true;
      for (std::size_t i = 0; i < t.host_count(); ++i) {
        const auto dist = bfs_distances(t, t.host(i));
        for (std::size_t j = 0; j < t.host_count(); ++j) {
          if (i == j) continue;
          const NodeId s = t.host(i), d = t.host(j);
          Route r;
          switch (mode) {
            case RoutingMode::Specialized: r = specialized_route(t, s, d, rng); break;
            case RoutingMode::Ecmp: r = ecmp_route(t, table, s, d, i * t.host_count() + j, seed); break;
            case RoutingMode::Random: r = random_route(t, table, s, d, rng); break;
          }
          const auto check = check_route(t, r, s, d);
          const bool ok = check.ok && r.length() >= dist[d.index()];
          all_ok = all_ok && ok;
          text += fmt::format("{},{},{},{},{},{}\n", s.value, d.value, to_string(r), r.length(),
                              dist[d.index()], ok ? 1 : 0);
        }
      }
      emit(text, out);
      if (!all_ok) {
        std::fprintf(stderr, "error: some routes failed the check\n");
        return 1;
      }
    } else if (*sim) {
      const auto [t, label] = load(sim_src);
      sim_cfg.pattern = parse_pattern(sim_pattern);
      sim_cfg.seed = seed;
      sim_cfg.drop_and_retransmit = !no_drop;
      if (warmup_opt->count()) sim_cfg.warmup_cycles = warmup;
      note_participants(t, sim_cfg.pattern);
      const auto stats = run_simulation(t, parse_routing_mode(sim_routing), sim_cfg);
      emit(sim_csv_header() + "\n" + to_csv_row(label, sim_cfg, stats) + "\n", out);
    } else if (*flow) {
      const auto [t, label] = load(flow_src);
      const auto pattern = parse_pattern(flow_pattern);
      note_participants(t, pattern);
      const auto result = bisection_test(t, parse_flow_routing(flow_routing), pattern, seed);
      std::fprintf(stderr, "mean %.3f%%, min %.3f%%\n", result.mean_pct, result.min_pct);
      emit(flow_csv_header() + "\n" + to_csv_rows(label, pattern, result), out);
    } else if (*sweep) {
      if (sweep_name.empty() == sweep_config.empty())
        throw std::invalid_argument("give an experiment name or --config, not both");
      ExperimentConfig config =
          sweep_config.empty() ? experiment_preset(sweep_name) : parse_experiment(slurp(sweep_config));
      if (sweep_seed->count()) config.seed = seed;
      if (!sweep_out->count() && config.out) out = *config.out;
      emit(run_experiment(config), out);
    } else if (*failures) {
      const auto [t, label] = load(fail_src);
      const auto stats = failure_experiment(t, fraction, trials, seed);
      std::string text = "topology,trial,failed_switches,two_path_fraction\n";
      for (std::size_t i = 0; i < stats.per_trial_two_path.size(); ++i)
        text += fmt::format("{},{},{},{}\n", label, i, stats.failed_switches,
                            format_real(stats.per_trial_two_path[i]));
      std::fprintf(stderr, "mean two-path fraction %.4f, connected %.4f\n", stats.two_path_fraction,
                   stats.connected_fraction);
      emit(text, out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
