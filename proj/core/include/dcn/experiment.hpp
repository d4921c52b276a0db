#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcn/builders.hpp"
#include "dcn/flit_sim.hpp"
#include "dcn/routing.hpp"
#include "dcn/topology.hpp"
#include "dcn/traffic.hpp"

namespace dcn {

/// Named topologies: fat-tree-k4, dcell-n4-l1, dcell-n6-l1, bcube-n4-k1,
/// facebook-scaled, f10-k4, jellyfish-s10-p4-r3.
const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);
/// Throws std::invalid_argument listing the known names.
Topology build_preset(const std::string& name, const BuildOptions& options = {});

/// Rebuilds a topology from its construction parameters. Imported topologies
/// have none and are rejected.
Topology build_from_params(const BuilderParams& params, const BuildOptions& options = {});

/// One curve family: a topology swept over `rates` once per pattern.
struct ExperimentRun {
  std::string label;
  std::string preset;                   // empty when `params` is set
  std::optional<BuilderParams> params;
  RoutingMode routing = RoutingMode::Random;
  std::vector<TrafficPattern> patterns{TrafficPattern::uniform()};
  std::vector<double> rates;
  SimConfig sim;
};

struct ExperimentConfig {
  std::vector<ExperimentRun> runs;
  std::optional<std::string> out;
  std::uint64_t seed = 1;
};

/// Reads the line-oriented experiment format:
///
///   # comment
///   seed = 7
///   cycles = 10000          (keys before any section are defaults)
///
///   [run fat tree]
///   topology = fat-tree-k4  (or: builder = dcell, n = 4, level = 1)
///   pattern = uniform, tornado
///   rates = 0.1, 0.2, 0.4
///
/// Every problem is a ParseError carrying the line it was found on.
ExperimentConfig parse_experiment(std::string_view text);

/// Throws std::invalid_argument for an empty run list, rates outside (0, 1]
/// or not increasing, and bad simulator settings.
void validate(const ExperimentConfig& config);

/// fig11 .. fig15.
const std::vector<std::string>& experiment_names();
ExperimentConfig experiment_preset(const std::string& name);

Topology build_run_topology(const ExperimentRun& run);

/// Whole CSV document (header included), rows in config order: run, then
/// pattern, then rate. The config seed replaces every run's simulator seed.
std::string run_experiment(const ExperimentConfig& config);

}  // namespace dcn
