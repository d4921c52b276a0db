#include "dcn/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>
#include <variant>

#include <fmt/core.h>

#include "dcn/errors.hpp"

namespace dcn {

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "fat-tree-k4", "dcell-n4-l1", "dcell-n6-l1", "bcube-n4-k1",
      "facebook-scaled", "f10-k4", "jellyfish-s10-p4-r3"};
  return names;
}

bool is_preset(const std::string& name) {
  const auto& n = preset_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

namespace {

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

Topology build_preset(const std::string& name, const BuildOptions& options) {
  if (name == "fat-tree-k4") return build_fat_tree(FatTreeParams{4, {}}, options);
  if (name == "dcell-n4-l1") return build_dcell(DCellParams{4, 1}, options);
  if (name == "dcell-n6-l1") return build_dcell(DCellParams{6, 1}, options);
  if (name == "bcube-n4-k1") return build_bcube(BCubeParams{4, 1}, options);
  if (name == "facebook-scaled") return build_facebook_fabric(FacebookFabricParams{}, options);
  if (name == "f10-k4") return build_f10(F10Params{4}, options);
  if (name == "jellyfish-s10-p4-r3") return build_jellyfish(JellyfishParams{10, 4, 3, 1}, options);
  throw std::invalid_argument(
      fmt::format("unknown preset '{}'; known presets: {}", name, joined(preset_names())));
}

Topology build_from_params(const BuilderParams& params, const BuildOptions& options) {
  return std::visit(
      [&](const auto& p) -> Topology {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ImportedParams>) {
          throw std::invalid_argument("imported topologies cannot be rebuilt from parameters");
        } else if constexpr (std::is_same_v<P, FatTreeParams>) {
          return build_fat_tree(p, options);
        } else if constexpr (std::is_same_v<P, F10Params>) {
          return build_f10(p, options);
        } else if constexpr (std::is_same_v<P, FacebookFabricParams>) {
          return build_facebook_fabric(p, options);
        } else if constexpr (std::is_same_v<P, DCellParams>) {
          return build_dcell(p, options);
        } else if constexpr (std::is_same_v<P, BCubeParams>) {
          return build_bcube(p, options);
        } else if constexpr (std::is_same_v<P, MDCubeParams>) {
          return build_mdcube(p, options);
        } else if constexpr (std::is_same_v<P, JellyfishParams>) {
          return build_jellyfish(p, options);
        } else if constexpr (std::is_same_v<P, ScafidaParams>) {
          return build_scafida(p, options);
        } else if constexpr (std::is_same_v<P, HCNParams>) {
          return build_hcn(p, options);
        } else {
          return build_bcn(p, options);
        }
      },
      params);
}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};
using Keys = std::map<std::string, Entry>;

struct RawRun {
  std::string name;
  std::size_t line = 0;
  Keys keys;
};

const std::set<std::string> kRunKeys = {
    "label", "topology", "builder", "routing", "pattern", "rates", "vcs", "cycles", "warmup",
    "router_pipeline", "link_latency", "vc_depth", "flits_per_packet", "drop",
    // builder parameters
    "k", "n", "level", "hosts_per_edge", "switches", "hosts", "ports", "r", "max_degree",
    "host_ports", "links_per_node", "topology_seed"};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const Entry& e) {
  std::uint64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  auto [p, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc{} || p != end)
    throw ParseError(e.line, fmt::format("{} expects a non-negative integer, got '{}'", key, e.value));
  return v;
}

std::uint32_t parse_u32(const std::string& key, const Entry& e) {
  const auto v = parse_uint(key, e);
  if (v > 0xffffffffULL) throw ParseError(e.line, fmt::format("{} is too large", key));
  return static_cast<std::uint32_t>(v);
}

double parse_double(const std::string& key, const std::string& text, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw ParseError(line, fmt::format("{} expects a number, got '{}'", key, text));
  return v;
}

bool parse_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "on" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "off" || e.value == "no" || e.value == "0") return false;
  throw ParseError(e.line, fmt::format("{} expects true or false, got '{}'", key, e.value));
}

class Resolver {
 public:
  Resolver(const Keys& defaults, const RawRun& raw) : raw_(raw) {
    keys_ = defaults;
    for (const auto& [k, v] : raw.keys) keys_[k] = v;
  }

  const Entry* get(const std::string& key) {
    used_.insert(key);
    const auto it = keys_.find(key);
    return it == keys_.end() ? nullptr : &it->second;
  }

  std::uint32_t u32(const std::string& key, std::uint32_t fallback) {
    const Entry* e = get(key);
    return e ? parse_u32(key, *e) : fallback;
  }

  // Builder keys that the chosen builder never looked at.
  void reject_unused_builder_keys(const std::string& builder) const {
    static const std::set<std::string> builder_keys = {
        "k", "n", "level", "hosts_per_edge", "switches", "hosts", "ports", "r",
        "max_degree", "host_ports", "links_per_node", "topology_seed"};
    for (const auto& [k, e] : keys_) {
      if (builder_keys.count(k) && !used_.count(k)) {
        throw ParseError(e.line, builder.empty()
                                     ? fmt::format("'{}' needs a builder", k)
                                     : fmt::format("'{}' does not apply to builder {}", k, builder));
      }
    }
  }

  std::size_t line() const { return raw_.line; }

 private:
  const RawRun& raw_;
  Keys keys_;
  std::set<std::string> used_;
};

std::pair<BuilderParams, std::string> builder_params(Resolver& r, const Entry& builder) {
  const std::string& b = builder.value;
  if (b == "fat-tree") {
    FatTreeParams p;
    p.k = r.u32("k", 4);
    if (const Entry* e = r.get("hosts_per_edge")) p.hosts_per_edge = parse_u32("hosts_per_edge", *e);
    std::string label = fmt::format("fat-tree-k{}", p.k);
    if (p.hosts_per_edge) label += fmt::format("-h{}", *p.hosts_per_edge);
    return {p, label};
  }
  if (b == "f10") {
    F10Params p;
    p.k = r.u32("k", 4);
    return {p, fmt::format("f10-k{}", p.k)};
  }
  if (b == "dcell") {
    DCellParams p;
    p.n = r.u32("n", 4);
    p.level = r.u32("level", 1);
    return {p, fmt::format("dcell-n{}-l{}", p.n, p.level)};
  }
  if (b == "bcube") {
    BCubeParams p;
    p.n = r.u32("n", 4);
    p.k = r.u32("k", 1);
    return {p, fmt::format("bcube-n{}-k{}", p.n, p.k)};
  }
  if (b == "jellyfish") {
    JellyfishParams p;
    p.num_switches = r.u32("switches", p.num_switches);
    p.ports = r.u32("ports", p.ports);
    p.r = r.u32("r", p.r);
    if (const Entry* e = r.get("topology_seed")) p.seed = parse_uint("topology_seed", *e);
    return {p, fmt::format("jellyfish-s{}-p{}-r{}", p.num_switches, p.ports, p.r)};
  }
  if (b == "scafida") {
    ScafidaParams p;
    p.num_switches = r.u32("switches", p.num_switches);
    p.num_hosts = r.u32("hosts", p.num_hosts);
    p.max_degree = r.u32("max_degree", p.max_degree);
    p.host_ports = r.u32("host_ports", p.host_ports);
    p.links_per_node = r.u32("links_per_node", p.links_per_node);
    if (const Entry* e = r.get("topology_seed")) p.seed = parse_uint("topology_seed", *e);
    return {p, fmt::format("scafida-s{}-h{}", p.num_switches, p.num_hosts)};
  }
  throw ParseError(builder.line,
                   fmt::format("unknown builder '{}' (fat-tree, f10, dcell, bcube, jellyfish, scafida)", b));
}

std::vector<double> parse_rates(const Entry& e) {
  std::vector<double> rates;
  for (const auto& item : split_list(e.value)) rates.push_back(parse_double("rates", item, e.line));
  if (rates.empty()) throw ParseError(e.line, "empty rate list");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0 && rates[i] <= 1))
      throw ParseError(e.line, fmt::format("rate {} is outside (0, 1]", rates[i]));
    if (i > 0 && rates[i] <= rates[i - 1])
      throw ParseError(e.line, "rates must be strictly increasing");
  }
  return rates;
}

ExperimentRun resolve(const Keys& defaults, const RawRun& raw) {
  Resolver r(defaults, raw);
  ExperimentRun run;

  const Entry* topo = r.get("topology");
  const Entry* builder = r.get("builder");
  if (topo && builder) throw ParseError(builder->line, "give either 'topology' or 'builder', not both");
  if (!topo && !builder) throw ParseError(raw.line, "run needs 'topology' or 'builder'");
  if (topo) {
    if (!is_preset(topo->value))
      throw ParseError(topo->line, fmt::format("unknown preset '{}'; known presets: {}", topo->value,
                                               joined(preset_names())));
    run.preset = topo->value;
    run.label = topo->value;
  } else {
    auto [params, label] = builder_params(r, *builder);
    run.params = params;
    run.label = label;
  }
  r.reject_unused_builder_keys(builder ? builder->value : "");

  if (!raw.name.empty()) run.label = raw.name;
  if (const Entry* e = r.get("label")) run.label = e->value;
  if (run.label.find_first_of(",\"\n") != std::string::npos)
    throw ParseError(r.get("label") ? r.get("label")->line : raw.line, "label may not contain commas or quotes");

  if (const Entry* e = r.get("routing")) {
    try {
      run.routing = parse_routing_mode(e->value);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(e->line, ex.what());
    }
  }
  if (const Entry* e = r.get("pattern")) {
    run.patterns.clear();
    for (const auto& name : split_list(e->value)) {
      try {
        run.patterns.push_back(parse_pattern(name));
      } catch (const std::invalid_argument& ex) {
        throw ParseError(e->line, ex.what());
      }
    }
    if (run.patterns.empty()) throw ParseError(e->line, "empty pattern list");
  }
  const Entry* rates = r.get("rates");
  if (!rates) throw ParseError(raw.line, "run needs 'rates'");
  run.rates = parse_rates(*rates);

  SimConfig& s = run.sim;
  s.vcs_per_port = r.u32("vcs", s.vcs_per_port);
  if (const Entry* e = r.get("cycles")) s.sim_cycles = parse_uint("cycles", *e);
  if (const Entry* e = r.get("warmup")) s.warmup_cycles = parse_uint("warmup", *e);
  s.router_pipeline = r.u32("router_pipeline", s.router_pipeline);
  s.link_latency = r.u32("link_latency", s.link_latency);
  s.vc_depth = r.u32("vc_depth", s.vc_depth);
  s.flits_per_packet = r.u32("flits_per_packet", s.flits_per_packet);
  if (const Entry* e = r.get("drop")) s.drop_and_retransmit = parse_bool("drop", *e);
  s.injection_rate = run.rates.front();
  try {
    validate(s);
  } catch (const std::invalid_argument& ex) {
    throw ParseError(raw.line, ex.what());
  }
  return run;
}

}  // namespace

ExperimentConfig parse_experiment(std::string_view text) {
  Keys globals;
  std::vector<RawRun> raws;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      const auto inner = trim(line.substr(1, line.size() - 2));
      if (inner.substr(0, 3) != "run" || (inner.size() > 3 && inner[3] != ' ' && inner[3] != '\t'))
        throw ParseError(line_no, fmt::format("unknown section [{}]; only [run ...] is allowed", inner));
      raws.push_back({std::string(trim(inner.substr(3))), line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, "missing key before '='");

    const bool global_only = key == "seed" || key == "out";
    if (global_only && !raws.empty())
      throw ParseError(line_no, fmt::format("'{}' belongs before the first section", key));
    if (!global_only && !kRunKeys.count(key)) throw ParseError(line_no, fmt::format("unknown key '{}'", key));
    Keys& target = raws.empty() ? globals : raws.back().keys;
    if (target.count(key)) throw ParseError(line_no, fmt::format("duplicate key '{}'", key));
    target[key] = {value, line_no};
  }

  ExperimentConfig config;
  if (auto it = globals.find("seed"); it != globals.end()) {
    config.seed = parse_uint("seed", it->second);
    globals.erase(it);
  }
  if (auto it = globals.find("out"); it != globals.end()) {
    if (it->second.value.empty()) throw ParseError(it->second.line, "empty output path");
    config.out = it->second.value;
    globals.erase(it);
  }

  if (raws.empty()) {
    if (globals.empty()) throw ParseError(line_no == 0 ? 1 : line_no, "no runs defined");
    raws.push_back({"", 1, {}});
  }
  for (const RawRun& raw : raws) config.runs.push_back(resolve(globals, raw));
  return config;
}

void validate(const ExperimentConfig& config) {
  if (config.runs.empty()) throw std::invalid_argument("experiment has no runs");
  for (const auto& run : config.runs) {
    if (run.preset.empty() == !run.params.has_value())
      throw std::invalid_argument(fmt::format("run '{}' needs exactly one of preset or params", run.label));
    if (!run.preset.empty() && !is_preset(run.preset)) build_preset(run.preset);  // throws with the list
    if (run.patterns.empty()) throw std::invalid_argument(fmt::format("run '{}' has no patterns", run.label));
    if (run.rates.empty()) throw std::invalid_argument(fmt::format("run '{}' has an empty rate list", run.label));
    for (std::size_t i = 0; i < run.rates.size(); ++i) {
      if (!(run.rates[i] > 0 && run.rates[i] <= 1))
        throw std::invalid_argument(fmt::format("rate {} is outside (0, 1]", run.rates[i]));
      if (i > 0 && run.rates[i] <= run.rates[i - 1])
        throw std::invalid_argument("rates must be strictly increasing");
    }
    SimConfig s = run.sim;
    s.injection_rate = run.rates.front();
    validate(s);
  }
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fig11", "fig12", "fig13", "fig14", "fig15"};
  return names;
}

ExperimentConfig experiment_preset(const std::string& name) {
  const std::vector<double> grid{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const std::vector<TrafficPattern> four{TrafficPattern::uniform(), TrafficPattern::complement(),
                                         TrafficPattern::reverse(), TrafficPattern::tornado()};
  auto run = [&](const std::string& preset) {
    ExperimentRun r;
    r.preset = preset;
    r.label = preset;
    r.rates = grid;
    return r;
  };

  ExperimentConfig config;
  if (name == "fig11") {
    auto r = run("fat-tree-k4");
    r.patterns = four;
    config.runs.push_back(r);
  } else if (name == "fig12") {
    for (std::uint32_t vcs : {20u, 50u, 100u}) {
      auto r = run("fat-tree-k4");
      r.rates = {0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
      r.sim.vcs_per_port = vcs;
      config.runs.push_back(r);
    }
  } else if (name == "fig13") {
    config.runs.push_back(run("fat-tree-k4"));
    config.runs.push_back(run("dcell-n4-l1"));
  } else if (name == "fig14") {
    for (const char* preset : {"dcell-n4-l1", "dcell-n6-l1"}) {
      auto r = run(preset);
      r.patterns = {TrafficPattern::uniform(), TrafficPattern::complement()};
      config.runs.push_back(r);
    }
  } else if (name == "fig15") {
    auto r = run("dcell-n4-l1");
    r.patterns = four;
    r.rates = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    config.runs.push_back(r);
  } else {
    throw std::invalid_argument(
        fmt::format("unknown experiment '{}'; known experiments: {}", name, joined(experiment_names())));
  }
  return config;
}

Topology build_run_topology(const ExperimentRun& run) {
  return run.params ? build_from_params(*run.params) : build_preset(run.preset);
}

std::string run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::string out = sim_csv_header() + "\n";
  for (const auto& run : config.runs) {
    const Topology topology = build_run_topology(run);
    for (const auto& pattern : run.patterns) {
      SimConfig sim = run.sim;
      sim.seed = config.seed;
      sim.pattern = pattern;
      const SweepResult curve = sweep_injection(topology, run.routing, pattern, run.rates, sim);
      for (const auto& point : curve.points) {
        sim.injection_rate = point.rate;
        out += to_csv_row(run.label, sim, point.stats) + "\n";
      }
    }
  }
  return out;
}

}  // namespace dcn
