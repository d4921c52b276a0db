#include "dcn/flit_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <fmt/core.h>

#include "dcn/edge_list.hpp"
#include "dcn/errors.hpp"
#include "dcn/rng.hpp"

namespace dcn {

void validate(const SimConfig& c) {
  auto bad = [](const std::string& what) { throw std::invalid_argument("sim config: " + what); };
  if (!(c.injection_rate > 0.0 && c.injection_rate <= 1.0)) bad("injection_rate must lie in (0, 1]");
  if (c.sim_cycles == 0) bad("sim_cycles must be positive");
  if (c.warmup() >= c.sim_cycles) bad("warmup must be shorter than sim_cycles");
  if (c.vcs_per_port == 0) bad("vcs_per_port must be positive");
  if (c.flits_per_packet == 0) bad("flits_per_packet must be positive");
  if (c.vc_depth < c.flits_per_packet) bad("vc_depth must hold a whole packet");
}

namespace {

constexpr std::int32_t kNone = -1;

struct Packet {
  std::uint32_t src = 0;  // host index
  std::uint32_t dst = 0;  // host index
  NodeId dst_node;
  std::uint64_t created = 0;
  std::uint64_t ready_at = 0;
  std::int32_t out = kNone;  // output channel at the current router
  std::uint32_t route_off = 0;
  std::uint32_t route_len = 0;
  std::uint32_t route_pos = 0;
};

struct InputPort {
  std::vector<std::int32_t> slot;  // packet per VC, kNone when free
  std::vector<std::uint32_t> free_slots;
  std::vector<std::uint64_t> ready_bits;
  std::deque<std::pair<std::uint64_t, std::uint32_t>> pending;  // (ready cycle, slot)
  std::uint32_t reserved = 0;  // slots promised to packets in flight (wait mode)
  std::uint32_t rr = 0;
  std::uint32_t reads = 1;
};

struct Event {
  std::int32_t packet;
  std::int32_t channel;  // kNone: retransmission back at the source
};

struct Request {
  std::int32_t channel;
  std::uint32_t port;  // input port id at this router
  std::int32_t slot;   // kNone for the injection queue head
};

class Simulator {
 public:
  Simulator(const Topology& t, const RoutingTable& table, RoutingMode mode, const SimConfig& cfg)
      : t_(t), table_(table), mode_(mode), cfg_(cfg), rng_(cfg.seed) {
    const std::size_t channels = t_.link_count() * 2;
    ports_.resize(channels);
    latency_.resize(channels);
    capacity_.resize(channels);
    tokens_.assign(channels, 0.0);
    token_time_.assign(channels, 0);
    out_rr_.assign(channels, 0);
    busy_.assign(channels, 0);
    std::uint32_t max_latency = 1;
    for (std::size_t c = 0; c < channels; ++c) {
      const Link& l = t_.link(static_cast<std::uint32_t>(c / 2));
      latency_[c] = cfg_.link_latency > 0 ? cfg_.link_latency : l.latency;
      capacity_[c] = l.capacity;
      tokens_[c] = std::max(1.0, l.capacity);
      max_latency = std::max(max_latency, latency_[c]);
      InputPort& p = ports_[c];
      p.slot.assign(cfg_.vcs_per_port, kNone);
      p.free_slots.resize(cfg_.vcs_per_port);
      for (std::uint32_t s = 0; s < cfg_.vcs_per_port; ++s) p.free_slots[s] = cfg_.vcs_per_port - 1 - s;
      p.ready_bits.assign((cfg_.vcs_per_port + 63) / 64, 0);
      p.reads = static_cast<std::uint32_t>(std::max(1.0, std::ceil(l.capacity - 1e-9)));
    }
    retx_delay_ = cfg_.link_latency > 0 ? cfg_.link_latency : kDefaultLinkLatency;
    calendar_.resize(std::max(max_latency, retx_delay_) + cfg_.flits_per_packet + 2);

    // Per router: input port ids (channels into it) and out channels by neighbour.
    const std::size_t n = t_.node_count();
    inputs_.resize(n);
    outs_.resize(n);
    for (std::uint32_t l = 0; l < t_.link_count(); ++l) {
      const Link& link = t_.link(l);
      inputs_[link.b.index()].push_back(2 * l);      // a -> b arrives at b
      inputs_[link.a.index()].push_back(2 * l + 1);  // b -> a arrives at a
      outs_[link.a.index()].push_back({link.b, static_cast<std::int32_t>(2 * l)});
      outs_[link.b.index()].push_back({link.a, static_cast<std::int32_t>(2 * l + 1)});
    }
    for (auto& o : outs_) std::sort(o.begin(), o.end(), [](auto& x, auto& y) { return x.first < y.first; });
    for (auto& in : inputs_) std::sort(in.begin(), in.end());
    injection_.resize(t_.host_count());
    occupancy_.assign(n, 0);

    participants_ = pattern_participants(cfg_.pattern, t_.host_count());
    bits_ = cfg_.pattern.needs_power_of_two()
                ? address_bits(static_cast<std::uint32_t>(participants_.size()))
                : 0;
    const auto np = static_cast<std::uint32_t>(participants_.size());
    if (np < 2) throw std::invalid_argument("simulation needs at least two participating hosts");
    fixed_dst_.assign(np, kNone);
    senders_ = np;
    if (cfg_.pattern.deterministic()) {
      senders_ = 0;
      Rng unused(0);
      for (std::uint32_t i = 0; i < np; ++i) {
        if (auto d = pattern_destination(cfg_.pattern, i, np, bits_, unused)) {
          fixed_dst_[i] = static_cast<std::int32_t>(*d);
          ++senders_;
        }
      }
    }
  }

  SimStats run() {
    const std::uint64_t warmup = cfg_.warmup();
    for (now_ = 0; now_ < cfg_.sim_cycles; ++now_) {
      measuring_ = now_ >= warmup;
      process_events();
      inject();
      for (std::size_t v = 0; v < t_.node_count(); ++v)
        if (occupancy_[v] > 0) allocate(NodeId(v));
    }
    return finish(warmup);
  }

 private:
  std::int32_t channel_to(NodeId from, NodeId to) const {
    const auto& o = outs_[from.index()];
    auto it = std::lower_bound(o.begin(), o.end(), to, [](const auto& e, NodeId x) { return e.first < x; });
    return it->second;
  }

  std::int32_t new_packet() {
    if (!free_packets_.empty()) {
      auto id = free_packets_.back();
      free_packets_.pop_back();
      return id;
    }
    packets_.emplace_back();
    return static_cast<std::int32_t>(packets_.size() - 1);
  }

  // Chooses the output channel of packet p at router v.
  void route(std::int32_t id, NodeId v) {
    Packet& p = packets_[id];
    NodeId next;
    switch (mode_) {
      case RoutingMode::Random: {
        const auto hops = table_.next_hops(v, p.dst);
        next = hops[rng_.uniform(hops.size())];
        break;
      }
      case RoutingMode::Ecmp: {
        const auto hops = table_.next_hops(v, p.dst);
        next = ecmp_select(hops, std::uint64_t{p.src} * t_.host_count() + p.dst, v.value);
        break;
      }
      case RoutingMode::Specialized:
        next = route_pool_[p.route_off + ++p.route_pos];
        break;
    }
    p.out = channel_to(v, next);
  }

  void enqueue_at_source(std::int32_t id) {
    Packet& p = packets_[id];
    const NodeId src = t_.host(p.src);
    if (mode_ == RoutingMode::Specialized) {
      const Route r = specialized_route(t_, src, p.dst_node, rng_);
      p.route_off = static_cast<std::uint32_t>(route_pool_.size());
      p.route_len = static_cast<std::uint32_t>(r.nodes.size());
      p.route_pos = 0;
      route_pool_.insert(route_pool_.end(), r.nodes.begin(), r.nodes.end());
    }
    p.ready_at = now_ + cfg_.router_pipeline;
    route(id, src);
    injection_[p.src].push_back(id);
    ++occupancy_[src.index()];
  }

  void schedule(std::uint64_t at, Event e) { calendar_[at % calendar_.size()].push_back(e); }

  void process_events() {
    auto& bucket = calendar_[now_ % calendar_.size()];
    // Arrivals may schedule nothing into this bucket, so plain iteration is safe.
    for (const Event& e : bucket) {
      if (e.channel == kNone) {
        --awaiting_;
        ++retransmitted_;
        enqueue_at_source(e.packet);
      } else {
        arrive(e.packet, e.channel);
      }
    }
    bucket.clear();
  }

  void arrive(std::int32_t id, std::int32_t c) {
    Packet& p = packets_[id];
    --in_links_;
    const Link& link = t_.link(static_cast<std::uint32_t>(c / 2));
    const NodeId v = c % 2 == 0 ? link.b : link.a;
    if (v == p.dst_node) {
      ++received_;
      if (measuring_) {
        ++window_received_;
        latency_sum_ += static_cast<double>(now_ - p.created);
      }
      free_packets_.push_back(id);
      return;
    }
    InputPort& port = ports_[c];
    if (!cfg_.drop_and_retransmit) {
      --port.reserved;
    } else if (port.free_slots.empty()) {
      ++dropped_;
      ++awaiting_;
      schedule(now_ + retx_delay_, {id, kNone});
      return;
    }
    const std::uint32_t slot = port.free_slots.back();
    port.free_slots.pop_back();
    port.slot[slot] = id;
    port.pending.push_back({now_ + cfg_.router_pipeline, slot});
    ++occupancy_[v.index()];
    route(id, v);
  }

  void inject() {
    const auto np = static_cast<std::uint32_t>(participants_.size());
    for (std::uint32_t i = 0; i < np; ++i) {
      if (cfg_.pattern.deterministic() && fixed_dst_[i] == kNone) continue;
      if (!rng_.bernoulli(cfg_.injection_rate)) continue;
      std::uint32_t dst;
      if (cfg_.pattern.deterministic()) {
        dst = static_cast<std::uint32_t>(fixed_dst_[i]);
      } else {
        dst = *pattern_destination(cfg_.pattern, i, np, bits_, rng_);
      }
      const std::int32_t id = new_packet();
      Packet& p = packets_[id];
      p = Packet{};
      p.src = participants_[i];
      p.dst = participants_[dst];
      p.dst_node = t_.host(p.dst);
      p.created = now_;
      ++injected_;
      if (measuring_) ++window_injected_;
      enqueue_at_source(id);
    }
  }

  bool take_token(std::int32_t c) {
    const double cap = capacity_[c];
    const double ceiling = std::max(1.0, cap);
    tokens_[c] = std::min(ceiling, tokens_[c] + cap * static_cast<double>(now_ - token_time_[c]));
    token_time_[c] = now_;
    if (tokens_[c] < 1.0 - 1e-9) return false;
    tokens_[c] -= cfg_.flits_per_packet;
    return true;
  }

  bool downstream_has_room(std::int32_t c, std::int32_t packet) {
    if (cfg_.drop_and_retransmit) return true;
    const Link& link = t_.link(static_cast<std::uint32_t>(c / 2));
    const NodeId v = c % 2 == 0 ? link.b : link.a;
    if (v == packets_[packet].dst_node) return true;
    const InputPort& p = ports_[c];
    return p.free_slots.size() > p.reserved;
  }

  void allocate(NodeId v) {
    requests_.clear();
    const auto& ins = inputs_[v.index()];
    for (std::uint32_t k = 0; k < ins.size(); ++k) {
      InputPort& port = ports_[ins[k]];
      while (!port.pending.empty() && port.pending.front().first <= now_) {
        const auto s = port.pending.front().second;
        port.ready_bits[s / 64] |= std::uint64_t{1} << (s % 64);
        port.pending.pop_front();
      }
      // Round-robin over ready VCs starting at the port pointer.
      const auto vcs = static_cast<std::uint32_t>(port.slot.size());
      std::uint32_t from = port.rr;
      for (std::uint32_t r = 0; r < port.reads; ++r) {
        const std::int32_t s = next_ready(port, from, vcs);
        if (s == kNone) break;
        requests_.push_back({packets_[port.slot[s]].out, k, s});
        from = static_cast<std::uint32_t>(s) + 1;
        if (from == vcs) from = 0;
        if (from == port.rr) break;
      }
    }
    if (auto hi = t_.host_index(v)) {
      auto& q = injection_[*hi];
      if (!q.empty() && packets_[q.front()].ready_at <= now_) {
        requests_.push_back({packets_[q.front()].out, static_cast<std::uint32_t>(ins.size()), kNone});
      }
    }
    if (requests_.empty()) return;

    std::sort(requests_.begin(), requests_.end(), [](const Request& a, const Request& b) {
      return a.channel != b.channel ? a.channel < b.channel : a.port < b.port;
    });
    const auto nports = static_cast<std::uint32_t>(ins.size() + 1);
    for (std::size_t i = 0; i < requests_.size();) {
      std::size_t j = i;
      while (j < requests_.size() && requests_[j].channel == requests_[i].channel) ++j;
      grant_output(v, i, j, nports);
      i = j;
    }
  }

  std::int32_t next_ready(const InputPort& port, std::uint32_t from, std::uint32_t vcs) const {
    for (std::uint32_t pass = 0; pass < 2; ++pass) {
      const std::uint32_t lo = pass == 0 ? from : 0;
      const std::uint32_t hi = pass == 0 ? vcs : from;
      for (std::uint32_t w = lo / 64; w * 64 < hi; ++w) {
        std::uint64_t bits = port.ready_bits[w];
        if (w == lo / 64) bits &= ~std::uint64_t{0} << (lo % 64);
        if (bits == 0) continue;
        const auto s = w * 64 + static_cast<std::uint32_t>(std::countr_zero(bits));
        if (s < hi) return static_cast<std::int32_t>(s);
      }
    }
    return kNone;
  }

  // Requests [i, j) target the same output channel. Ports are tried in
  // round-robin order after the last granted one.
  void grant_output(NodeId v, std::size_t i, std::size_t j, std::uint32_t nports) {
    const std::int32_t c = requests_[i].channel;
    std::size_t start = i;
    while (start < j && requests_[start].port < out_rr_[c]) ++start;
    const std::size_t count = j - i;
    std::uint32_t last_port = UINT32_MAX;
    for (std::size_t n = 0; n < count; ++n) {
      const Request& req = requests_[i + (start - i + n) % count];
      if (req.port == last_port) continue;  // one grant per input and output
      const std::int32_t id = req.slot == kNone ? injection_[*t_.host_index(v)].front()
                                                : ports_[inputs_[v.index()][req.port]].slot[req.slot];
      if (!downstream_has_room(c, id)) break;
      if (!take_token(c)) break;
      send(v, req, id, c);
      last_port = req.port;
      out_rr_[c] = (req.port + 1) % nports;
    }
  }

  void send(NodeId v, const Request& req, std::int32_t id, std::int32_t c) {
    if (req.slot == kNone) {
      injection_[*t_.host_index(v)].pop_front();
    } else {
      InputPort& port = ports_[inputs_[v.index()][req.port]];
      const auto s = static_cast<std::uint32_t>(req.slot);
      port.slot[s] = kNone;
      port.ready_bits[s / 64] &= ~(std::uint64_t{1} << (s % 64));
      port.free_slots.push_back(s);
      port.rr = s + 1 == port.slot.size() ? 0 : s + 1;
    }
    --occupancy_[v.index()];
    if (!cfg_.drop_and_retransmit) {
      const Link& link = t_.link(static_cast<std::uint32_t>(c / 2));
      const NodeId to = c % 2 == 0 ? link.b : link.a;
      if (to != packets_[id].dst_node) ++ports_[c].reserved;
    }
    if (measuring_) busy_[c] += cfg_.flits_per_packet;
    ++in_links_;
    schedule(now_ + latency_[c] + cfg_.flits_per_packet - 1, {id, c});
  }

  SimStats finish(std::uint64_t warmup) {
    SimStats s;
    s.packets_injected = injected_;
    s.packets_received = received_;
    s.awaiting_retransmit = awaiting_;
    std::uint64_t held = in_links_;
    for (const auto& q : injection_) held += q.size();
    for (const auto& p : ports_) held += p.slot.size() - p.free_slots.size();
    s.in_flight = held;
    s.dropped = dropped_;
    s.retransmitted = retransmitted_;
    s.window_cycles = cfg_.sim_cycles - warmup;
    s.window_injected = window_injected_;
    s.window_received = window_received_;
    s.participants = senders_;
    s.offered_rate = cfg_.injection_rate;
    s.reception_rate = senders_ == 0 ? 0.0
                                     : static_cast<double>(window_received_) /
                                           static_cast<double>(senders_) /
                                           static_cast<double>(s.window_cycles);
    s.avg_packet_latency = window_received_ == 0 ? 0.0 : latency_sum_ / static_cast<double>(window_received_);
    s.link_utilization.resize(busy_.size());
    for (std::size_t c = 0; c < busy_.size(); ++c) {
      s.link_utilization[c] = std::min(
          1.0, static_cast<double>(busy_[c]) / (static_cast<double>(s.window_cycles) * capacity_[c]));
    }
    s.saturated = s.reception_rate < 0.95 * cfg_.injection_rate;
    return s;
  }

  const Topology& t_;
  const RoutingTable& table_;
  RoutingMode mode_;
  const SimConfig& cfg_;
  Rng rng_;

  std::vector<InputPort> ports_;
  std::vector<std::uint32_t> latency_;
  std::vector<double> capacity_;
  std::vector<double> tokens_;
  std::vector<std::uint64_t> token_time_;
  std::vector<std::uint32_t> out_rr_;
  std::vector<std::uint64_t> busy_;
  std::vector<std::vector<std::uint32_t>> inputs_;
  std::vector<std::vector<std::pair<NodeId, std::int32_t>>> outs_;
  std::vector<std::deque<std::int32_t>> injection_;
  std::vector<std::uint32_t> occupancy_;
  std::vector<std::vector<Event>> calendar_;
  std::vector<Request> requests_;
  std::vector<Packet> packets_;
  std::vector<std::int32_t> free_packets_;
  std::vector<NodeId> route_pool_;

  std::vector<std::uint32_t> participants_;
  std::vector<std::int32_t> fixed_dst_;
  std::size_t senders_ = 0;
  std::uint32_t bits_ = 0;
  std::uint32_t retx_delay_ = kDefaultLinkLatency;

  std::uint64_t now_ = 0;
  bool measuring_ = false;
  std::uint64_t injected_ = 0, received_ = 0, dropped_ = 0, retransmitted_ = 0;
  std::uint64_t awaiting_ = 0, in_links_ = 0;
  std::uint64_t window_injected_ = 0, window_received_ = 0;
  double latency_sum_ = 0;
};

}  // namespace

SimStats run_simulation(const Topology& topology, const RoutingTable& table, RoutingMode mode,
                        const SimConfig& config) {
  validate(config);
  if (mode == RoutingMode::Specialized && !has_specialized_routing(topology)) {
    throw std::invalid_argument(
        fmt::format("no specialized routing for {}", family_name(topology.params())));
  }
  Simulator sim(topology, table, mode, config);
  return sim.run();
}

SimStats run_simulation(const Topology& topology, RoutingMode mode, const SimConfig& config) {
  validate(config);
  const RoutingTable table = compute_ecmp_tables(topology);
  return run_simulation(topology, table, mode, config);
}

SweepResult sweep_injection(const Topology& topology, RoutingMode mode,
                            const TrafficPattern& pattern, const std::vector<double>& rates,
                            const SimConfig& config) {
  if (rates.empty()) throw std::invalid_argument("sweep needs at least one rate");
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (!(rates[i] > rates[i - 1])) throw std::invalid_argument("sweep rates must be strictly increasing");
  }
  const RoutingTable table = compute_ecmp_tables(topology);
  SweepResult out;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    SimConfig c = config;
    c.pattern = pattern;
    c.injection_rate = rates[i];
    c.seed = derive_seed(config.seed, i);
    SweepPoint pt{rates[i], run_simulation(topology, table, mode, c)};
    if (!out.saturation_index && pt.stats.saturated) out.saturation_index = i;
    out.saturation_reception = std::max(out.saturation_reception, pt.stats.reception_rate);
    out.points.push_back(std::move(pt));
  }
  return out;
}

std::string sim_csv_header() {
  return "topology,pattern,rate,vcs,cycles,injected,received,reception_rate,avg_latency,dropped,saturated";
}

std::string to_csv_row(const std::string& topology, const SimConfig& config, const SimStats& s) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", topology, to_string(config.pattern),
                     format_real(config.injection_rate), config.vcs_per_port, config.sim_cycles,
                     s.packets_injected, s.packets_received, format_real(s.reception_rate),
                     format_real(s.avg_packet_latency), s.dropped, s.saturated ? 1 : 0);
}

}  // namespace dcn
