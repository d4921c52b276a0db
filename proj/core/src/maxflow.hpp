#pragma once

#include <cstdint>
#include <vector>

namespace dcn::detail {

// Dinic max-flow on a small directed graph with real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : graph_(n), level_(n), iter_(n) {}

  std::size_t size() const { return graph_.size(); }
  std::size_t add_node();
  void add_edge(std::uint32_t from, std::uint32_t to, double cap);
  // Both directions carry `cap`.
  void add_undirected(std::uint32_t a, std::uint32_t b, double cap);

  double run(std::uint32_t s, std::uint32_t t, double limit = 1e300);

  // After run(): nodes reachable from s in the residual graph.
  std::vector<char> source_side(std::uint32_t s) const;

 private:
  struct Arc {
    std::uint32_t to;
    std::uint32_t rev;
    double cap;
  };
  bool bfs(std::uint32_t s, std::uint32_t t);
  double dfs(std::uint32_t v, std::uint32_t t, double f);

  std::vector<std::vector<Arc>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

}  // namespace dcn::detail
