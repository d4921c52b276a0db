#include "maxflow.hpp"

#include <algorithm>
#include <queue>

namespace dcn::detail {

namespace {
constexpr double kEps = 1e-12;
}

std::size_t MaxFlow::add_node() {
  graph_.emplace_back();
  level_.push_back(0);
  iter_.push_back(0);
  return graph_.size() - 1;
}

void MaxFlow::add_edge(std::uint32_t from, std::uint32_t to, double cap) {
  graph_[from].push_back({to, static_cast<std::uint32_t>(graph_[to].size()), cap});
  graph_[to].push_back({from, static_cast<std::uint32_t>(graph_[from].size() - 1), 0.0});
}

void MaxFlow::add_undirected(std::uint32_t a, std::uint32_t b, double cap) {
  graph_[a].push_back({b, static_cast<std::uint32_t>(graph_[b].size()), cap});
  graph_[b].push_back({a, static_cast<std::uint32_t>(graph_[a].size() - 1), cap});
}

bool MaxFlow::bfs(std::uint32_t s, std::uint32_t t) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<std::uint32_t> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    for (const Arc& a : graph_[v]) {
      if (a.cap > kEps && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        q.push(a.to);
      }
    }
  }
  return level_[t] >= 0;
}

double MaxFlow::dfs(std::uint32_t v, std::uint32_t t, double f) {
  if (v == t) return f;
  for (auto& i = iter_[v]; i < graph_[v].size(); ++i) {
    Arc& a = graph_[v][i];
    if (a.cap > kEps && level_[v] < level_[a.to]) {
      const double d = dfs(a.to, t, std::min(f, a.cap));
      if (d > kEps) {
        a.cap -= d;
        graph_[a.to][a.rev].cap += d;
        return d;
      }
    }
  }
  return 0.0;
}

double MaxFlow::run(std::uint32_t s, std::uint32_t t, double limit) {
  double flow = 0.0;
  while (flow < limit && bfs(s, t)) {
    std::fill(iter_.begin(), iter_.end(), 0);
    for (double f; (f = dfs(s, t, limit - flow)) > kEps;) flow += f;
  }
  return flow;
}

std::vector<char> MaxFlow::source_side(std::uint32_t s) const {
  std::vector<char> seen(graph_.size(), 0);
  std::vector<std::uint32_t> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (const Arc& a : graph_[v]) {
      if (a.cap > kEps && !seen[a.to]) {
        seen[a.to] = 1;
        stack.push_back(a.to);
      }
    }
  }
  return seen;
}

}  // namespace dcn::detail
