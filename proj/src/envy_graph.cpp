#include <functional>
#include <stdexcept>
#include <queue>
#include <string>

#include "fairrec/allocation.hpp"

namespace fairrec {

void EnvyGraph::add_edge(CustomerId u, CustomerId w) {
  if (u >= m_ || w >= m_) throw IdOutOfRange("envy edge endpoint out of range");
  if (u == w) throw std::invalid_argument("envy graph has no self-loops");
  adj_[u * m_ + w] = 1;
}

std::vector<std::pair<CustomerId, CustomerId>> EnvyGraph::edges() const {
  std::vector<std::pair<CustomerId, CustomerId>> out;
  for (std::size_t u = 0; u < m_; ++u) {
    for (std::size_t w = 0; w < m_; ++w) {
      if (adj_[u * m_ + w]) out.emplace_back(u, w);
    }
  }
  return out;
}

std::size_t EnvyGraph::edge_count() const noexcept {
  std::size_t c = 0;
  for (auto a : adj_) c += a;
  return c;
}

namespace {

// worth[u * m + b] = value customer u assigns to bundle b.
std::vector<double> bundle_worth(const Allocation& alloc, const RelevanceMatrix& rel) {
  const std::size_t m = alloc.customers();
  std::vector<double> worth(m * m, 0.0);
  for (std::size_t u = 0; u < m; ++u) {
    const auto row = rel.row(static_cast<CustomerId>(u));
    for (std::size_t b = 0; b < m; ++b) {
      double s = 0.0;
      for (ProductId p : alloc.bundles[b]) s += row[p];
      worth[u * m + b] = s;
    }
  }
  return worth;
}

EnvyGraph graph_from_worth(const std::vector<double>& worth, const std::vector<std::size_t>& holds,
                           std::size_t m) {
  EnvyGraph g(m);
  for (std::size_t u = 0; u < m; ++u) {
    const double own = worth[u * m + holds[u]];
    for (std::size_t w = 0; w < m; ++w) {
      if (w != u && worth[u * m + holds[w]] > own) {
        g.add_edge(static_cast<CustomerId>(u), static_cast<CustomerId>(w));
      }
    }
  }
  return g;
}

}  // namespace

EnvyGraph build_envy_graph(const Allocation& partial, const RelevanceMatrix& rel) {
  const std::size_t m = partial.customers();
  if (m != rel.customers()) {
    throw std::invalid_argument("allocation has " + std::to_string(m) + " bundles for " +
                                std::to_string(rel.customers()) + " customers");
  }
  exposures_of(partial, rel.products());  // id range check
  std::vector<std::size_t> holds(m);
  for (std::size_t u = 0; u < m; ++u) holds[u] = u;
  return graph_from_worth(bundle_worth(partial, rel), holds, m);
}

std::vector<CustomerId> find_cycle(const EnvyGraph& g) {
  const std::size_t m = g.nodes();
  enum : unsigned char { kWhite, kGray, kBlack };
  std::vector<unsigned char> color(m, kWhite);
  std::vector<std::size_t> stack_pos(m, 0);
  struct Frame {
    std::size_t node;
    std::size_t next;
  };
  std::vector<Frame> stack;

  for (std::size_t start = 0; start < m; ++start) {
    if (color[start] != kWhite) continue;
    color[start] = kGray;
    stack_pos[start] = 0;
    stack.push_back({start, 0});
    while (!stack.empty()) {
      Frame& top = stack.back();
      const std::size_t v = top.node;
      while (top.next < m && !g.has_edge(static_cast<CustomerId>(v), static_cast<CustomerId>(top.next))) {
        ++top.next;
      }
      if (top.next == m) {
        color[v] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::size_t w = top.next++;
      if (color[w] == kGray) {
        std::vector<CustomerId> cycle;
        for (std::size_t i = stack_pos[w]; i < stack.size(); ++i) {
          cycle.push_back(static_cast<CustomerId>(stack[i].node));
        }
        return cycle;
      }
      if (color[w] == kWhite) {
        color[w] = kGray;
        stack_pos[w] = stack.size();
        stack.push_back({w, 0});
      }
    }
  }
  return {};
}

Allocation eliminate_envy_cycles(Allocation partial, const RelevanceMatrix& rel) {
  const std::size_t m = partial.customers();
  if (m != rel.customers()) {
    throw std::invalid_argument("allocation and relevance disagree on customer count");
  }
  exposures_of(partial, rel.products());

  // Bundles stay put; customers swap which bundle they hold.
  const std::vector<double> worth = bundle_worth(partial, rel);
  std::vector<std::size_t> holds(m);
  for (std::size_t u = 0; u < m; ++u) holds[u] = u;

  bool rotated = false;
  for (;;) {
    const EnvyGraph g = graph_from_worth(worth, holds, m);
    const std::vector<CustomerId> cycle = find_cycle(g);
    if (cycle.empty()) break;
    rotated = true;
    const std::size_t first = holds[cycle.front()];
    for (std::size_t i = 0; i + 1 < cycle.size(); ++i) holds[cycle[i]] = holds[cycle[i + 1]];
    holds[cycle.back()] = first;
  }
  if (!rotated) return partial;

  Allocation out(m);
  for (std::size_t u = 0; u < m; ++u) out.bundles[u] = partial.bundles[holds[u]];
  return out;
}

Ordering topological_order(const EnvyGraph& g) {
  const std::size_t m = g.nodes();
  std::vector<std::size_t> indegree(m, 0);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t w = 0; w < m; ++w) {
      if (g.has_edge(static_cast<CustomerId>(u), static_cast<CustomerId>(w))) ++indegree[w];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> frontier;
  for (std::size_t u = 0; u < m; ++u) {
    if (indegree[u] == 0) frontier.push(u);
  }
  Ordering order;
  order.reserve(m);
  while (!frontier.empty()) {
    const std::size_t u = frontier.top();
    frontier.pop();
    order.push_back(static_cast<CustomerId>(u));
    for (std::size_t w = 0; w < m; ++w) {
      if (g.has_edge(static_cast<CustomerId>(u), static_cast<CustomerId>(w)) && --indegree[w] == 0) {
        frontier.push(w);
      }
    }
  }
  if (order.size() != m) throw CyclicGraph("envy graph contains a cycle");
  return order;
}

}  // namespace fairrec
