#include "drr/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "drr/rng.hpp"

namespace drr {

namespace {

Graph from_edge_set(int n, const std::set<std::pair<int, int>>& es) {
  Graph g;
  g.n = n;
  g.edges.assign(es.begin(), es.end());
  g.adjacency.assign(n, {});
  for (auto [i, j] : g.edges) {
    g.adjacency[i].push_back(j);
    g.adjacency[j].push_back(i);
  }
  for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  return g;
}

void add_edge(std::set<std::pair<int, int>>& es, int i, int j) {
  if (i == j) return;
  es.insert({std::min(i, j), std::max(i, j)});
}

}  // namespace

bool Graph::has_edge(int i, int j) const {
  if (i == j) return false;
  const auto& a = adjacency.at(i);
  return std::binary_search(a.begin(), a.end(), j);
}

Graph build_graph(const TopologySpec& spec) {
  const int n = spec.n;
  if (n < 1) throw std::invalid_argument("graph: n must be >= 1");
  std::set<std::pair<int, int>> es;

  switch (spec.kind) {
    case TopologyKind::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) add_edge(es, i, j);
      break;

    case TopologyKind::ring:
      for (int i = 0; i < n; ++i) add_edge(es, i, (i + 1) % n);
      break;

    case TopologyKind::grid: {
      if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols != n)
        throw std::invalid_argument(
            "graph: grid requires rows*cols == n (set rows and cols)");
      auto id = [&](int r, int c) { return r * spec.cols + c; };
      for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
          if (c + 1 < spec.cols) add_edge(es, id(r, c), id(r, c + 1));
          if (r + 1 < spec.rows) add_edge(es, id(r, c), id(r + 1, c));
        }
      break;
    }

    case TopologyKind::exponential:
      // i ~ (i +- 2^k) mod n for every power 2^k < n
      for (int i = 0; i < n; ++i)
        for (int p = 1; p < n; p *= 2) {
          add_edge(es, i, (i + p) % n);
          add_edge(es, i, ((i - p) % n + n) % n);
        }
      break;

    case TopologyKind::erdos_renyi: {
      if (!(spec.edge_prob > 0.0 && spec.edge_prob <= 1.0))
        throw std::invalid_argument("graph: erdos_renyi edge_prob must be in (0,1]");
      const int kMaxAttempts = 100;
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        es.clear();
        rng::Stream s(rng::derive(spec.seed, rng::kTagGraph, static_cast<std::uint64_t>(attempt)));
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (s.next_unit() < spec.edge_prob) add_edge(es, i, j);
        Graph g = from_edge_set(n, es);
        if (is_connected(g)) return g;
      }
      throw std::runtime_error(
          "graph: erdos_renyi failed to produce a connected graph in 100 attempts");
    }
  }
  return from_edge_set(n, es);
}

bool is_connected(const Graph& g) {
  if (g.n <= 1) return true;
  std::vector<char> seen(g.n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : g.adjacency[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == g.n;
}

std::string write_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.n << "\n";
  for (auto [i, j] : g.edges) out << i << " " << j << "\n";
  return out.str();
}

Graph parse_edge_list(std::istream& in) {
  int n;
  if (!(in >> n) || n < 1) throw std::invalid_argument("edge list: bad vertex count");
  std::set<std::pair<int, int>> es;
  int i;
  while (in >> i) {
    int j;
    if (!(in >> j)) throw std::invalid_argument("edge list: expected 'i j' pairs");
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("edge list: vertex index out of range");
    if (i == j) throw std::invalid_argument("edge list: self loop");
    if (es.count({std::min(i, j), std::max(i, j)}))
      throw std::invalid_argument("edge list: duplicate edge");
    add_edge(es, i, j);
  }
  if (!in.eof()) throw std::invalid_argument("edge list: bad token");
  return from_edge_set(n, es);
}

Graph parse_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("edge list: cannot open " + path);
  return parse_edge_list(in);
}

const char* topology_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::complete: return "complete";
    case TopologyKind::ring: return "ring";
    case TopologyKind::grid: return "grid";
    case TopologyKind::exponential: return "exponential";
    case TopologyKind::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

TopologyKind topology_from_name(const std::string& name) {
  if (name == "complete") return TopologyKind::complete;
  if (name == "ring") return TopologyKind::ring;
  if (name == "grid") return TopologyKind::grid;
  if (name == "exponential") return TopologyKind::exponential;
  if (name == "erdos_renyi") return TopologyKind::erdos_renyi;
  throw std::invalid_argument("unknown topology: " + name);
}

}  // namespace drr
