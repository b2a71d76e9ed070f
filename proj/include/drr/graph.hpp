#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace drr {

// Simple undirected graph over vertices 0..n-1. No self loops, no multi-edges.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;     // canonical (i < j), sorted
  std::vector<std::vector<int>> adjacency;    // sorted neighbor lists

  int degree(int i) const { return static_cast<int>(adjacency.at(i).size()); }
  bool has_edge(int i, int j) const;
};

enum class TopologyKind { complete, ring, grid, exponential, erdos_renyi };

struct TopologySpec {
  TopologyKind kind = TopologyKind::complete;
  int n = 0;
  int rows = 0, cols = 0;        // grid
  double edge_prob = 0.0;        // erdos_renyi
  std::uint64_t seed = 0;        // erdos_renyi
};

// Builds the requested topology. Throws std::invalid_argument on bad specs
// (n < 1, grid rows*cols != n, edge_prob outside (0,1]) and std::runtime_error
// if an Erdos-Renyi draw fails to produce a connected graph within the
// attempt budget. ER sampling is deterministic in (n, p, seed).
Graph build_graph(const TopologySpec& spec);

bool is_connected(const Graph& g);

// Edge-list text format: first line "n", then one "i j" per line.
std::string write_edge_list(const Graph& g);
Graph parse_edge_list(std::istream& in);
Graph parse_edge_list_file(const std::string& path);

const char* topology_name(TopologyKind k);
TopologyKind topology_from_name(const std::string& name);

}  // namespace drr
