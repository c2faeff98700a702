#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace incnet {

// Undirected interaction graph over agents 0..n-1. Immutable after
// construction; adjacency is kept both as a dense matrix and as sorted
// neighbor lists (the operative representation for all algorithms).
struct Topology {
    int n = 0;
    std::vector<std::uint8_t> adj;               // row-major n*n, 0/1
    std::vector<std::vector<int>> neighbors;     // sorted ascending

    Topology() = default;
    static Topology from_edges(int n, const std::vector<std::pair<int, int>>& edges);

    bool connected(int i, int j) const { return adj[static_cast<std::size_t>(i) * n + j] != 0; }
    int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
    int edge_count() const;
    // index of j within i's neighbor list, -1 if not adjacent
    int neighbor_index(int i, int j) const;
    bool is_connected_graph() const;

    // Edge-list text format: header line "n=<count>", then one "i j" per line.
    std::string to_edge_list() const;
    static Topology parse_edge_list(const std::string& text);
};

enum class TopologyKind { ring, star, scale_free, random_graph };

struct TopologyParams {
    double exponent = 3.0;   // scale_free power-law parameter d^SF (> 2)
    double link_prob = 0.2;  // random graph link probability
};

TopologyKind topology_kind_from_string(const std::string& s);
std::string to_string(TopologyKind kind);

Topology gen_topology(TopologyKind kind, int n, const TopologyParams& params, std::uint64_t seed);

Topology make_ring(int n);
Topology make_star(int n);
Topology make_scale_free(int n, double exponent, std::uint64_t seed);
Topology make_random(int n, double p, std::uint64_t seed);
// circulant graph: every agent linked to the d/2 nearest ids on each side
Topology make_circulant(int n, int degree);

int max_degree(const Topology& t);

}  // namespace incnet
