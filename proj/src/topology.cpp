#include "incnet/topology.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "incnet/rng.hpp"

namespace incnet {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

struct EdgeBuilder {
    int n;
    std::vector<std::uint8_t> adj;
    explicit EdgeBuilder(int n_) : n(n_), adj(static_cast<std::size_t>(n_) * n_, 0) {}
    void add(int i, int j) {
        if (i == j) return;
        adj[static_cast<std::size_t>(i) * n + j] = 1;
        adj[static_cast<std::size_t>(j) * n + i] = 1;
    }
    Topology build() const {
        Topology t;
        t.n = n;
        t.adj = adj;
        t.neighbors.assign(n, {});
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (adj[static_cast<std::size_t>(i) * n + j]) t.neighbors[i].push_back(j);
        return t;
    }
};

}  // namespace

Topology Topology::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    require(n >= 1, "topology: n must be >= 1");
    EdgeBuilder b(n);
    for (auto [i, j] : edges) {
        require(i >= 0 && i < n && j >= 0 && j < n, "topology: edge endpoint out of range");
        require(i != j, "topology: self-loops not allowed");
        b.add(i, j);
    }
    return b.build();
}

int Topology::edge_count() const {
    int deg_sum = 0;
    for (const auto& nb : neighbors) deg_sum += static_cast<int>(nb.size());
    return deg_sum / 2;
}

int Topology::neighbor_index(int i, int j) const {
    const auto& nb = neighbors[i];
    auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (it == nb.end() || *it != j) return -1;
    return static_cast<int>(it - nb.begin());
}

bool Topology::is_connected_graph() const {
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : neighbors[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == n;
}

std::string Topology::to_edge_list() const {
    std::ostringstream os;
    os << "n=" << n << "\n";
    for (int i = 0; i < n; ++i)
        for (int j : neighbors[i])
            if (j > i) os << i << " " << j << "\n";
    return os.str();
}

Topology Topology::parse_edge_list(const std::string& text) {
    std::istringstream is(text);
    std::string header;
    if (!std::getline(is, header) || header.rfind("n=", 0) != 0)
        throw std::invalid_argument("edge list: missing n=<count> header");
    int n = std::stoi(header.substr(2));
    std::vector<std::pair<int, int>> edges;
    int i, j;
    while (is >> i >> j) edges.emplace_back(i, j);
    return from_edges(n, edges);
}

TopologyKind topology_kind_from_string(const std::string& s) {
    if (s == "ring") return TopologyKind::ring;
    if (s == "star") return TopologyKind::star;
    if (s == "scale_free") return TopologyKind::scale_free;
    if (s == "random") return TopologyKind::random_graph;
    throw std::invalid_argument("unknown topology kind: " + s);
}

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::ring: return "ring";
        case TopologyKind::star: return "star";
        case TopologyKind::scale_free: return "scale_free";
        case TopologyKind::random_graph: return "random";
    }
    return "?";
}

Topology make_ring(int n) {
    require(n >= 1, "ring: n must be >= 1");
    EdgeBuilder b(n);
    for (int i = 0; i + 1 < n; ++i) b.add(i, i + 1);
    if (n >= 3) b.add(n - 1, 0);
    return b.build();
}

Topology make_star(int n) {
    require(n >= 1, "star: n must be >= 1");
    EdgeBuilder b(n);
    for (int i = 1; i < n; ++i) b.add(0, i);
    return b.build();
}

// Preferential attachment with shifted-linear kernel (weight = degree + shift).
// Each arriving node attaches to m_attach distinct existing nodes; the shift
// (exponent - 3) * m_attach tunes the asymptotic power-law exponent.
Topology make_scale_free(int n, double exponent, std::uint64_t seed) {
    require(n >= 1, "scale_free: n must be >= 1");
    require(exponent > 2.0, "scale_free: exponent must exceed 2");
    constexpr int m_attach = 2;
    const double shift = (exponent - 3.0) * m_attach;

    EdgeBuilder b(n);
    std::vector<int> degree(n, 0);
    auto link = [&](int i, int j) {
        b.add(i, j);
        ++degree[i];
        ++degree[j];
    };

    const int seed_nodes = std::min(n, m_attach + 1);
    for (int i = 0; i < seed_nodes; ++i)
        for (int j = i + 1; j < seed_nodes; ++j) link(i, j);

    Rng rng(seed);
    std::vector<int> picked;
    for (int v = seed_nodes; v < n; ++v) {
        picked.clear();
        const int targets = std::min(m_attach, v);
        while (static_cast<int>(picked.size()) < targets) {
            double total = 0.0;
            for (int u = 0; u < v; ++u) {
                if (std::find(picked.begin(), picked.end(), u) != picked.end()) continue;
                total += degree[u] + shift;
            }
            double r = rng.uniform() * total;
            int chosen = -1;
            for (int u = 0; u < v; ++u) {
                if (std::find(picked.begin(), picked.end(), u) != picked.end()) continue;
                r -= degree[u] + shift;
                if (r <= 0.0) {
                    chosen = u;
                    break;
                }
            }
            if (chosen < 0) chosen = v - 1;  // fp fallthrough
            picked.push_back(chosen);
        }
        for (int u : picked) link(v, u);
    }
    return b.build();
}

Topology make_random(int n, double p, std::uint64_t seed) {
    require(n >= 1, "random: n must be >= 1");
    require(p >= 0.0 && p <= 1.0, "random: link probability must be in [0,1]");
    EdgeBuilder b(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) b.add(i, j);
    return b.build();
}

Topology make_circulant(int n, int degree) {
    require(n >= 1, "circulant: n must be >= 1");
    require(degree >= 0 && degree % 2 == 0 && degree < n, "circulant: degree must be even and < n");
    EdgeBuilder b(n);
    for (int i = 0; i < n; ++i)
        for (int k = 1; k <= degree / 2; ++k) b.add(i, (i + k) % n);
    return b.build();
}

Topology gen_topology(TopologyKind kind, int n, const TopologyParams& params, std::uint64_t seed) {
    switch (kind) {
        case TopologyKind::ring: return make_ring(n);
        case TopologyKind::star: return make_star(n);
        case TopologyKind::scale_free: return make_scale_free(n, params.exponent, seed);
        case TopologyKind::random_graph: return make_random(n, params.link_prob, seed);
    }
    throw std::invalid_argument("gen_topology: bad kind");
}

int max_degree(const Topology& t) {
    int d = 0;
    for (int i = 0; i < t.n; ++i) d = std::max(d, t.degree(i));
    return d;
}

}  // namespace incnet
