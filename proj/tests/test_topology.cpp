#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <map>

#include "incnet/topology.hpp"

using namespace incnet;

TEST_CASE("ring and star shapes") {
    const Topology ring = make_ring(4);
    CHECK(ring.edge_count() == 4);
    for (int i = 0; i < 4; ++i) CHECK(ring.degree(i) == 2);

    const Topology star = make_star(4);
    CHECK(star.degree(0) == 3);
    for (int i = 1; i < 4; ++i) CHECK(star.degree(i) == 1);

    CHECK(make_random(1, 0.5, 1).edge_count() == 0);
}

TEST_CASE("max degree") {
    CHECK(max_degree(make_star(4)) == 3);
    CHECK(max_degree(make_ring(5)) == 2);
    CHECK(max_degree(Topology::from_edges(3, {})) == 0);
}

TEST_CASE("generated graphs are symmetric without self-loops") {
    TopologyParams params;
    params.exponent = 2.8;
    params.link_prob = 0.35;
    for (TopologyKind kind : {TopologyKind::ring, TopologyKind::star, TopologyKind::scale_free,
                              TopologyKind::random_graph}) {
        const Topology t = gen_topology(kind, 40, params, 7);
        for (int i = 0; i < t.n; ++i) {
            CHECK(!t.connected(i, i));
            for (int j = 0; j < t.n; ++j) CHECK(t.connected(i, j) == t.connected(j, i));
            int deg = 0;
            for (int j = 0; j < t.n; ++j) deg += t.connected(i, j) ? 1 : 0;
            CHECK(deg == t.degree(i));
        }
    }
}

TEST_CASE("generators are deterministic in the seed") {
    const Topology a = make_scale_free(200, 2.6, 99);
    const Topology b = make_scale_free(200, 2.6, 99);
    CHECK(a.adj == b.adj);
    const Topology c = make_random(60, 0.3, 5);
    const Topology d = make_random(60, 0.3, 5);
    CHECK(c.adj == d.adj);
    CHECK(make_random(60, 0.3, 6).adj != c.adj);
}

TEST_CASE("scale-free degree distribution follows the requested power law") {
    // CCDF of a power law with exponent g has log-log slope 1-g; fit it over
    // the distinct degrees and recover the exponent.
    for (double exponent : {2.5, 3.0}) {
        const int n = 4000;
        const Topology t = make_scale_free(n, exponent, 1234);
        std::map<int, int> count_ge;  // degree -> #nodes with degree >= d
        std::map<int, int> hist;
        for (int i = 0; i < n; ++i) hist[t.degree(i)]++;
        int running = n;
        std::vector<std::pair<double, double>> pts;  // (log d, log ccdf)
        for (auto& [deg, cnt] : hist) {
            if (deg >= 2 && running >= 20)
                pts.emplace_back(std::log(static_cast<double>(deg)),
                                 std::log(static_cast<double>(running) / n));
            running -= cnt;
        }
        REQUIRE(pts.size() >= 5);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(pts.size());
        const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        const double estimated = 1.0 - slope;
        CHECK(std::abs(estimated - exponent) <= 0.3);
    }
}

TEST_CASE("edge list round trip") {
    const Topology t = make_random(25, 0.3, 42);
    const Topology back = Topology::parse_edge_list(t.to_edge_list());
    CHECK(back.n == t.n);
    CHECK(back.adj == t.adj);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(make_ring(0), std::invalid_argument);
    CHECK_THROWS_AS(make_random(5, 1.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_scale_free(10, 1.9, 0), std::invalid_argument);
    CHECK_THROWS_AS(Topology::from_edges(2, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Topology::parse_edge_list("0 1\n"), std::invalid_argument);
}
