#pragma once

#include "incnet/rng.hpp"
#include "incnet/topology.hpp"

namespace incnet::testing {

// Random G(n,p) conditioned on connectivity (rejection by seed bump).
inline Topology make_connected_random(int n, double p, std::uint64_t seed) {
    for (std::uint64_t bump = 0;; ++bump) {
        Topology t = make_random(n, p, mix_seed(seed, bump));
        if (t.is_connected_graph()) return t;
    }
}

}  // namespace incnet::testing
