#pragma once

// Test-only centralized solver for the constrained strategy-design problem:
//
//   maximize   sum_i b_i(inbound_i) - sum_i |outbound_i|
//   subject to |outbound_i| <= delta * b_i(inbound_i)   for every agent,
//              0 <= x_e <= 1 on every directed edge.
//
// Augmented-Lagrangian outer loop around projected gradient ascent on the
// box. Entirely independent of the distributed dual-decomposition path it
// is used to cross-check.

#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"

namespace incnet::testing {

struct OracleResult {
    double welfare = 0.0;
    std::vector<std::vector<double>> sigma;  // [agent][neighbor index]
    double max_violation = 0.0;
    bool converged = false;
};

OracleResult solve_constrained_design(const Topology& t, const UtilityModel& m, double delta);

}  // namespace incnet::testing
