#pragma once

#include <vector>

#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"

namespace incnet {

struct Metrics {
    double v_opt = 0.0;
    double v_star = 0.0;
    double poa = 1.0;
    std::vector<double> per_agent_utility;
};

// Splits `total` across k unit-capped slots: even share, clamp at 1,
// redistribute any residual round-robin by ascending slot index. The shared
// tie-breaking rule for all even-split allocations in the toolkit.
std::vector<double> even_split_capped(double total, int k);

// Benchmark with obedient agents: each agent's inbound maximizes
// b_i(inbound) - |inbound| over the per-link box. Returns the profile and
// the welfare it attains.
std::pair<ActionProfile, double> solve_obedient(const Topology& t, const UtilityModel& m);

double social_welfare(const Topology& t, const UtilityModel& m, const ActionProfile& profile);

// Largest degree d such that delta * b(d) - d >= 0 (positive root of the
// tie equation, bisection to 1e-9); 0 when no positive root exists.
double poa_threshold_degree(const UtilityModel& m, double delta);

// Interior optimum of b(s) - s for a single agent with m_i unit-capped
// inbound links (sum form): min(m_i, max(0, sqrt(r2) - 1)).
double obedient_inbound_sum(const UtilityModel& m, int degree);

}  // namespace incnet
