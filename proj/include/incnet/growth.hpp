#pragma once

#include <cstdint>
#include <vector>

#include "incnet/dcrs.hpp"
#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"

namespace incnet {

struct GrowthConfig {
    int n0 = 50;             // initial agent count
    double join_prob = 0.1;  // per-period probability that one agent joins
    double link_prob = 0.2;  // link probability of a joining agent to each existing one
    int horizon = 1000;
};

// Closed-form expected time-average optimal welfare from a refresh until the
// next one, when the optimal welfare grows by delta_v per period on average:
// V + (1-rho) * delta_v / (2 rho).
double expected_opt_welfare(double v_opt_at_refresh, double delta_v, double rho);

// Strategy design under protocol refreshing: the refresh truncates
// continuation utility, so the design runs with effective discount
// (1-rho)*delta.
DcrsResult design_with_refresh(const Topology& t, const UtilityModel& m, double delta, double rho,
                               const DcrsParams& params);

// Pre-sampled growth trajectory: the same path is replayed for every
// refresh rate so that rates are compared on common random numbers.
struct GrowthPath {
    Topology initial;
    int horizon = 0;
    // join_links[t]: links of the agent joining after period t (empty slot if none)
    std::vector<bool> joins;
    std::vector<std::vector<int>> join_links;
    std::vector<double> v_opt;  // optimal welfare of the topology in force each period
};

GrowthPath sample_growth_path(const GrowthConfig& cfg, const UtilityModel& m, std::uint64_t seed);

struct GrowthRunResult {
    double mean_opt = 0.0;       // time-average optimal welfare along the path
    double mean_achieved = 0.0;  // time-average welfare under the refreshed designs
    double gap = 0.0;            // mean_opt - mean_achieved
    int refresh_count = 0;       // redesign events after the initial design
    double delta_v_hat = 0.0;    // empirical per-period optimal-welfare increment
};

GrowthRunResult run_growth_once(const GrowthPath& path, const UtilityModel& m, double delta,
                                double rho, std::uint64_t refresh_seed, const DcrsParams& params);

struct RefreshSweepRow {
    double rho = 0.0;
    double mean_gap = 0.0;
    double mean_welfare = 0.0;
    double stderr_gap = 0.0;
};

// Full refresh-rate sweep: every (rho, seed) pair simulated on the seed's
// common growth path; rows are aggregated over seeds in grid order.
std::vector<RefreshSweepRow> sweep_refresh(const GrowthConfig& cfg, const UtilityModel& m,
                                           double delta, const std::vector<double>& rho_grid,
                                           const std::vector<std::uint64_t>& seeds,
                                           const DcrsParams& params, int workers);

}  // namespace incnet
