#pragma once

#include <optional>
#include <vector>

#include "incnet/dcrs.hpp"
#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"

namespace incnet {

// Tit-for-Tat cooperation profile: the per-pair cooperate action (the
// punish action is always zero and is not stored).
struct TftProfile {
    LinkValues a_bar;  // [agent][neighbor index], entries in (0,1]
};

// Mirror rule: cooperate in the first period, afterwards repeat whatever
// the neighbor did last period.
double tft_next_action(const TftProfile& profile, const Topology& t, int i, int j,
                       std::optional<double> last_a_ji);

struct TftCheckResult {
    // margin of delta*(b~(a_bar_ji) - b~(0)) - a_bar_ij per directed pair,
    // laid out like the profile
    std::vector<std::vector<double>> margin;
    bool all_pass(double tol = 1e-12) const;
    double min_margin() const;
};

// Bilateral incentive-compatibility of a TFT profile: for every directed
// pair, the discounted marginal benefit of the neighbor's cooperation must
// cover the own cooperate action, all other inbound links held at their
// cooperate values.
TftCheckResult tft_incentive_check(const TftProfile& profile, const Topology& t,
                                   const UtilityModel& m, double delta);

struct SymmetricTftResult {
    double a_star = 0.0;
    double welfare_per_agent = 0.0;
};

// Largest symmetric cooperate action on a d-regular network that passes the
// incentive check, found by descending grid scan plus bisection refinement
// of the binding boundary. Welfare per agent is increasing in the action up
// to the unconstrained optimum, so the largest feasible action is optimal.
SymmetricTftResult best_symmetric_tft(int d, const UtilityModel& m, double delta,
                                      double grid_resolution = 1e-4);

}  // namespace incnet
