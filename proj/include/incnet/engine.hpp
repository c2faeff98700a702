#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "incnet/protocol.hpp"
#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"

namespace incnet {

// Per-agent behavior in the simulated repeated game. Scripted agents comply
// except in the listed periods, where they play the zero action.
struct Behavior {
    enum class Kind { compliant, always_zero, best_response, scripted };
    Kind kind = Kind::compliant;
    std::set<int> deviate_periods;
};

struct BehaviorSpec {
    std::vector<Behavior> agents;
    static BehaviorSpec all(int n, Behavior::Kind kind);
};

struct SimParams {
    int horizon = 1000;
    double eps = 0.0;            // monitoring error
    double delta = 1.0;          // used by best-response agents and discounting
    std::uint64_t seed = 0;
    double burn_in_frac = 0.1;   // excluded from the stationary occupancy report
    bool record_trace = false;
};

struct SimTraceRow {
    int period;
    int agent;
    int rating;
    double action_sum;
    double utility;
};

struct SimResult {
    double time_avg_welfare = 0.0;
    std::vector<double> avg_utility;                       // per agent
    std::vector<double> discounted_utility;                // per agent, sum delta^t u
    std::vector<std::vector<std::int64_t>> occupancy;      // [agent][rating-1], all periods
    std::vector<std::vector<double>> stationary_occupancy; // fractions, burn-in excluded
    std::vector<SimTraceRow> trace;
};

// Runs the repeated game for `horizon` periods: actions per behavior given
// current ratings, binary compliance signals flipped with probability eps,
// ratings updated per the protocol. Deterministic given the seed; per
// period the RNG is consumed agent-ascending for signals, then
// agent-ascending for rating transitions.
SimResult simulate(const Topology& t, const UtilityModel& m, const RatingProtocol& p,
                   const BehaviorSpec& behavior, const SimParams& params);

// Lemma-style best response: the zero vector or full compliance, chosen by
// comparing continuation values (all other agents assumed compliant).
std::vector<double> best_response_action(int i, const std::vector<int>& ratings,
                                         const RatingProtocol& p, const Topology& t,
                                         const UtilityModel& m, double delta, double eps);

}  // namespace incnet
