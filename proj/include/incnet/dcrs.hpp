#pragma once

#include <stdexcept>
#include <vector>

#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"

namespace incnet {

// Directed link values indexed [agent][neighbor index]; when used as the
// recommended strategy it is the top-rating slice sigma(K), with the same
// layout as ActionProfile::a.
using LinkValues = std::vector<std::vector<double>>;

// Recommended strategy for every rating level: sigma[i][k][theta-1] is the
// action of agent i toward its k-th neighbor when that neighbor's rating is
// theta. Monotone non-decreasing in theta.
struct StrategyTable {
    int K = 2;
    std::vector<std::vector<std::vector<double>>> sigma;

    static StrategyTable from_top(const Topology& t, const LinkValues& top, int K = 2);
    double get(int i, int nbr_idx, int theta) const { return sigma[i][nbr_idx][theta - 1]; }
    LinkValues level(int theta) const;
    bool monotone() const;
};

struct DcrsParams {
    double delta = 1.0;
    double w = 0.01;            // subgradient step size
    double eps_lambda = 1e-6;   // stop when max per-agent lambda change drops below
    double eps_primal = 1e-6;   // stability tolerance of the averaged strategy (cycling fallback)
    int max_iter = 100000;
    bool record_trace = false;
};

struct DcrsTracePoint {
    int iteration;
    std::vector<double> lambda;  // multipliers used this round
    std::vector<double> slack;   // delta*b_i(inbound) - |outbound|_1 per agent
};

struct DcrsState {
    std::vector<double> lambda;
    int iterations = 0;
    bool converged = false;
    std::vector<DcrsTracePoint> trace;
};

struct DcrsResult {
    LinkValues sigma;  // strategy at the top rating
    DcrsState state;
    double v_star = 0.0;
};

class DcrsNonConvergence : public std::runtime_error {
public:
    DcrsNonConvergence(std::string msg, DcrsState state)
        : std::runtime_error(std::move(msg)), state(std::move(state)) {}
    DcrsState state;
};

// Lower-level subproblem: choose the inbound vector of agent i that
// maximizes (1 + lambda_i*delta) * b_i(inbound) - sum_j (1+lambda_j) * x_j,
// per-link box [0,1]. neighbor_lambda is aligned with i's neighbor list.
// For the sum form this is price-ordered water-filling with even splits
// among tied prices.
std::vector<double> solve_subproblem(const UtilityModel& m, double lambda_i,
                                     const std::vector<double>& neighbor_lambda, double delta);

// Subgradient step of the master dual problem, projected onto lambda >= 0.
double update_multiplier(double lambda_i, double outbound_norm, double benefit_i, double w,
                         double delta);

// Synchronous-round distributed computation of the recommended strategy.
// Throws DcrsNonConvergence when max_iter rounds do not settle the
// multipliers. warm_start (optional) seeds the multipliers, entries beyond
// its size start at zero.
DcrsResult run_dcrs(const Topology& t, const UtilityModel& m, const DcrsParams& params,
                    const std::vector<double>& warm_start = {});

// Per-agent slack of the equilibrium-existence condition:
// delta * b_i(inbound) - |outbound|_1. All slacks >= 0 (numerically
// >= -1e-6) iff an equilibrium rating protocol exists for this strategy.
std::vector<double> incentive_slacks(const Topology& t, const UtilityModel& m,
                                     const LinkValues& sigma_top, double delta);

bool check_incentive_feasibility(const Topology& t, const UtilityModel& m,
                                 const LinkValues& sigma_top, double delta, double tol = 1e-6);

// Dual objective g(lambda): sum of subproblem optima. Used by diagnostics
// and tests (duality-gap and dual-descent checks).
double dcrs_dual_value(const Topology& t, const UtilityModel& m,
                       const std::vector<double>& lambda, double delta);

}  // namespace incnet
