#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "incnet/dcrs.hpp"
#include "incnet/rng.hpp"
#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"

namespace incnet {

// Rating protocol: ordered rating set {1..K}, recommended strategy per
// rating level, and per-agent per-rating update probabilities. alpha is the
// demotion probability on a bad signal, beta the promotion probability on a
// good one. Immutable once designed.
struct RatingProtocol {
    int K = 2;
    StrategyTable strategy;
    std::vector<std::vector<double>> alpha;  // [agent][rating-1]
    std::vector<std::vector<double>> beta;   // [agent][rating-1]

    int n_agents() const { return static_cast<int>(alpha.size()); }
    std::string to_json() const;
    static RatingProtocol from_json(const std::string& text);
};

class InfeasibleDesign : public std::runtime_error {
public:
    InfeasibleDesign(std::string msg, std::vector<double> slacks)
        : std::runtime_error(std::move(msg)), slacks(std::move(slacks)) {}
    std::vector<double> slacks;
};

// Optimal binary protocol for a feasible top-rating strategy: sigma(1)=0,
// beta_{i,1}=1 and alpha_{i,2} = |sigma_i|_1 / (delta * b_i(inbound)).
// Throws InfeasibleDesign (with the per-agent slack report) if the strategy
// violates the equilibrium-existence condition.
RatingProtocol design_binary_protocol(const Topology& t, const UtilityModel& m,
                                      const LinkValues& sigma_top, double delta);

// Constructive binary protocol from the existence proof: certain demotion on
// a bad signal (alpha=1) and certain promotion on a good one (beta=1).
RatingProtocol construct_appendix_protocol(const Topology& t, const UtilityModel& m,
                                           const LinkValues& sigma_top, double delta);

struct UpdateBounds {
    double beta_min = 0.0;
    double sigma_norm = 0.0;
    double benefit_value = 0.0;
    double delta = 1.0;
    // smallest feasible alpha at a given beta >= beta_min
    double alpha_min(double beta) const;
};

// Feasible binary update probabilities for agent i given the top strategy.
// Throws when b_i <= |sigma_i| (no feasible binary protocol).
UpdateBounds feasible_update_bounds(int i, const Topology& t, const UtilityModel& m,
                                    const LinkValues& sigma_top, double delta);

// One rating update per the protocol's probabilistic rule; consumes exactly
// one uniform draw.
int rating_transition(int theta, int signal, const RatingProtocol& p, int agent, Rng& rng);

// Stationary share of time a compliant agent spends at the high rating of
// the binary chain under monitoring error eps.
double stationary_high_fraction(double alpha, double beta, double eps);

// Compliant continuation values per agent and rating, all neighbors held at
// the top rating. For delta < 1 these are discounted values; for delta = 1
// they are relative (bias) values of the long-run-average chain, with the
// per-agent average rate reported alongside.
struct ValueTable {
    bool average_mode = false;
    std::vector<std::vector<double>> value;  // [agent][rating-1]
    std::vector<double> avg_rate;            // per agent, average mode only
    bool monotone() const;
};

ValueTable value_functions(const RatingProtocol& p, const Topology& t, const UtilityModel& m,
                           double delta, double eps);

// Best one-shot deviation gain (deviating to the zero action) per agent and
// rating, neighbors at the top rating. The protocol admits an equilibrium
// iff every gain is <= 0 (numerically <= 1e-9).
struct DeviationGains {
    std::vector<std::vector<double>> gain;  // [agent][rating-1]
    double max_gain() const;
    bool is_ppe(double tol = 1e-9) const { return max_gain() <= tol; }
};

DeviationGains ppe_one_shot_check(const RatingProtocol& p, const Topology& t,
                                  const UtilityModel& m, double delta, double eps);

}  // namespace incnet
