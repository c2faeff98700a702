#include "incnet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace incnet {

namespace {

// comply iff delta * (E[continuation | comply] - E[continuation | deviate])
// covers the stage cost of the recommended outbound.
bool comply_is_best(int i, int own_rating, double cost, const RatingProtocol& p,
                    const ValueTable& vt, double delta, double eps) {
    if (cost <= 0.0) return true;
    if (delta == 0.0) return false;
    const int K = p.K;
    const int k = own_rating - 1;
    const double alpha = p.alpha[i][k];
    const double beta = p.beta[i][k];
    const double up_c = own_rating < K ? (1.0 - eps) * beta : 0.0;
    const double down_c = own_rating > 1 ? eps * alpha : 0.0;
    const double up_d = own_rating < K ? eps * beta : 0.0;
    const double down_d = own_rating > 1 ? (1.0 - eps) * alpha : 0.0;
    auto expect = [&](double up, double down) {
        double e = vt.value[i][k] * (1.0 - up - down);
        if (k > 0) e += vt.value[i][k - 1] * down;
        if (k + 1 < K) e += vt.value[i][k + 1] * up;
        return e;
    };
    const double differential = expect(up_c, down_c) - expect(up_d, down_d);
    const double weight = vt.average_mode ? 1.0 : delta;
    return weight * differential >= cost - 1e-12;
}

}  // namespace

BehaviorSpec BehaviorSpec::all(int n, Behavior::Kind kind) {
    BehaviorSpec spec;
    spec.agents.assign(n, Behavior{kind, {}});
    return spec;
}

std::vector<double> best_response_action(int i, const std::vector<int>& ratings,
                                         const RatingProtocol& p, const Topology& t,
                                         const UtilityModel& m, double delta, double eps) {
    std::vector<double> rec(t.neighbors[i].size());
    for (std::size_t k = 0; k < t.neighbors[i].size(); ++k)
        rec[k] = p.strategy.get(i, static_cast<int>(k), ratings[t.neighbors[i][k]]);
    const double cost = std::accumulate(rec.begin(), rec.end(), 0.0);
    if (delta == 0.0 || cost <= 0.0) {
        if (delta == 0.0) std::fill(rec.begin(), rec.end(), 0.0);
        return rec;
    }
    const ValueTable vt = value_functions(p, t, m, delta, eps);
    if (!comply_is_best(i, ratings[i], cost, p, vt, delta, eps))
        std::fill(rec.begin(), rec.end(), 0.0);
    return rec;
}

SimResult simulate(const Topology& t, const UtilityModel& m, const RatingProtocol& p,
                   const BehaviorSpec& behavior, const SimParams& params) {
    if (params.horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
    if (static_cast<int>(behavior.agents.size()) != t.n)
        throw std::invalid_argument("simulate: behavior spec size mismatch");
    if (!(params.eps >= 0.0 && params.eps < 1.0))
        throw std::invalid_argument("simulate: eps in [0,1)");

    const int n = t.n;
    const int K = p.K;
    Rng rng(params.seed);

    bool any_best_response = false;
    for (const auto& b : behavior.agents)
        if (b.kind == Behavior::Kind::best_response) any_best_response = true;
    ValueTable vt;
    if (any_best_response && params.delta > 0.0)
        vt = value_functions(p, t, m, params.delta, params.eps);

    std::vector<int> ratings(n, K), next_ratings(n);
    LinkValues actions(n), recommended(n);
    for (int i = 0; i < n; ++i) {
        actions[i].assign(t.neighbors[i].size(), 0.0);
        recommended[i].assign(t.neighbors[i].size(), 0.0);
    }
    std::vector<int> signals(n, 1);

    SimResult res;
    res.avg_utility.assign(n, 0.0);
    res.discounted_utility.assign(n, 0.0);
    res.occupancy.assign(n, std::vector<std::int64_t>(K, 0));
    std::vector<std::vector<std::int64_t>> stationary_counts(n, std::vector<std::int64_t>(K, 0));

    const int burn_in = static_cast<int>(params.horizon * params.burn_in_frac);
    double welfare_total = 0.0;
    double disc = 1.0;

    for (int period = 0; period < params.horizon; ++period) {
        // actions, agent-ascending
        for (int i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < t.neighbors[i].size(); ++k)
                recommended[i][k] = p.strategy.get(i, static_cast<int>(k), ratings[t.neighbors[i][k]]);
            const Behavior& b = behavior.agents[i];
            bool comply = true;
            switch (b.kind) {
                case Behavior::Kind::compliant: break;
                case Behavior::Kind::always_zero: comply = false; break;
                case Behavior::Kind::scripted: comply = b.deviate_periods.count(period) == 0; break;
                case Behavior::Kind::best_response: {
                    const double cost =
                        std::accumulate(recommended[i].begin(), recommended[i].end(), 0.0);
                    comply = params.delta > 0.0 &&
                             comply_is_best(i, ratings[i], cost, p, vt, params.delta, params.eps);
                    break;
                }
            }
            if (comply)
                actions[i] = recommended[i];
            else
                std::fill(actions[i].begin(), actions[i].end(), 0.0);
        }

        // stage utilities
        double period_welfare = 0.0;
        for (int i = 0; i < n; ++i) {
            std::vector<double> inbound(t.neighbors[i].size());
            for (std::size_t k = 0; k < t.neighbors[i].size(); ++k) {
                const int j = t.neighbors[i][k];
                inbound[k] = actions[j][t.neighbor_index(j, i)];
            }
            const double u =
                benefit(m, inbound) - std::accumulate(actions[i].begin(), actions[i].end(), 0.0);
            res.avg_utility[i] += u;
            res.discounted_utility[i] += disc * u;
            period_welfare += u;
            if (params.record_trace) {
                res.trace.push_back({period, i, ratings[i],
                                     std::accumulate(actions[i].begin(), actions[i].end(), 0.0), u});
            }
        }
        welfare_total += period_welfare;
        disc *= params.delta;

        // signals, agent-ascending: one flip draw per agent
        for (int i = 0; i < n; ++i) {
            const bool followed = actions[i] == recommended[i];
            const bool flip = rng.uniform() < params.eps;
            signals[i] = (followed != flip) ? 1 : 0;
        }

        // rating updates, agent-ascending: one draw per agent
        for (int i = 0; i < n; ++i) {
            res.occupancy[i][ratings[i] - 1]++;
            if (period >= burn_in) stationary_counts[i][ratings[i] - 1]++;
            next_ratings[i] = rating_transition(ratings[i], signals[i], p, i, rng);
        }
        ratings.swap(next_ratings);
    }

    res.time_avg_welfare = welfare_total / params.horizon;
    for (int i = 0; i < n; ++i) res.avg_utility[i] /= params.horizon;
    res.stationary_occupancy.assign(n, std::vector<double>(K, 0.0));
    const double denom = std::max(1, params.horizon - burn_in);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < K; ++k)
            res.stationary_occupancy[i][k] = static_cast<double>(stationary_counts[i][k]) / denom;
    return res;
}

}  // namespace incnet
