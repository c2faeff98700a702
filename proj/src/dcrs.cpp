#include "incnet/dcrs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "incnet/welfare.hpp"

namespace incnet {

StrategyTable StrategyTable::from_top(const Topology& t, const LinkValues& top, int K) {
    StrategyTable st;
    st.K = K;
    st.sigma.resize(t.n);
    for (int i = 0; i < t.n; ++i) {
        st.sigma[i].resize(t.neighbors[i].size());
        for (std::size_t k = 0; k < t.neighbors[i].size(); ++k) {
            st.sigma[i][k].assign(K, 0.0);
            st.sigma[i][k][K - 1] = top[i][k];
        }
    }
    return st;
}

LinkValues StrategyTable::level(int theta) const {
    LinkValues out(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        out[i].resize(sigma[i].size());
        for (std::size_t k = 0; k < sigma[i].size(); ++k) out[i][k] = sigma[i][k][theta - 1];
    }
    return out;
}

bool StrategyTable::monotone() const {
    for (const auto& row : sigma)
        for (const auto& levels : row)
            for (std::size_t th = 1; th < levels.size(); ++th)
                if (levels[th] < levels[th - 1]) return false;
    return true;
}

namespace {

// Water-filling for the sum-form subproblem: sweep price groups in
// ascending order, fill each group until the weighted marginal benefit
// drops to the group price or the group's unit caps bind.
void waterfill_sum_form(const UtilityModel& m, double weight,
                        const std::vector<double>& neighbor_lambda, std::vector<double>& out,
                        std::vector<int>& order) {
    const int deg = static_cast<int>(neighbor_lambda.size());
    out.assign(deg, 0.0);
    if (deg == 0) return;
    order.resize(deg);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return neighbor_lambda[a] < neighbor_lambda[b];
    });

    double s = 0.0;
    int g = 0;
    while (g < deg) {
        const double price = 1.0 + neighbor_lambda[order[g]];
        int h = g;
        while (h < deg && neighbor_lambda[order[h]] == neighbor_lambda[order[g]]) ++h;
        const int count = h - g;
        // target sum where weight * b'(s) = price
        const double s_target = std::sqrt(weight * m.r2 / price) - 1.0;
        if (s_target <= s) break;
        const double alloc = std::min(s_target - s, static_cast<double>(count));
        const double share = alloc / count;  // even split, under the unit cap by construction
        for (int k = 0; k < count; ++k) out[order[g + k]] = share;
        s += alloc;
        if (alloc < static_cast<double>(count)) break;  // interior stop inside this group
        g = h;
    }
}

void subproblem_custom(const UtilityModel& m, double weight,
                       const std::vector<double>& neighbor_lambda, std::vector<double>& x) {
    const int deg = static_cast<int>(neighbor_lambda.size());
    x.assign(deg, 0.5);
    constexpr double step = 0.05;
    constexpr double fd = 1e-6;
    std::vector<double> hi(deg), lo(deg), next(deg);
    for (int it = 0; it < 10000; ++it) {
        double max_change = 0.0;
        for (int k = 0; k < deg; ++k) {
            hi = x;
            lo = x;
            hi[k] = std::min(1.0, x[k] + fd);
            lo[k] = std::max(0.0, x[k] - fd);
            const double g =
                weight * (benefit(m, hi) - benefit(m, lo)) / (hi[k] - lo[k]) - (1.0 + neighbor_lambda[k]);
            next[k] = std::clamp(x[k] + step * g, 0.0, 1.0);
            max_change = std::max(max_change, std::abs(next[k] - x[k]));
        }
        x = next;
        if (max_change < 1e-10) break;
    }
}

struct RoundBuffers {
    std::vector<std::vector<double>> inbound;   // sigma_hat per agent
    std::vector<std::vector<double>> outbound;  // assembled sigma per agent
    std::vector<std::vector<double>> nbr_lambda;
    std::vector<std::vector<int>> nbr_backref;  // index of i inside neighbor j's list
    std::vector<int> scratch_order;

    RoundBuffers(const Topology& t) {
        inbound.resize(t.n);
        outbound.resize(t.n);
        nbr_lambda.resize(t.n);
        nbr_backref.resize(t.n);
        for (int i = 0; i < t.n; ++i) {
            const auto sz = t.neighbors[i].size();
            inbound[i].assign(sz, 0.0);
            outbound[i].assign(sz, 0.0);
            nbr_lambda[i].assign(sz, 0.0);
            nbr_backref[i].resize(sz);
            for (std::size_t k = 0; k < sz; ++k)
                nbr_backref[i][k] = t.neighbor_index(t.neighbors[i][k], i);
        }
    }
};

// One synchronous round at fixed multipliers: every agent solves its
// subproblem from its own and its neighbors' lambda only, then outbound
// vectors are assembled from the neighbors' inbound solutions.
void run_round(const Topology& t, const UtilityModel& m, double delta,
               const std::vector<double>& lambda, RoundBuffers& buf) {
    for (int i = 0; i < t.n; ++i) {
        for (std::size_t k = 0; k < t.neighbors[i].size(); ++k)
            buf.nbr_lambda[i][k] = lambda[t.neighbors[i][k]];
        if (m.is_sum_form()) {
            waterfill_sum_form(m, 1.0 + lambda[i] * delta, buf.nbr_lambda[i], buf.inbound[i],
                               buf.scratch_order);
        } else {
            subproblem_custom(m, 1.0 + lambda[i] * delta, buf.nbr_lambda[i], buf.inbound[i]);
        }
    }
    for (int i = 0; i < t.n; ++i)
        for (std::size_t k = 0; k < t.neighbors[i].size(); ++k)
            buf.outbound[i][k] = buf.inbound[t.neighbors[i][k]][buf.nbr_backref[i][k]];
}

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Exact feasibility restoration: scale each violating agent's outbound
// vector until its constraint is tight; repeat because scaling shrinks the
// neighbors' inbound benefits.
void project_feasible(const Topology& t, const UtilityModel& m, double delta, LinkValues& sigma) {
    for (int pass = 0; pass < 10000; ++pass) {
        const std::vector<double> slack = incentive_slacks(t, m, sigma, delta);
        bool violated = false;
        for (int i = 0; i < t.n; ++i) {
            if (slack[i] >= -1e-12) continue;
            const double out = sum_of(sigma[i]);
            if (out <= 0.0) continue;
            const double factor = std::max(0.0, (slack[i] + out) / out);  // delta*b / |sigma|
            for (double& v : sigma[i]) v *= factor;
            violated = true;
        }
        if (!violated) return;
    }
}

}  // namespace

std::vector<double> solve_subproblem(const UtilityModel& m, double lambda_i,
                                     const std::vector<double>& neighbor_lambda, double delta) {
    std::vector<double> out;
    std::vector<int> order;
    if (m.is_sum_form())
        waterfill_sum_form(m, 1.0 + lambda_i * delta, neighbor_lambda, out, order);
    else
        subproblem_custom(m, 1.0 + lambda_i * delta, neighbor_lambda, out);
    return out;
}

double update_multiplier(double lambda_i, double outbound_norm, double benefit_i, double w,
                         double delta) {
    return std::max(0.0, lambda_i + w * (outbound_norm - delta * benefit_i));
}

// The constant-step subgradient iteration converges pointwise on smooth
// stretches of the dual, but at kinks (price ties flip the winner-take-all
// allocation discontinuously) it enters limit cycles whose amplitude never
// drops below the stopping tolerance. Cycling agents show near-zero net
// multiplier movement against gross movement that no longer decays; on that
// signature the iteration switches to ergodic primal averaging, the
// standard primal recovery for dual subgradient methods: the averaged
// iterate is returned once it stabilizes (or after exactly one period when
// the cycle is exactly periodic).
DcrsResult run_dcrs(const Topology& t, const UtilityModel& m, const DcrsParams& params,
                    const std::vector<double>& warm_start) {
    if (!(params.delta >= 0.0 && params.delta <= 1.0))
        throw std::invalid_argument("dcrs: delta must be in [0,1]");
    if (!(params.w > 0.0)) throw std::invalid_argument("dcrs: step size must be positive");
    if (!(params.eps_lambda > 0.0)) throw std::invalid_argument("dcrs: eps_lambda must be positive");

    DcrsResult result;
    result.state.lambda.assign(t.n, 0.0);
    for (std::size_t i = 0; i < warm_start.size() && i < result.state.lambda.size(); ++i)
        result.state.lambda[i] = std::max(0.0, warm_start[i]);

    result.sigma.resize(t.n);
    for (int i = 0; i < t.n; ++i) result.sigma[i].assign(t.neighbors[i].size(), 0.0);
    if (t.edge_count() == 0) {
        result.state.converged = true;
        return result;
    }

    RoundBuffers buf(t);
    std::vector<double>& lambda = result.state.lambda;
    std::vector<double> next_lambda(t.n, 0.0);

    constexpr int kSegment = 200;
    constexpr int kCycleLookback = 128;

    enum class Phase { normal, averaging, cycle_capture };
    Phase phase = Phase::normal;
    bool use_average = false;

    std::vector<double> seg_net(t.n, 0.0), seg_gross(t.n, 0.0);
    int seg_count = 0;
    double prev_gross_total = -1.0;  // <0 marks "no comparable previous segment"
    auto reset_segment = [&] {
        std::fill(seg_net.begin(), seg_net.end(), 0.0);
        std::fill(seg_gross.begin(), seg_gross.end(), 0.0);
        seg_count = 0;
    };

    LinkValues avg_sigma = result.sigma;
    double prev_welfare = 0.0;
    bool have_prev_welfare = false;
    std::vector<double> avg_lambda(t.n, 0.0);
    long avg_count = 0;
    int capture_left = 0;
    std::deque<std::vector<double>> lambda_history;

    for (int q = 0; q < params.max_iter; ++q) {
        run_round(t, m, params.delta, lambda, buf);
        double max_change = 0.0;
        for (int i = 0; i < t.n; ++i) {
            const double out_norm = sum_of(buf.outbound[i]);
            const double ben = benefit(m, buf.inbound[i]);
            next_lambda[i] = update_multiplier(lambda[i], out_norm, ben, params.w, params.delta);
            const double change = next_lambda[i] - lambda[i];
            max_change = std::max(max_change, std::abs(change));
            seg_net[i] += change;
            seg_gross[i] += std::abs(change);
        }
        ++seg_count;
        if (params.record_trace) {
            DcrsTracePoint pt;
            pt.iteration = q;
            pt.lambda = lambda;
            pt.slack.resize(t.n);
            for (int i = 0; i < t.n; ++i)
                pt.slack[i] = params.delta * benefit(m, buf.inbound[i]) - sum_of(buf.outbound[i]);
            result.state.trace.push_back(std::move(pt));
        }

        if (phase != Phase::normal) {
            for (int i = 0; i < t.n; ++i) {
                avg_lambda[i] += lambda[i];
                for (std::size_t k = 0; k < buf.outbound[i].size(); ++k)
                    avg_sigma[i][k] += buf.outbound[i][k];
            }
            ++avg_count;
        }

        result.state.iterations = q + 1;

        if (phase == Phase::cycle_capture) {
            lambda.swap(next_lambda);
            if (--capture_left == 0) {
                use_average = true;
                result.state.converged = true;
                break;
            }
            continue;
        }

        if (max_change < params.eps_lambda) {
            result.state.converged = true;
            lambda.swap(next_lambda);
            break;
        }

        if (phase == Phase::averaging) {
            // exact limit cycles are common: averaging over one full period
            // gives the cycle mean with no partial-period error
            int period = 0;
            for (std::size_t back = 0; back < lambda_history.size(); ++back) {
                if (lambda_history[back] == lambda) {
                    period = static_cast<int>(back) + 1;
                    break;
                }
            }
            if (period > 0) {
                phase = Phase::cycle_capture;
                capture_left = period;
                avg_count = 0;
                for (int i = 0; i < t.n; ++i) {
                    avg_lambda[i] = 0.0;
                    std::fill(avg_sigma[i].begin(), avg_sigma[i].end(), 0.0);
                }
            } else {
                lambda_history.push_front(lambda);
                if (lambda_history.size() > kCycleLookback) lambda_history.pop_back();
            }
        }

        lambda.swap(next_lambda);

        if (seg_count == kSegment) {
            if (phase == Phase::normal) {
                bool cycling_signature = false;
                double gross_total = 0.0;
                for (int i = 0; i < t.n; ++i) {
                    gross_total += seg_gross[i];
                    if (seg_gross[i] / kSegment > params.eps_lambda &&
                        std::abs(seg_net[i]) < 0.5 * seg_gross[i])
                        cycling_signature = true;
                }
                // a damped spiral also alternates direction but its movement
                // decays segment over segment; a limit cycle does not
                if (cycling_signature && prev_gross_total >= 0.0 &&
                    gross_total >= 0.9 * prev_gross_total) {
                    phase = Phase::averaging;
                    lambda_history.clear();
                    avg_count = 0;
                    have_prev_welfare = false;
                } else {
                    prev_gross_total = gross_total;
                }
            } else if (phase == Phase::averaging && avg_count >= kSegment) {
                // the averaged strategy mixes cycle states at 1/N, so its raw
                // entries settle slowly; what matters (and settles fast) is
                // the welfare of the feasible candidate
                LinkValues snapshot = avg_sigma;
                for (auto& row : snapshot)
                    for (double& v : row) v /= avg_count;
                project_feasible(t, m, params.delta, snapshot);
                ActionProfile cand;
                cand.a = std::move(snapshot);
                const double welfare = social_welfare(t, m, cand);
                if (have_prev_welfare &&
                    std::abs(welfare - prev_welfare) <
                        params.eps_primal * std::max(1.0, std::abs(welfare))) {
                    use_average = true;
                    result.state.converged = true;
                }
                if (avg_count >= 100000) {
                    use_average = true;  // ergodic budget reached, accept the average
                    result.state.converged = true;
                }
                prev_welfare = welfare;
                have_prev_welfare = true;
            }
            reset_segment();
            if (result.state.converged) break;
        }
    }
    if (!result.state.converged) {
        std::ostringstream os;
        os << "dcrs: multipliers did not settle within " << params.max_iter << " rounds";
        throw DcrsNonConvergence(os.str(), result.state);
    }

    if (use_average && avg_count > 0) {
        result.sigma = avg_sigma;
        for (auto& row : result.sigma)
            for (double& v : row) v /= avg_count;
        for (int i = 0; i < t.n; ++i) lambda[i] = avg_lambda[i] / avg_count;
    } else {
        run_round(t, m, params.delta, lambda, buf);
        result.sigma = buf.outbound;
    }
    project_feasible(t, m, params.delta, result.sigma);

    ActionProfile profile;
    profile.a = result.sigma;
    result.v_star = social_welfare(t, m, profile);
    return result;
}

std::vector<double> incentive_slacks(const Topology& t, const UtilityModel& m,
                                     const LinkValues& sigma_top, double delta) {
    std::vector<double> slack(t.n, 0.0);
    for (int i = 0; i < t.n; ++i) {
        std::vector<double> inbound(t.neighbors[i].size());
        for (std::size_t k = 0; k < t.neighbors[i].size(); ++k) {
            const int j = t.neighbors[i][k];
            inbound[k] = sigma_top[j][t.neighbor_index(j, i)];
        }
        slack[i] = delta * benefit(m, inbound) - sum_of(sigma_top[i]);
    }
    return slack;
}

bool check_incentive_feasibility(const Topology& t, const UtilityModel& m,
                                 const LinkValues& sigma_top, double delta, double tol) {
    for (double s : incentive_slacks(t, m, sigma_top, delta))
        if (s < -tol) return false;
    return true;
}

double dcrs_dual_value(const Topology& t, const UtilityModel& m, const std::vector<double>& lambda,
                       double delta) {
    double g = 0.0;
    for (int i = 0; i < t.n; ++i) {
        std::vector<double> nbr_lambda(t.neighbors[i].size());
        for (std::size_t k = 0; k < t.neighbors[i].size(); ++k)
            nbr_lambda[k] = lambda[t.neighbors[i][k]];
        const std::vector<double> x = solve_subproblem(m, lambda[i], nbr_lambda, delta);
        double value = (1.0 + lambda[i] * delta) * benefit(m, x);
        for (std::size_t k = 0; k < x.size(); ++k) value -= (1.0 + nbr_lambda[k]) * x[k];
        g += value;
    }
    return g;
}

}  // namespace incnet
