#include "incnet/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace incnet {

namespace {

using json = nlohmann::json;

// Gaussian elimination with partial pivoting; fine for the tiny per-agent
// rating chains handled here.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-14)
            throw std::domain_error("rating chain: singular value system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Per-agent compliant stage data with all neighbors fixed at the top rating.
struct AgentChain {
    std::vector<double> u_comp;   // stage utility complying, by own rating
    std::vector<double> u_dev;    // stage utility deviating to zero
    std::vector<double> up_c, down_c;  // compliant transition probs
    std::vector<double> up_d, down_d;  // deviating transition probs
};

AgentChain build_chain(const RatingProtocol& p, const Topology& t, const UtilityModel& m, int i,
                       double eps) {
    const int K = p.K;
    AgentChain ch;
    ch.u_comp.resize(K);
    ch.u_dev.resize(K);
    ch.up_c.assign(K, 0.0);
    ch.down_c.assign(K, 0.0);
    ch.up_d.assign(K, 0.0);
    ch.down_d.assign(K, 0.0);

    double cost_out = 0.0;  // outbound toward neighbors at the top rating
    for (std::size_t k = 0; k < t.neighbors[i].size(); ++k)
        cost_out += p.strategy.get(i, static_cast<int>(k), K);

    for (int theta = 1; theta <= K; ++theta) {
        std::vector<double> inbound(t.neighbors[i].size());
        for (std::size_t k = 0; k < t.neighbors[i].size(); ++k) {
            const int j = t.neighbors[i][k];
            inbound[k] = p.strategy.get(j, t.neighbor_index(j, i), theta);
        }
        const double b = benefit(m, inbound);
        ch.u_comp[theta - 1] = b - cost_out;
        ch.u_dev[theta - 1] = b;
        const double alpha = p.alpha[i][theta - 1];
        const double beta = p.beta[i][theta - 1];
        if (theta > 1) {
            ch.down_c[theta - 1] = eps * alpha;
            ch.down_d[theta - 1] = (1.0 - eps) * alpha;
        }
        if (theta < K) {
            ch.up_c[theta - 1] = (1.0 - eps) * beta;
            ch.up_d[theta - 1] = eps * beta;
        }
    }
    return ch;
}

std::vector<double> discounted_values(const AgentChain& ch, double delta) {
    const int K = static_cast<int>(ch.u_comp.size());
    std::vector<std::vector<double>> a(K, std::vector<double>(K, 0.0));
    for (int k = 0; k < K; ++k) {
        const double stay = 1.0 - ch.up_c[k] - ch.down_c[k];
        a[k][k] = 1.0 - delta * stay;
        if (k > 0) a[k][k - 1] = -delta * ch.down_c[k];
        if (k + 1 < K) a[k][k + 1] = -delta * ch.up_c[k];
    }
    return solve_dense(std::move(a), ch.u_comp);
}

// Long-run average rate and relative values (bias, pinned at the top
// rating) of the compliant chain.
std::pair<double, std::vector<double>> average_values(const AgentChain& ch) {
    const int K = static_cast<int>(ch.u_comp.size());
    // stationary distribution by power iteration from the top rating
    std::vector<double> pi(K, 0.0), next(K, 0.0);
    pi[K - 1] = 1.0;
    for (int it = 0; it < 200000; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int k = 0; k < K; ++k) {
            const double stay = 1.0 - ch.up_c[k] - ch.down_c[k];
            next[k] += pi[k] * stay;
            if (k > 0) next[k - 1] += pi[k] * ch.down_c[k];
            if (k + 1 < K) next[k + 1] += pi[k] * ch.up_c[k];
        }
        double diff = 0.0;
        for (int k = 0; k < K; ++k) diff = std::max(diff, std::abs(next[k] - pi[k]));
        pi.swap(next);
        if (diff < 1e-15) break;
    }
    double rate = 0.0;
    for (int k = 0; k < K; ++k) rate += pi[k] * ch.u_comp[k];

    // (I - P) h = u - rate, with h at the top rating pinned to zero
    std::vector<std::vector<double>> a(K, std::vector<double>(K, 0.0));
    std::vector<double> rhs(K, 0.0);
    for (int k = 0; k + 1 < K; ++k) {
        const double stay = 1.0 - ch.up_c[k] - ch.down_c[k];
        a[k][k] = 1.0 - stay;
        if (k > 0) a[k][k - 1] = -ch.down_c[k];
        if (k + 1 < K) a[k][k + 1] = -ch.up_c[k];
        rhs[k] = ch.u_comp[k] - rate;
    }
    a[K - 1][K - 1] = 1.0;
    rhs[K - 1] = 0.0;
    return {rate, solve_dense(std::move(a), std::move(rhs))};
}

void require_probabilities(const RatingProtocol& p) {
    for (const auto& row : p.alpha)
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("protocol: alpha outside [0,1]");
    for (const auto& row : p.beta)
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("protocol: beta outside [0,1]");
}

RatingProtocol binary_from_strategy(const Topology& t, const UtilityModel& m,
                                    const LinkValues& sigma_top, double delta, bool appendix_alpha) {
    const std::vector<double> slacks = incentive_slacks(t, m, sigma_top, delta);
    for (double s : slacks)
        if (s < -1e-6) {
            throw InfeasibleDesign(
                "protocol design rejected: strategy violates the equilibrium-existence condition",
                slacks);
        }

    RatingProtocol p;
    p.K = 2;
    p.strategy = StrategyTable::from_top(t, sigma_top, 2);
    p.alpha.assign(t.n, {0.0, 0.0});
    p.beta.assign(t.n, {1.0, 1.0});
    for (int i = 0; i < t.n; ++i) {
        const double out = std::accumulate(sigma_top[i].begin(), sigma_top[i].end(), 0.0);
        if (appendix_alpha) {
            p.alpha[i][1] = 1.0;
        } else if (out <= 0.0) {
            p.alpha[i][1] = 0.0;  // nothing recommended, never demoted
        } else {
            const double discounted_benefit = out + slacks[i];  // delta * b_i
            p.alpha[i][1] =
                discounted_benefit <= 0.0 ? 1.0 : std::min(1.0, out / discounted_benefit);
        }
    }
    return p;
}

}  // namespace

std::string RatingProtocol::to_json() const {
    json j;
    j["K"] = K;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["strategy"] = strategy.sigma;
    return j.dump(2);
}

RatingProtocol RatingProtocol::from_json(const std::string& text) {
    const json j = json::parse(text);
    RatingProtocol p;
    p.K = j.at("K").get<int>();
    p.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
    p.beta = j.at("beta").get<std::vector<std::vector<double>>>();
    p.strategy.K = p.K;
    p.strategy.sigma = j.at("strategy").get<std::vector<std::vector<std::vector<double>>>>();
    require_probabilities(p);
    if (!p.strategy.monotone())
        throw std::invalid_argument("protocol: strategy not monotone in rating");
    return p;
}

RatingProtocol design_binary_protocol(const Topology& t, const UtilityModel& m,
                                      const LinkValues& sigma_top, double delta) {
    return binary_from_strategy(t, m, sigma_top, delta, false);
}

RatingProtocol construct_appendix_protocol(const Topology& t, const UtilityModel& m,
                                           const LinkValues& sigma_top, double delta) {
    return binary_from_strategy(t, m, sigma_top, delta, true);
}

double UpdateBounds::alpha_min(double beta) const {
    if (benefit_value <= 0.0) return 0.0;
    return (1.0 - delta * (1.0 - beta)) / delta * sigma_norm / benefit_value;
}

UpdateBounds feasible_update_bounds(int i, const Topology& t, const UtilityModel& m,
                                    const LinkValues& sigma_top, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("feasible_update_bounds: delta in (0,1]");
    UpdateBounds b;
    b.delta = delta;
    b.sigma_norm = std::accumulate(sigma_top[i].begin(), sigma_top[i].end(), 0.0);
    std::vector<double> inbound(t.neighbors[i].size());
    for (std::size_t k = 0; k < t.neighbors[i].size(); ++k) {
        const int j = t.neighbors[i][k];
        inbound[k] = sigma_top[j][t.neighbor_index(j, i)];
    }
    b.benefit_value = benefit(m, inbound);
    if (b.sigma_norm == 0.0) {
        b.beta_min = 0.0;
        return b;
    }
    if (b.benefit_value <= b.sigma_norm)
        throw std::domain_error("feasible_update_bounds: benefit does not exceed sharing cost");
    b.beta_min =
        delta == 1.0 ? 0.0 : (1.0 - delta) / delta * b.sigma_norm / (b.benefit_value - b.sigma_norm);
    return b;
}

int rating_transition(int theta, int signal, const RatingProtocol& p, int agent, Rng& rng) {
    if (theta < 1 || theta > p.K) throw std::out_of_range("rating_transition: rating outside set");
    const double u = rng.uniform();
    if (signal == 0) {
        if (u < p.alpha[agent][theta - 1]) return std::max(1, theta - 1);
        return theta;
    }
    if (u < p.beta[agent][theta - 1]) return std::min(p.K, theta + 1);
    return theta;
}

double stationary_high_fraction(double alpha, double beta, double eps) {
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("stationary_high_fraction: eps in [0,1)");
    if (eps == 0.0) return 1.0;
    const double den = eps * alpha + (1.0 - eps) * beta;
    if (den == 0.0)
        throw std::domain_error("stationary_high_fraction: chain never moves, fraction undefined");
    return (1.0 - eps) * beta / den;
}

bool ValueTable::monotone() const {
    for (const auto& row : value)
        for (std::size_t k = 1; k < row.size(); ++k)
            if (row[k] < row[k - 1] - 1e-9) return false;
    return true;
}

ValueTable value_functions(const RatingProtocol& p, const Topology& t, const UtilityModel& m,
                           double delta, double eps) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("value_functions: delta in (0,1]");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("value_functions: eps in [0,1)");
    ValueTable vt;
    vt.average_mode = delta == 1.0;
    vt.value.resize(t.n);
    if (vt.average_mode) vt.avg_rate.resize(t.n);
    for (int i = 0; i < t.n; ++i) {
        const AgentChain ch = build_chain(p, t, m, i, eps);
        if (vt.average_mode) {
            auto [rate, bias] = average_values(ch);
            vt.avg_rate[i] = rate;
            vt.value[i] = std::move(bias);
        } else {
            vt.value[i] = discounted_values(ch, delta);
        }
    }
    return vt;
}

double DeviationGains::max_gain() const {
    double g = -std::numeric_limits<double>::infinity();
    for (const auto& row : gain)
        for (double v : row) g = std::max(g, v);
    return g;
}

DeviationGains ppe_one_shot_check(const RatingProtocol& p, const Topology& t,
                                  const UtilityModel& m, double delta, double eps) {
    const ValueTable vt = value_functions(p, t, m, delta, eps);
    DeviationGains dg;
    dg.gain.resize(t.n);
    for (int i = 0; i < t.n; ++i) {
        const AgentChain ch = build_chain(p, t, m, i, eps);
        const int K = p.K;
        dg.gain[i].resize(K);
        for (int k = 0; k < K; ++k) {
            auto expect = [&](const std::vector<double>& up, const std::vector<double>& down) {
                double e = vt.value[i][k] * (1.0 - up[k] - down[k]);
                if (k > 0) e += vt.value[i][k - 1] * down[k];
                if (k + 1 < K) e += vt.value[i][k + 1] * up[k];
                return e;
            };
            const double cont_dev = expect(ch.up_d, ch.down_d);
            if (vt.average_mode) {
                const double cont_comp = expect(ch.up_c, ch.down_c);
                dg.gain[i][k] = (ch.u_dev[k] + cont_dev) - (ch.u_comp[k] + cont_comp);
            } else {
                dg.gain[i][k] = ch.u_dev[k] + delta * cont_dev - vt.value[i][k];
            }
        }
    }
    return dg;
}

}  // namespace incnet
