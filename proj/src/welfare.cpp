#include "incnet/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace incnet {

std::vector<double> even_split_capped(double total, int k) {
    std::vector<double> out(k, 0.0);
    if (k == 0) return out;
    double remaining = std::max(0.0, total);
    int open = k;
    // At most k passes: each pass either places everything or fills a slot.
    while (remaining > 1e-15 && open > 0) {
        const double share = remaining / open;
        remaining = 0.0;
        open = 0;
        for (int i = 0; i < k; ++i) {
            if (out[i] >= 1.0) continue;
            double v = out[i] + share;
            if (v > 1.0) {
                remaining += v - 1.0;
                v = 1.0;
            }
            out[i] = v;
            if (out[i] < 1.0) ++open;
        }
    }
    return out;
}

double obedient_inbound_sum(const UtilityModel& m, int degree) {
    if (!m.is_sum_form()) throw std::logic_error("obedient_inbound_sum: sum-form model required");
    const double interior = std::sqrt(m.r2) - 1.0;
    return std::min(static_cast<double>(degree), std::max(0.0, interior));
}

namespace {

// Per-agent maximization of b(x) - |x| over the box for a custom benefit:
// projected gradient ascent, finite-difference gradients.
std::vector<double> solve_inbound_custom(const UtilityModel& m, int degree) {
    std::vector<double> x(degree, 0.5);
    constexpr double step = 0.05;
    constexpr double fd = 1e-6;
    constexpr int max_iter = 10000;
    std::vector<double> trial(degree);
    for (int it = 0; it < max_iter; ++it) {
        double max_change = 0.0;
        trial = x;
        for (int k = 0; k < degree; ++k) {
            std::vector<double> hi = x, lo = x;
            hi[k] = std::min(1.0, x[k] + fd);
            lo[k] = std::max(0.0, x[k] - fd);
            const double g = (benefit(m, hi) - benefit(m, lo)) / (hi[k] - lo[k]) - 1.0;
            trial[k] = std::clamp(x[k] + step * g, 0.0, 1.0);
            max_change = std::max(max_change, std::abs(trial[k] - x[k]));
        }
        x.swap(trial);
        if (max_change < 1e-8) break;
    }
    return x;
}

}  // namespace

std::pair<ActionProfile, double> solve_obedient(const Topology& t, const UtilityModel& m) {
    ActionProfile profile = ActionProfile::zeros(t);
    for (int i = 0; i < t.n; ++i) {
        const int deg = t.degree(i);
        if (deg == 0) continue;
        std::vector<double> inbound;
        if (m.is_sum_form()) {
            inbound = even_split_capped(obedient_inbound_sum(m, deg), deg);
        } else {
            inbound = solve_inbound_custom(m, deg);
        }
        for (int k = 0; k < deg; ++k) {
            const int j = t.neighbors[i][k];
            profile.a[j][t.neighbor_index(j, i)] = inbound[k];
        }
    }
    return {profile, social_welfare(t, m, profile)};
}

double social_welfare(const Topology& t, const UtilityModel& m, const ActionProfile& profile) {
    double v = 0.0;
    for (int i = 0; i < t.n; ++i) v += utility(m, t, profile, i);
    return v;
}

double poa_threshold_degree(const UtilityModel& m, double delta) {
    if (!m.is_sum_form()) throw std::logic_error("poa_threshold_degree: sum-form model required");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("poa_threshold_degree: delta in (0,1]");
    auto f = [&](double d) { return delta * m.benefit_from_sum(d) - d; };
    // f(0) = 0 with slope delta*r2 - 1; no positive root unless the slope is positive
    if (delta * m.r2 <= 1.0) return 0.0;
    double lo = 1e-9;
    double hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace incnet
