#include "incnet/tft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "incnet/welfare.hpp"

namespace incnet {

double tft_next_action(const TftProfile& profile, const Topology& t, int i, int j,
                       std::optional<double> last_a_ji) {
    const int ki = t.neighbor_index(i, j);
    if (ki < 0) throw std::out_of_range("tft: pair not connected");
    if (!last_a_ji.has_value()) return profile.a_bar[i][ki];  // first period: cooperate
    const int kj = t.neighbor_index(j, i);
    return *last_a_ji == profile.a_bar[j][kj] ? profile.a_bar[i][ki] : 0.0;
}

bool TftCheckResult::all_pass(double tol) const {
    for (const auto& row : margin)
        for (double v : row)
            if (v < -tol) return false;
    return true;
}

double TftCheckResult::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : margin)
        for (double v : row) m = std::min(m, v);
    return m;
}

TftCheckResult tft_incentive_check(const TftProfile& profile, const Topology& t,
                                   const UtilityModel& m, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("tft: delta in (0,1]");
    TftCheckResult res;
    res.margin.resize(t.n);
    for (int i = 0; i < t.n; ++i) {
        const auto& nbrs = t.neighbors[i];
        res.margin[i].assign(nbrs.size(), 0.0);
        std::vector<double> inbound(nbrs.size());
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const int j = nbrs[k];
            inbound[k] = profile.a_bar[j][t.neighbor_index(j, i)];
        }
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double keep = inbound[k];
            const double b_coop = benefit(m, inbound);
            inbound[k] = 0.0;
            const double b_punished = benefit(m, inbound);
            inbound[k] = keep;
            res.margin[i][k] = delta * (b_coop - b_punished) - profile.a_bar[i][k];
        }
    }
    return res;
}

namespace {

double symmetric_margin(const UtilityModel& m, int d, double delta, double a) {
    return delta * (m.benefit_from_sum(d * a) - m.benefit_from_sum((d - 1) * a)) - a;
}

}  // namespace

SymmetricTftResult best_symmetric_tft(int d, const UtilityModel& m, double delta,
                                      double grid_resolution) {
    if (!m.is_sum_form()) throw std::logic_error("best_symmetric_tft: sum-form model required");
    if (d < 1) throw std::invalid_argument("best_symmetric_tft: degree must be >= 1");
    SymmetricTftResult res;
    const double s_opt = std::max(0.0, std::sqrt(m.r2) - 1.0);
    if (s_opt <= 0.0) return res;
    const double a_max = std::min(1.0, s_opt / d);

    double pass = -1.0, fail = -1.0;
    if (symmetric_margin(m, d, delta, a_max) >= 0.0) {
        pass = a_max;
    } else {
        fail = a_max;
        for (double a = a_max - grid_resolution; a > 0.0; a -= grid_resolution) {
            if (symmetric_margin(m, d, delta, a) >= 0.0) {
                pass = a;
                break;
            }
            fail = a;
        }
        if (pass < 0.0) return res;  // no feasible cooperate action
        // refine the binding boundary between the last failing and first
        // passing grid points
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (pass + fail);
            if (symmetric_margin(m, d, delta, mid) >= 0.0)
                pass = mid;
            else
                fail = mid;
        }
    }
    res.a_star = pass;
    res.welfare_per_agent = m.benefit_from_sum(d * pass) - d * pass;
    return res;
}

}  // namespace incnet
