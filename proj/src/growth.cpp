#include "incnet/growth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "incnet/parallel.hpp"
#include "incnet/rng.hpp"
#include "incnet/welfare.hpp"

namespace incnet {

double expected_opt_welfare(double v_opt_at_refresh, double delta_v, double rho) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("expected_opt_welfare: rho must be in (0,1]");
    return v_opt_at_refresh + (1.0 - rho) * delta_v / (2.0 * rho);
}

DcrsResult design_with_refresh(const Topology& t, const UtilityModel& m, double delta, double rho,
                               const DcrsParams& params) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("design_with_refresh: rho must be in [0,1]");
    DcrsParams eff = params;
    eff.delta = (1.0 - rho) * delta;
    return run_dcrs(t, m, eff);
}

namespace {

// Mutable adjacency-list graph for the growth replay. New agents take the
// next id, so neighbor lists stay sorted by construction.
struct GrowingGraph {
    std::vector<std::vector<int>> neighbors;

    explicit GrowingGraph(const Topology& t0) : neighbors(t0.neighbors) {}

    void add_agent(const std::vector<int>& links) {
        const int id = static_cast<int>(neighbors.size());
        neighbors.emplace_back();
        for (int j : links) {
            neighbors[j].push_back(id);
            neighbors[id].push_back(j);
        }
    }

    Topology to_topology() const {
        const int n = static_cast<int>(neighbors.size());
        Topology t;
        t.n = n;
        t.neighbors = neighbors;
        t.adj.assign(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i)
            for (int j : neighbors[i]) t.adj[static_cast<std::size_t>(i) * n + j] = 1;
        return t;
    }

    double optimal_welfare(const UtilityModel& m) const {
        double v = 0.0;
        for (const auto& nb : neighbors) {
            const double s = obedient_inbound_sum(m, static_cast<int>(nb.size()));
            v += m.benefit_from_sum(s) - s;
        }
        return v;
    }
};

}  // namespace

GrowthPath sample_growth_path(const GrowthConfig& cfg, const UtilityModel& m, std::uint64_t seed) {
    if (cfg.n0 < 1 || cfg.horizon < 1) throw std::invalid_argument("growth: bad config");
    GrowthPath path;
    path.initial = make_random(cfg.n0, cfg.link_prob, mix_seed(seed, 11));
    path.horizon = cfg.horizon;
    path.joins.assign(cfg.horizon, false);
    path.join_links.assign(cfg.horizon, {});
    path.v_opt.assign(cfg.horizon, 0.0);

    GrowingGraph g(path.initial);
    Rng rng(mix_seed(seed, 12));
    for (int t = 0; t < cfg.horizon; ++t) {
        path.v_opt[t] = g.optimal_welfare(m);
        if (rng.uniform() < cfg.join_prob) {
            path.joins[t] = true;
            const int n = static_cast<int>(g.neighbors.size());
            std::vector<int> links;
            for (int j = 0; j < n; ++j)
                if (rng.uniform() < cfg.link_prob) links.push_back(j);
            path.join_links[t] = links;
            g.add_agent(links);
        }
    }
    return path;
}

GrowthRunResult run_growth_once(const GrowthPath& path, const UtilityModel& m, double delta,
                                double rho, std::uint64_t refresh_seed, const DcrsParams& params) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("growth: rho must be in [0,1]");
    GrowthRunResult res;
    Rng refresh_rng(refresh_seed);
    GrowingGraph g(path.initial);

    DcrsParams eff = params;
    eff.delta = (1.0 - rho) * delta;

    DcrsResult design = run_dcrs(g.to_topology(), m, eff);
    double achieved = design.v_star;
    bool topology_changed = false;

    double achieved_sum = 0.0, opt_sum = 0.0;
    for (int t = 0; t < path.horizon; ++t) {
        achieved_sum += achieved;
        opt_sum += path.v_opt[t];
        if (path.joins[t]) {
            g.add_agent(path.join_links[t]);
            topology_changed = true;
        }
        if (refresh_rng.uniform() < rho) {
            // redesign only when the topology moved since the last design;
            // otherwise the refresh reproduces the same strategy. Warm-start
            // from the previous multipliers; joiners start at zero.
            if (topology_changed) {
                design = run_dcrs(g.to_topology(), m, eff, design.state.lambda);
                achieved = design.v_star;
                topology_changed = false;
            }
            ++res.refresh_count;
        }
    }
    res.mean_opt = opt_sum / path.horizon;
    res.mean_achieved = achieved_sum / path.horizon;
    res.gap = res.mean_opt - res.mean_achieved;
    res.delta_v_hat = (path.v_opt[path.horizon - 1] - path.v_opt[0]) / std::max(1, path.horizon - 1);
    return res;
}

std::vector<RefreshSweepRow> sweep_refresh(const GrowthConfig& cfg, const UtilityModel& m,
                                           double delta, const std::vector<double>& rho_grid,
                                           const std::vector<std::uint64_t>& seeds,
                                           const DcrsParams& params, int workers) {
    if (rho_grid.empty()) throw std::invalid_argument("sweep_refresh: empty rho grid");
    if (seeds.empty()) throw std::invalid_argument("sweep_refresh: no seeds");

    std::vector<GrowthPath> paths(seeds.size());
    run_parallel(static_cast<int>(seeds.size()), workers,
                 [&](int s) { paths[s] = sample_growth_path(cfg, m, seeds[s]); });

    const int n_rho = static_cast<int>(rho_grid.size());
    const int n_seed = static_cast<int>(seeds.size());
    std::vector<GrowthRunResult> cell(static_cast<std::size_t>(n_rho) * n_seed);
    run_parallel(n_rho * n_seed, workers, [&](int idx) {
        const int r = idx / n_seed;
        const int s = idx % n_seed;
        cell[idx] = run_growth_once(paths[s], m, delta, rho_grid[r],
                                    mix_seed(seeds[s], 100 + static_cast<std::uint64_t>(r)), params);
    });

    std::vector<RefreshSweepRow> rows(n_rho);
    for (int r = 0; r < n_rho; ++r) {
        double gap_sum = 0.0, welfare_sum = 0.0;
        for (int s = 0; s < n_seed; ++s) {
            gap_sum += cell[static_cast<std::size_t>(r) * n_seed + s].gap;
            welfare_sum += cell[static_cast<std::size_t>(r) * n_seed + s].mean_achieved;
        }
        const double mean_gap = gap_sum / n_seed;
        double var = 0.0;
        for (int s = 0; s < n_seed; ++s) {
            const double d = cell[static_cast<std::size_t>(r) * n_seed + s].gap - mean_gap;
            var += d * d;
        }
        rows[r].rho = rho_grid[r];
        rows[r].mean_gap = mean_gap;
        rows[r].mean_welfare = welfare_sum / n_seed;
        rows[r].stderr_gap = n_seed > 1 ? std::sqrt(var / (n_seed - 1) / n_seed) : 0.0;
    }
    return rows;
}

}  // namespace incnet
