#include "incnet/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "incnet/dcrs.hpp"
#include "incnet/engine.hpp"
#include "incnet/growth.hpp"
#include "incnet/parallel.hpp"
#include "incnet/protocol.hpp"
#include "incnet/tft.hpp"
#include "incnet/topology.hpp"
#include "incnet/utility_model.hpp"
#include "incnet/welfare.hpp"

namespace incnet {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path.string());
    os << content;
}

struct ScenarioContext {
    json config;
    fs::path config_dir;
    fs::path out_dir;
    std::string id;
    std::uint64_t seed = 0;
    int workers = 1;
};

json load_json_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config file not found: " + path.string());
    json j;
    is >> j;
    return j;
}

UtilityModel model_from_config(const json& cfg) {
    if (!cfg.contains("utility")) return UtilityModel::estimation(4.0);
    const json& u = cfg.at("utility");
    const std::string kind = u.value("benefit", "estimation");
    if (kind != "estimation")
        throw std::invalid_argument("config: only the \"estimation\" benefit is configurable");
    return UtilityModel::estimation(u.value("r2", 4.0));
}

Topology topology_from_config(const ScenarioContext& ctx) {
    if (!ctx.config.contains("topology"))
        throw std::invalid_argument("config: missing \"topology\" section");
    const json& tc = ctx.config.at("topology");
    if (tc.contains("path")) {
        const fs::path p = ctx.config_dir / tc.at("path").get<std::string>();
        std::ifstream is(p);
        if (!is) throw std::invalid_argument("topology edge-list file not found: " + p.string());
        std::stringstream ss;
        ss << is.rdbuf();
        return Topology::parse_edge_list(ss.str());
    }
    const TopologyKind kind = topology_kind_from_string(tc.at("kind").get<std::string>());
    const int n = tc.at("n").get<int>();
    TopologyParams params;
    params.link_prob = tc.value("link_prob", 0.2);
    params.exponent = tc.value("exponent", 3.0);
    const std::uint64_t seed = tc.value("seed", ctx.seed);
    return gen_topology(kind, n, params, seed);
}

double delta_from_config(const json& cfg) {
    const double delta = cfg.value("delta", 1.0);
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("config: delta must be in (0,1]");
    return delta;
}

double epsilon_from_config(const json& cfg) {
    const double eps = cfg.value("epsilon", 0.0);
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("config: epsilon must be in [0,1)");
    return eps;
}

DcrsParams dcrs_from_config(const json& cfg, double delta) {
    DcrsParams p;
    p.delta = delta;
    if (cfg.contains("dcrs")) {
        const json& d = cfg.at("dcrs");
        p.w = d.value("w", p.w);
        p.eps_lambda = d.value("eps_lambda", p.eps_lambda);
        p.eps_primal = d.value("eps_primal", p.eps_primal);
        p.max_iter = d.value("max_iter", p.max_iter);
        p.record_trace = d.value("trace", false);
    }
    return p;
}

BehaviorSpec behavior_from_config(const json& sim, int n) {
    auto kind_of = [](const std::string& s) {
        if (s == "compliant") return Behavior::Kind::compliant;
        if (s == "always_zero") return Behavior::Kind::always_zero;
        if (s == "best_response") return Behavior::Kind::best_response;
        if (s == "scripted") return Behavior::Kind::scripted;
        throw std::invalid_argument("config: unknown behavior kind: " + s);
    };
    BehaviorSpec spec = BehaviorSpec::all(n, Behavior::Kind::compliant);
    if (!sim.contains("behavior")) return spec;
    const json& b = sim.at("behavior");
    if (b.contains("default"))
        spec = BehaviorSpec::all(n, kind_of(b.at("default").get<std::string>()));
    for (const json& ov : b.value("overrides", json::array())) {
        const int agent = ov.at("agent").get<int>();
        if (agent < 0 || agent >= n) throw std::invalid_argument("config: behavior agent out of range");
        Behavior& bh = spec.agents[agent];
        bh.kind = kind_of(ov.at("kind").get<std::string>());
        bh.deviate_periods.clear();
        for (const json& p : ov.value("periods", json::array()))
            bh.deviate_periods.insert(p.get<int>());
    }
    return spec;
}

std::string metrics_json(const ScenarioContext& ctx, const json& extra) {
    json j = extra;
    j["scenario"] = ctx.id;
    return j.dump(2) + "\n";
}

json poa_field(double v_opt, double v_star) {
    if (v_star > 0.0) return v_opt / v_star;
    if (v_opt <= 0.0) return 1.0;
    return nullptr;  // protocol welfare collapsed, ratio undefined
}

void write_dcrs_trace(const ScenarioContext& ctx, const DcrsState& state) {
    std::ostringstream os;
    os << "iteration,agent,lambda,constraint_slack\n";
    for (const auto& pt : state.trace)
        for (std::size_t i = 0; i < pt.lambda.size(); ++i)
            os << pt.iteration << "," << i << "," << fmt(pt.lambda[i]) << "," << fmt(pt.slack[i])
               << "\n";
    write_file(ctx.out_dir / "dcrs_trace.csv", os.str());
}

// ---------------------------------------------------------------- commands

void cmd_design(const ScenarioContext& ctx) {
    const UtilityModel m = model_from_config(ctx.config);
    const Topology t = topology_from_config(ctx);
    const double delta = delta_from_config(ctx.config);
    const DcrsParams params = dcrs_from_config(ctx.config, delta);

    const auto [opt_profile, v_opt] = solve_obedient(t, m);
    const DcrsResult res = run_dcrs(t, m, params);
    const RatingProtocol protocol = design_binary_protocol(t, m, res.sigma, delta);
    const DeviationGains gains = ppe_one_shot_check(protocol, t, m, delta, 0.0);

    write_file(ctx.out_dir / "protocol.json", protocol.to_json() + "\n");
    json extra;
    extra["v_opt"] = v_opt;
    extra["v_star"] = res.v_star;
    extra["poa"] = poa_field(v_opt, res.v_star);
    extra["dcrs_iterations"] = res.state.iterations;
    extra["ppe_max_gain"] = gains.max_gain();
    write_file(ctx.out_dir / "metrics.json", metrics_json(ctx, extra));
    if (params.record_trace) write_dcrs_trace(ctx, res.state);
}

void cmd_benchmark(const ScenarioContext& ctx) {
    const UtilityModel m = model_from_config(ctx.config);
    const Topology t = topology_from_config(ctx);
    const auto [profile, v_opt] = solve_obedient(t, m);
    json extra;
    extra["v_opt"] = v_opt;
    json per_agent = json::array();
    for (int i = 0; i < t.n; ++i) per_agent.push_back(utility(m, t, profile, i));
    extra["per_agent_utility"] = per_agent;
    write_file(ctx.out_dir / "metrics.json", metrics_json(ctx, extra));
}

void cmd_simulate(const ScenarioContext& ctx) {
    const UtilityModel m = model_from_config(ctx.config);
    const Topology t = topology_from_config(ctx);
    const double delta = delta_from_config(ctx.config);
    const double eps = epsilon_from_config(ctx.config);
    const json sim = ctx.config.value("simulate", json::object());

    const auto [opt_profile, v_opt] = solve_obedient(t, m);

    RatingProtocol protocol;
    double v_star = 0.0;
    if (sim.contains("protocol_path")) {
        const fs::path p = ctx.config_dir / sim.at("protocol_path").get<std::string>();
        std::ifstream is(p);
        if (!is) throw std::invalid_argument("protocol file not found: " + p.string());
        std::stringstream ss;
        ss << is.rdbuf();
        protocol = RatingProtocol::from_json(ss.str());
        ActionProfile top;
        top.a = protocol.strategy.level(protocol.K);
        v_star = social_welfare(t, m, top);
    } else {
        const DcrsParams params = dcrs_from_config(ctx.config, delta);
        const DcrsResult res = run_dcrs(t, m, params);
        v_star = res.v_star;
        const std::string which = sim.value("protocol", "optimal");
        if (which == "appendix")
            protocol = construct_appendix_protocol(t, m, res.sigma, delta);
        else
            protocol = design_binary_protocol(t, m, res.sigma, delta);
    }

    SimParams sp;
    sp.horizon = sim.value("horizon", 1000);
    sp.eps = eps;
    sp.delta = delta;
    sp.seed = mix_seed(ctx.seed, 7);
    sp.burn_in_frac = sim.value("burn_in_frac", 0.1);
    sp.record_trace = sim.value("trace", false);
    const BehaviorSpec behavior = behavior_from_config(sim, t.n);
    const SimResult res = simulate(t, m, protocol, behavior, sp);

    json extra;
    extra["v_opt"] = v_opt;
    extra["v_star"] = v_star;
    extra["poa"] = poa_field(v_opt, v_star);
    extra["time_avg_welfare"] = res.time_avg_welfare;
    extra["realized_poa"] = poa_field(v_opt, res.time_avg_welfare);
    extra["per_agent_avg_utility"] = res.avg_utility;
    extra["occupancy"] = res.occupancy;
    extra["stationary_occupancy"] = res.stationary_occupancy;
    write_file(ctx.out_dir / "metrics.json", metrics_json(ctx, extra));

    if (sp.record_trace) {
        std::ostringstream os;
        os << "period,agent,rating,action_sum,utility\n";
        for (const auto& row : res.trace)
            os << row.period << "," << row.agent << "," << row.rating << "," << fmt(row.action_sum)
               << "," << fmt(row.utility) << "\n";
        write_file(ctx.out_dir / "sim_trace.csv", os.str());
    }
}

void cmd_star_sweep(const ScenarioContext& ctx) {
    const json sw = ctx.config.value("star_sweep", json::object());
    std::vector<int> sizes = sw.value("sizes", std::vector<int>{});
    if (sizes.empty())
        for (int n = 3; n <= 20; ++n) sizes.push_back(n);
    const std::vector<double> deltas = sw.value("deltas", std::vector<double>{1.0, 0.9, 0.8, 0.7});
    const UtilityModel m = UtilityModel::estimation(sw.value("r2", 8.0));
    const DcrsParams base = dcrs_from_config(ctx.config, 1.0);

    struct Row {
        int n;
        double delta, v_opt, v_star;
    };
    std::vector<Row> rows(sizes.size() * deltas.size());
    run_parallel(static_cast<int>(rows.size()), ctx.workers, [&](int idx) {
        const int si = idx / static_cast<int>(deltas.size());
        const int di = idx % static_cast<int>(deltas.size());
        const Topology t = make_star(sizes[si]);
        DcrsParams p = base;
        p.delta = deltas[di];
        const double v_opt = solve_obedient(t, m).second;
        const DcrsResult res = run_dcrs(t, m, p);
        rows[idx] = {sizes[si], deltas[di], v_opt, res.v_star};
    });

    std::ostringstream os;
    os << "n,delta,v_opt,v_star,poa\n";
    for (const Row& r : rows)
        os << r.n << "," << fmt(r.delta) << "," << fmt(r.v_opt) << "," << fmt(r.v_star) << ","
           << fmt(r.v_star > 0 ? r.v_opt / r.v_star : 1.0) << "\n";
    write_file(ctx.out_dir / "star_sweep.csv", os.str());
}

void cmd_scalefree_table(const ScenarioContext& ctx) {
    const json sc = ctx.config.value("scalefree_table", json::object());
    const int n = sc.value("n", 100);
    const std::vector<double> exponents = sc.value("exponents", std::vector<double>{2.5, 3.0, 3.5});
    const std::vector<double> epsilons = sc.value("epsilons", std::vector<double>{0.02, 0.05, 0.1});
    const int horizon = sc.value("horizon", 20000);
    const UtilityModel m = model_from_config(ctx.config);
    const double delta = delta_from_config(ctx.config);
    const DcrsParams params = dcrs_from_config(ctx.config, delta);

    struct Cell {
        double exponent, epsilon, v_opt, v_star, sim_welfare;
    };
    std::vector<Cell> cells(exponents.size() * epsilons.size());
    run_parallel(static_cast<int>(cells.size()), ctx.workers, [&](int idx) {
        const int ei = idx / static_cast<int>(epsilons.size());
        const int xi = idx % static_cast<int>(epsilons.size());
        const Topology t =
            make_scale_free(n, exponents[ei], mix_seed(ctx.seed, 300 + static_cast<std::uint64_t>(ei)));
        const double v_opt = solve_obedient(t, m).second;
        const DcrsResult res = run_dcrs(t, m, params);
        const RatingProtocol protocol = design_binary_protocol(t, m, res.sigma, delta);
        SimParams sp;
        sp.horizon = horizon;
        sp.eps = epsilons[xi];
        sp.delta = delta;
        sp.seed = mix_seed(ctx.seed, 400 + static_cast<std::uint64_t>(idx));
        const SimResult sim =
            simulate(t, m, protocol, BehaviorSpec::all(t.n, Behavior::Kind::compliant), sp);
        cells[idx] = {exponents[ei], epsilons[xi], v_opt, res.v_star, sim.time_avg_welfare};
    });

    std::ostringstream os;
    os << "exponent,epsilon,v_opt,v_star,sim_welfare,poa\n";
    for (const Cell& c : cells)
        os << fmt(c.exponent) << "," << fmt(c.epsilon) << "," << fmt(c.v_opt) << ","
           << fmt(c.v_star) << "," << fmt(c.sim_welfare) << ","
           << fmt(c.sim_welfare > 0 ? c.v_opt / c.sim_welfare : 1.0) << "\n";
    write_file(ctx.out_dir / "scalefree_table.csv", os.str());
}

void cmd_compare_tft(const ScenarioContext& ctx) {
    const json tc = ctx.config.value("tft", json::object());
    const int n = tc.value("n", 100);
    const int degree = tc.value("degree", 4);
    const std::vector<double> deltas =
        tc.value("deltas", std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    const double grid = tc.value("grid_resolution", 1e-4);
    const UtilityModel m = model_from_config(ctx.config);
    const DcrsParams base = dcrs_from_config(ctx.config, 1.0);

    const Topology t = make_circulant(n, degree);
    const double v_opt = solve_obedient(t, m).second;

    struct Row {
        double delta, poa_rating, poa_tft;
    };
    std::vector<Row> rows(deltas.size());
    run_parallel(static_cast<int>(deltas.size()), ctx.workers, [&](int idx) {
        DcrsParams p = base;
        p.delta = deltas[idx];
        const DcrsResult res = run_dcrs(t, m, p);
        const SymmetricTftResult tft = best_symmetric_tft(degree, m, deltas[idx], grid);
        const double v_tft = n * tft.welfare_per_agent;
        rows[idx] = {deltas[idx], res.v_star > 0 ? v_opt / res.v_star : 1.0,
                     v_tft > 0 ? v_opt / v_tft : std::numeric_limits<double>::infinity()};
    });

    std::ostringstream os;
    os << "delta,poa_rating,poa_tft\n";
    for (const Row& r : rows)
        os << fmt(r.delta) << "," << fmt(r.poa_rating) << "," << fmt(r.poa_tft) << "\n";
    write_file(ctx.out_dir / "tft_comparison.csv", os.str());
}

void cmd_growth_sweep(const ScenarioContext& ctx) {
    const json gc = ctx.config.value("growth", json::object());
    GrowthConfig cfg;
    cfg.n0 = gc.value("n0", 50);
    cfg.join_prob = gc.value("join_prob", 0.1);
    cfg.link_prob = gc.value("link_prob", 0.2);
    cfg.horizon = gc.value("horizon", 1000);
    const double delta = gc.value("delta", ctx.config.value("delta", 0.4));
    const std::vector<double> rho_grid = gc.value(
        "rho_grid",
        std::vector<double>{0.005, 0.01, 0.02, 0.03, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14});
    const int n_seeds = gc.value("seeds", 50);
    const UtilityModel m = model_from_config(ctx.config);
    const DcrsParams params = dcrs_from_config(ctx.config, delta);

    std::vector<std::uint64_t> seeds(n_seeds);
    for (int i = 0; i < n_seeds; ++i)
        seeds[i] = mix_seed(ctx.seed, 9000 + static_cast<std::uint64_t>(i));

    const std::vector<RefreshSweepRow> rows =
        sweep_refresh(cfg, m, delta, rho_grid, seeds, params, ctx.workers);

    std::ostringstream os;
    os << "rho,mean_gap,mean_welfare,stderr\n";
    for (const auto& r : rows)
        os << fmt(r.rho) << "," << fmt(r.mean_gap) << "," << fmt(r.mean_welfare) << ","
           << fmt(r.stderr_gap) << "\n";
    write_file(ctx.out_dir / "growth_sweep.csv", os.str());

    int best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].mean_gap < rows[best].mean_gap) best = static_cast<int>(i);
    json extra;
    extra["rho_star"] = rows[best].rho;
    extra["min_gap"] = rows[best].mean_gap;
    write_file(ctx.out_dir / "growth_summary.json", metrics_json(ctx, extra));
}

}  // namespace

int run_scenario(const ScenarioOptions& opts) {
    try {
        ScenarioContext ctx;
        ctx.config = load_json_file(opts.config_path);
        ctx.config_dir = fs::path(opts.config_path).parent_path();
        ctx.out_dir = opts.out_dir;
        fs::create_directories(ctx.out_dir);
        ctx.id = ctx.config.value("id", fs::path(opts.config_path).stem().string());
        ctx.seed = opts.seed_override.value_or(ctx.config.value("seed", 0ULL));
        ctx.workers = opts.workers >= 1 ? opts.workers : default_worker_count();

        if (opts.command == "design")
            cmd_design(ctx);
        else if (opts.command == "benchmark")
            cmd_benchmark(ctx);
        else if (opts.command == "simulate")
            cmd_simulate(ctx);
        else if (opts.command == "star-sweep")
            cmd_star_sweep(ctx);
        else if (opts.command == "scalefree-table")
            cmd_scalefree_table(ctx);
        else if (opts.command == "compare-tft")
            cmd_compare_tft(ctx);
        else if (opts.command == "growth-sweep")
            cmd_growth_sweep(ctx);
        else
            throw std::invalid_argument("unknown command: " + opts.command);
        return 0;
    } catch (const DcrsNonConvergence& e) {
        json err;
        err["error"] = {{"type", "dcrs_non_convergence"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const InfeasibleDesign& e) {
        json err;
        err["error"] = {{"type", "infeasible_design"}, {"message", e.what()}, {"slacks", e.slacks}};
        std::cerr << err.dump() << "\n";
        return 3;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"type", "invalid_scenario"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}

}  // namespace incnet
