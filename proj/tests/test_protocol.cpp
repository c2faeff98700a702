#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "incnet/dcrs.hpp"
#include "incnet/protocol.hpp"
#include "incnet/welfare.hpp"

using namespace incnet;

namespace {

const UtilityModel kModel = UtilityModel::estimation(4.0);

DcrsResult star_design(double delta = 1.0) {
    DcrsParams p;
    p.delta = delta;
    return run_dcrs(make_star(4), kModel, p);
}

}  // namespace

TEST_CASE("binary design uses the tightest demotion probability") {
    const Topology star = make_star(4);
    const DcrsResult res = star_design();
    const RatingProtocol p = design_binary_protocol(star, kModel, res.sigma, 1.0);
    CHECK(p.K == 2);
    // center constraint binds: alpha = 2.25 / 2.25
    CHECK(p.alpha[0][1] == doctest::Approx(1.0).epsilon(1e-6));
    // periphery: |sigma| = 3/7 against b(3/4) = 12/7
    for (int leaf = 1; leaf <= 3; ++leaf)
        CHECK(p.alpha[leaf][1] == doctest::Approx(0.25).epsilon(1e-3));
    for (int i = 0; i < 4; ++i) {
        CHECK(p.beta[i][0] == 1.0);
        for (std::size_t k = 0; k < star.neighbors[i].size(); ++k)
            CHECK(p.strategy.get(i, static_cast<int>(k), 1) == 0.0);
    }
}

TEST_CASE("zero outbound strategy is never demoted") {
    // line 0-1-2; the far agent neither shares nor receives
    const Topology line = Topology::from_edges(3, {{0, 1}, {1, 2}});
    LinkValues sigma{{0.4}, {0.4, 0.0}, {0.0}};
    const RatingProtocol p = design_binary_protocol(line, kModel, sigma, 1.0);
    CHECK(p.alpha[2][1] == 0.0);
    CHECK(p.alpha[0][1] > 0.0);
    CHECK(p.alpha[1][1] > 0.0);
}

TEST_CASE("infeasible strategies are rejected with a slack report") {
    const Topology star = make_star(4);
    const auto obedient = solve_obedient(star, kModel).first.a;
    CHECK_THROWS_AS(design_binary_protocol(star, kModel, obedient, 1.0), InfeasibleDesign);
    try {
        design_binary_protocol(star, kModel, obedient, 1.0);
    } catch (const InfeasibleDesign& e) {
        REQUIRE(e.slacks.size() == 4);
        CHECK(e.slacks[0] == doctest::Approx(-1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(construct_appendix_protocol(star, kModel, obedient, 1.0), InfeasibleDesign);
}

TEST_CASE("feasible update bounds") {
    // two agents sharing 0.5 each way: |sigma| = 0.5, b = b(0.5) = 4/3
    const Topology pair = Topology::from_edges(2, {{0, 1}});
    LinkValues sigma{{1.0}, {1.0}};
    SUBCASE("delta one makes any promotion probability feasible") {
        const UpdateBounds b = feasible_update_bounds(0, pair, kModel, sigma, 1.0);
        CHECK(b.beta_min == 0.0);
    }
    SUBCASE("formula values at delta 0.9") {
        // force |sigma| = 1, b = 2 by using the unit pair strategy
        const UpdateBounds b = feasible_update_bounds(0, pair, kModel, sigma, 0.9);
        CHECK(b.sigma_norm == doctest::Approx(1.0));
        CHECK(b.benefit_value == doctest::Approx(2.0));
        CHECK(b.beta_min == doctest::Approx(0.1 / 0.9).epsilon(1e-9));
        CHECK(b.alpha_min(1.0) == doctest::Approx(1.0 / 0.9 * 0.5).epsilon(1e-9));
    }
    SUBCASE("degenerate benefit rejected") {
        const Topology star = make_star(4);
        const auto obedient = solve_obedient(star, kModel).first.a;  // center: b=2 < cost 3
        CHECK_THROWS_AS(feasible_update_bounds(0, star, kModel, obedient, 1.0), std::domain_error);
    }
}

TEST_CASE("rating transitions follow the update rule") {
    const Topology star = make_star(4);
    const DcrsResult res = star_design();
    RatingProtocol p = design_binary_protocol(star, kModel, res.sigma, 1.0);
    p.alpha[1][1] = 0.25;

    Rng rng(77);
    int demotions = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i)
        if (rating_transition(2, 0, p, 1, rng) == 1) ++demotions;
    CHECK(std::abs(demotions / static_cast<double>(trials) - 0.25) < 0.01);

    for (int i = 0; i < 100; ++i) {
        CHECK(rating_transition(2, 1, p, 1, rng) == 2);  // ceiling holds
        CHECK(rating_transition(1, 0, p, 1, rng) == 1);  // floor holds
    }
    CHECK_THROWS_AS(rating_transition(3, 1, p, 1, rng), std::out_of_range);
}

TEST_CASE("stationary high-rating fraction") {
    CHECK(stationary_high_fraction(0.5, 1.0, 0.1) == doctest::Approx(0.9 / 0.95).epsilon(1e-12));
    CHECK(stationary_high_fraction(0.5, 1.0, 0.0) == 1.0);
    CHECK(stationary_high_fraction(0.0, 1.0, 0.2) == 1.0);
    CHECK_THROWS_AS(stationary_high_fraction(0.0, 0.0, 0.2), std::domain_error);
    CHECK_THROWS_AS(stationary_high_fraction(0.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("discounted value functions match hand computations") {
    const Topology star = make_star(4);
    const DcrsResult res = star_design();  // periphery: b = 12/7, cost = 3/7
    const RatingProtocol p = design_binary_protocol(star, kModel, res.sigma, 1.0);
    const ValueTable vt = value_functions(p, star, kModel, 0.9, 0.0);
    CHECK(!vt.average_mode);
    CHECK(vt.value[1][1] == doctest::Approx(90.0 / 7.0).epsilon(1e-3));
    // with beta = 1 and eps = 0: U(1) = u(1) + delta * U(2)
    const double u_low = 0.0 - 3.0 / 7.0;
    CHECK(vt.value[1][0] == doctest::Approx(u_low + 0.9 * vt.value[1][1]).epsilon(1e-6));
    CHECK(vt.monotone());
}

TEST_CASE("zero strategy has zero values and zero gains") {
    const Topology ring = make_ring(4);
    const LinkValues zero(4, std::vector<double>(2, 0.0));
    const RatingProtocol p = design_binary_protocol(ring, kModel, zero, 1.0);
    const ValueTable vt = value_functions(p, ring, kModel, 0.9, 0.0);
    for (const auto& row : vt.value)
        for (double v : row) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    const DeviationGains g = ppe_one_shot_check(p, ring, kModel, 0.9, 0.0);
    CHECK(g.max_gain() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.is_ppe());
}

TEST_CASE("average-reward mode at delta one") {
    const Topology star = make_star(4);
    const DcrsResult res = star_design();
    const RatingProtocol p = design_binary_protocol(star, kModel, res.sigma, 1.0);
    const ValueTable vt = value_functions(p, star, kModel, 1.0, 0.0);
    CHECK(vt.average_mode);
    // perfect monitoring: compliant agents sit at the top, rate = stage utility
    CHECK(vt.avg_rate[1] == doctest::Approx(12.0 / 7.0 - 3.0 / 7.0).epsilon(1e-3));
    CHECK(vt.monotone());

    const DeviationGains g = ppe_one_shot_check(p, star, kModel, 1.0, 0.0);
    CHECK(g.max_gain() <= 1e-9);  // binding center sits exactly at zero gain
    CHECK(g.gain[0][1] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("weakening a binding demotion probability breaks the equilibrium") {
    const Topology star = make_star(4);
    const DcrsResult res = star_design();
    RatingProtocol p = design_binary_protocol(star, kModel, res.sigma, 1.0);
    p.alpha[0][1] *= 0.5;  // halve the binding center's punishment
    const DeviationGains g = ppe_one_shot_check(p, star, kModel, 1.0, 0.0);
    CHECK(g.gain[0][1] > 1e-6);
    CHECK(!g.is_ppe());
}

TEST_CASE("appendix construction passes the equilibrium check") {
    const Topology ring = make_ring(4);
    DcrsParams params;
    params.delta = 0.9;
    const DcrsResult res = run_dcrs(ring, kModel, params);
    const RatingProtocol p = construct_appendix_protocol(ring, kModel, res.sigma, 0.9);
    for (int i = 0; i < 4; ++i) {
        CHECK(p.alpha[i][1] == 1.0);
        CHECK(p.beta[i][0] == 1.0);
    }
    const DeviationGains g = ppe_one_shot_check(p, ring, kModel, 0.9, 0.0);
    CHECK(g.is_ppe());
    CHECK(g.max_gain() < -1e-3);  // strictly slack on the ring
}

TEST_CASE("partial compliance never beats the better of comply and deviate") {
    // playing c*sigma for c in (0,1) pays part of the cost but still counts
    // as a deviation signal-wise, so it is dominated by the zero deviation
    const Topology star = make_star(4);
    const DcrsResult res = star_design();
    const RatingProtocol p = design_binary_protocol(star, kModel, res.sigma, 1.0);
    const ValueTable vt = value_functions(p, star, kModel, 0.9, 0.0);
    const DeviationGains g = ppe_one_shot_check(p, star, kModel, 0.9, 0.0);
    for (int i = 0; i < 4; ++i) {
        double cost = 0.0;
        for (std::size_t k = 0; k < star.neighbors[i].size(); ++k)
            cost += p.strategy.get(i, static_cast<int>(k), 2);
        for (int theta = 1; theta <= 2; ++theta) {
            const double comply_value = vt.value[i][theta - 1];
            const double zero_value = comply_value + g.gain[i][theta - 1];
            for (double c = 0.1; c < 0.95; c += 0.1) {
                const double partial = zero_value - c * cost;  // same continuation as deviating
                CHECK(partial <= std::max(comply_value, zero_value) + 1e-12);
            }
        }
    }
}

TEST_CASE("optimal update probabilities maximize high-rating occupancy on the bound grid") {
    const Topology star = make_star(4);
    DcrsParams params;
    params.delta = 0.9;
    const DcrsResult res = run_dcrs(star, kModel, params);
    const RatingProtocol opt = design_binary_protocol(star, kModel, res.sigma, 0.9);
    const double eps = 0.1;
    for (int agent = 0; agent < 4; ++agent) {
        const UpdateBounds bounds = feasible_update_bounds(agent, star, kModel, res.sigma, 0.9);
        const double best = stationary_high_fraction(opt.alpha[agent][1], 1.0, eps);
        for (int bi = 0; bi <= 20; ++bi) {
            const double beta = bounds.beta_min + (1.0 - bounds.beta_min) * bi / 20.0;
            if (beta <= 0.0) continue;
            for (int ai = 0; ai <= 20; ++ai) {
                const double alpha_lo = std::min(1.0, std::max(0.0, bounds.alpha_min(beta)));
                const double alpha = alpha_lo + (1.0 - alpha_lo) * ai / 20.0;
                CHECK(stationary_high_fraction(alpha, beta, eps) <= best + 1e-9);
            }
        }
    }
}

TEST_CASE("equilibrium existence is tight in both directions at desk scale") {
    const Topology star = make_star(4);
    const UtilityModel m = kModel;
    const auto obedient = solve_obedient(star, m).first.a;  // violates the center condition
    // no (alpha, beta) pair rescues an infeasible strategy
    RatingProtocol p;
    p.K = 2;
    p.strategy = StrategyTable::from_top(star, obedient, 2);
    p.alpha.assign(4, {0.0, 1.0});
    p.beta.assign(4, {1.0, 1.0});
    for (int ai = 1; ai <= 20; ++ai) {
        for (int bi = 1; bi <= 20; ++bi) {
            for (int i = 0; i < 4; ++i) {
                p.alpha[i][1] = ai / 20.0;
                p.beta[i][0] = bi / 20.0;
            }
            const DeviationGains g = ppe_one_shot_check(p, star, m, 1.0, 0.0);
            CHECK(g.max_gain() > 1e-9);
        }
    }
    // while any feasible strategy passes with the appendix construction
    const DcrsResult res = star_design();
    const RatingProtocol ok = construct_appendix_protocol(star, m, res.sigma, 1.0);
    CHECK(ppe_one_shot_check(ok, star, m, 1.0, 0.0).is_ppe());
}

TEST_CASE("protocol JSON round-trips bit-exactly") {
    const Topology star = make_star(4);
    const DcrsResult res = star_design();
    const RatingProtocol p = design_binary_protocol(star, kModel, res.sigma, 1.0);
    const RatingProtocol q = RatingProtocol::from_json(p.to_json());
    CHECK(q.K == p.K);
    REQUIRE(q.alpha == p.alpha);
    REQUIRE(q.beta == p.beta);
    REQUIRE(q.strategy.sigma == p.strategy.sigma);
    CHECK(q.to_json() == p.to_json());
}

TEST_CASE("transitions only ever reach the two states of the update rule") {
    RatingProtocol p;
    p.K = 3;
    p.alpha.assign(1, {0.4, 0.4, 0.4});
    p.beta.assign(1, {0.6, 0.6, 0.6});
    Rng rng(5);
    for (int theta = 1; theta <= 3; ++theta) {
        for (int signal : {0, 1}) {
            for (int it = 0; it < 2000; ++it) {
                const int next = rating_transition(theta, signal, p, 0, rng);
                if (signal == 0)
                    CHECK((next == std::max(1, theta - 1) || next == theta));
                else
                    CHECK((next == std::min(3, theta + 1) || next == theta));
            }
        }
    }
}
