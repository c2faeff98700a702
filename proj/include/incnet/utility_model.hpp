#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "incnet/topology.hpp"

namespace incnet {

// Concave-benefit / linear-cost stage utility. The built-in "estimation"
// benefit depends only on the inbound sum s and equals r2 - r2/(1+s); a
// custom concave benefit over the inbound vector can be injected for
// experiments, but closed-form solvers only exist for the sum form.
struct UtilityModel {
    enum class BenefitKind { estimation_sum, custom };

    BenefitKind kind = BenefitKind::estimation_sum;
    double r2 = 4.0;  // noise variance of the estimation benefit
    std::function<double(const std::vector<double>&)> custom_benefit;

    static UtilityModel estimation(double r2);
    static UtilityModel custom(std::function<double(const std::vector<double>&)> fn);

    bool is_sum_form() const { return kind == BenefitKind::estimation_sum; }
    double benefit_from_sum(double s) const;           // estimation form only
    double marginal_benefit_from_sum(double s) const;  // d/ds of the above
};

// Directed effort levels a_ij in [0,1], stored per agent per neighbor index
// (aligned with Topology::neighbors ordering).
struct ActionProfile {
    std::vector<std::vector<double>> a;

    static ActionProfile zeros(const Topology& t);
    double get(const Topology& t, int i, int j) const;
    void set(const Topology& t, int i, int j, double v);
    double outbound_sum(int i) const;
    double inbound_sum(const Topology& t, int i) const;
    std::vector<double> inbound_vector(const Topology& t, int i) const;
    void validate(const Topology& t) const;  // throws on shape/range errors
};

double benefit(const UtilityModel& m, const std::vector<double>& inbound);
double utility(const UtilityModel& m, const Topology& t, const ActionProfile& profile, int i);

struct ModelValidationReport {
    struct Violation {
        std::string kind;  // "monotonicity" or "concavity"
        std::string detail;
    };
    std::vector<Violation> violations;
    int samples_checked = 0;
    bool ok() const { return violations.empty(); }
};

// Spot-checks monotonicity and midpoint concavity of the benefit on random
// inbound vectors (dimensions 1..6).
ModelValidationReport validate_model(const UtilityModel& m, int samples, std::uint64_t seed);

}  // namespace incnet
