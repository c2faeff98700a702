#include "incnet/utility_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "incnet/rng.hpp"

namespace incnet {

UtilityModel UtilityModel::estimation(double r2) {
    if (!(r2 > 0.0)) throw std::invalid_argument("utility: r2 must be positive");
    UtilityModel m;
    m.kind = BenefitKind::estimation_sum;
    m.r2 = r2;
    return m;
}

UtilityModel UtilityModel::custom(std::function<double(const std::vector<double>&)> fn) {
    UtilityModel m;
    m.kind = BenefitKind::custom;
    m.custom_benefit = std::move(fn);
    return m;
}

double UtilityModel::benefit_from_sum(double s) const {
    if (!is_sum_form()) throw std::logic_error("benefit_from_sum: not a sum-form model");
    return r2 - r2 / (1.0 + s);
}

double UtilityModel::marginal_benefit_from_sum(double s) const {
    if (!is_sum_form()) throw std::logic_error("marginal_benefit_from_sum: not a sum-form model");
    const double d = 1.0 + s;
    return r2 / (d * d);
}

ActionProfile ActionProfile::zeros(const Topology& t) {
    ActionProfile p;
    p.a.resize(t.n);
    for (int i = 0; i < t.n; ++i) p.a[i].assign(t.neighbors[i].size(), 0.0);
    return p;
}

double ActionProfile::get(const Topology& t, int i, int j) const {
    int k = t.neighbor_index(i, j);
    if (k < 0) throw std::out_of_range("action profile: pair not connected");
    return a[i][k];
}

void ActionProfile::set(const Topology& t, int i, int j, double v) {
    int k = t.neighbor_index(i, j);
    if (k < 0) throw std::out_of_range("action profile: pair not connected");
    a[i][k] = v;
}

double ActionProfile::outbound_sum(int i) const {
    return std::accumulate(a[i].begin(), a[i].end(), 0.0);
}

double ActionProfile::inbound_sum(const Topology& t, int i) const {
    double s = 0.0;
    for (int j : t.neighbors[i]) s += a[j][t.neighbor_index(j, i)];
    return s;
}

std::vector<double> ActionProfile::inbound_vector(const Topology& t, int i) const {
    std::vector<double> v;
    v.reserve(t.neighbors[i].size());
    for (int j : t.neighbors[i]) v.push_back(a[j][t.neighbor_index(j, i)]);
    return v;
}

void ActionProfile::validate(const Topology& t) const {
    if (static_cast<int>(a.size()) != t.n)
        throw std::invalid_argument("action profile: agent count mismatch");
    for (int i = 0; i < t.n; ++i) {
        if (a[i].size() != t.neighbors[i].size())
            throw std::invalid_argument("action profile: neighbor count mismatch");
        for (double v : a[i])
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("action profile: action outside [0,1]");
    }
}

double benefit(const UtilityModel& m, const std::vector<double>& inbound) {
    if (m.is_sum_form()) {
        double s = std::accumulate(inbound.begin(), inbound.end(), 0.0);
        return m.benefit_from_sum(s);
    }
    return m.custom_benefit(inbound);
}

double utility(const UtilityModel& m, const Topology& t, const ActionProfile& profile, int i) {
    return benefit(m, profile.inbound_vector(t, i)) - profile.outbound_sum(i);
}

ModelValidationReport validate_model(const UtilityModel& m, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("validate_model: samples must be >= 1");
    ModelValidationReport report;
    Rng rng(seed);
    constexpr double tol = 1e-12;
    for (int s = 0; s < samples; ++s) {
        const int dim = rng.uniform_int(1, 6);
        std::vector<double> x(dim), y(dim), mid(dim);
        for (int k = 0; k < dim; ++k) x[k] = rng.uniform();
        // monotonicity: bump one coordinate upward
        y = x;
        const int bump = rng.uniform_int(0, dim - 1);
        y[bump] = std::min(1.0, x[bump] + rng.uniform() * (1.0 - x[bump]));
        if (benefit(m, y) < benefit(m, x) - tol) {
            std::ostringstream os;
            os << "b decreased when coordinate " << bump << " increased (dim " << dim << ")";
            report.violations.push_back({"monotonicity", os.str()});
        }
        // midpoint concavity between two random points
        for (int k = 0; k < dim; ++k) y[k] = rng.uniform();
        for (int k = 0; k < dim; ++k) mid[k] = 0.5 * (x[k] + y[k]);
        if (benefit(m, mid) < 0.5 * (benefit(m, x) + benefit(m, y)) - tol) {
            std::ostringstream os;
            os << "midpoint value below chord (dim " << dim << ")";
            report.violations.push_back({"concavity", os.str()});
        }
        ++report.samples_checked;
    }
    return report;
}

}  // namespace incnet
