#include "weakctl/imc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace weakctl::imc {

GammaBounds GammaBounds::unbounded(std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {std::vector<double>(n, inf), std::vector<double>(n, inf)};
}

InternalModel::InternalModel(std::vector<TransferFunction> models, double step)
    : models_(std::move(models)) {
    if (models_.empty()) throw Error("internal model: need at least one consumer model");
    sims_.reserve(models_.size());
    for (const auto& m : models_) sims_.push_back(lti::discretize(m, step));
}

double InternalModel::advance(const std::vector<double>& u_prev) {
    if (u_prev.size() != models_.size())
        throw DimensionMismatch("internal model: action vector length mismatch");
    double y_m = 0.0;
    for (std::size_t i = 0; i < sims_.size(); ++i)
        y_m += sims_[i].step_sim(u_prev[i]);
    return y_m;
}

void InternalModel::reset() {
    for (auto& sim : sims_) sim.reset();
}

YoulaFilter::YoulaFilter(TransferFunction q, double step)
    : q_(std::move(q)), sim_(lti::discretize(q_, step)) {
    if (!q_.is_stable()) throw UnstableSystem("Youla filter: Q must be stable");
}

TransferFunction build_youla(const std::vector<TransferFunction>& models,
                             const TransferFunction& f) {
    if (models.empty()) throw Error("build_youla: empty model list");
    if (std::abs(lti::dc_gain(f) - 1.0) > 1e-9)
        throw Error("build_youla: filter must satisfy F(0) = 1");

    // Sum of the model branches over a common denominator.
    std::vector<double> sum_num{0.0};
    std::vector<double> sum_den{1.0};
    for (const auto& m : models) {
        sum_num = lti::poly_add(lti::poly_mul(sum_num, m.den),
                                lti::poly_mul(m.num, sum_den));
        sum_den = lti::poly_mul(sum_den, m.den);
    }

    // RHP zeros of the model sum become unstable poles of Q.
    for (const auto& zero : lti::poly_roots(sum_num))
        if (zero.real() >= 0.0)
            throw NonMinimumPhaseModel(
                "build_youla: model sum has a zero in the closed right half-plane");

    const double n = static_cast<double>(models.size());
    std::vector<double> q_num = lti::poly_mul(f.num, sum_den);
    for (double& c : q_num) c *= n;
    std::vector<double> q_den = lti::poly_mul(f.den, sum_num);

    const auto effective_degree = [](const std::vector<double>& p) {
        const auto lead = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
        return static_cast<int>(p.end() - lead) - 1;
    };
    const int deg_num = effective_degree(q_num);
    const int deg_den = effective_degree(q_den);
    if (deg_num > deg_den)
        throw ImproperQ("build_youla: F rolls off too slowly, Q would be improper");

    TransferFunction q(std::move(q_num), std::move(q_den));
    if (!q.is_stable())
        throw UnstableSystem("build_youla: constructed Q is unstable");
    return q;
}

Request expand(double v, const GammaBounds& gamma, std::size_t n) {
    if (n < 1) throw Error("expand: need at least one consumer");
    if (gamma.lower.size() != n || gamma.upper.size() != n)
        throw DimensionMismatch("expand: gamma length mismatch");

    Request req;
    req.center = v / static_cast<double>(n);
    req.sum_target = v;
    req.lo.resize(n);
    req.hi.resize(n);
    const double scale = std::abs(v) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        req.lo[i] = req.center - gamma.lower[i] * scale;
        req.hi[i] = req.center + gamma.upper[i] * scale;
        if (std::isnan(req.lo[i])) req.lo[i] = -std::numeric_limits<double>::infinity();
        if (std::isnan(req.hi[i])) req.hi[i] = std::numeric_limits<double>::infinity();
    }
    return req;
}

GammaBounds design_gamma(const std::vector<TransferFunction>& plants,
                         const TransferFunction& q, double d_l2, double epsilon,
                         const std::vector<double>& weights) {
    const std::size_t n = plants.size();
    if (weights.size() != n)
        throw InvalidWeights("design_gamma: weight length mismatch");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidWeights("design_gamma: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw InvalidWeights("design_gamma: weights must sum to 1");
    if (epsilon <= 0.0) throw Error("design_gamma: epsilon must be positive");
    if (d_l2 <= 0.0) throw Error("design_gamma: disturbance energy must be positive");

    const double q_norm = lti::hinf_norm(q);
    const double budget = epsilon * static_cast<double>(n) / (q_norm * d_l2);
    if (budget <= 0.0 || !std::isfinite(budget))
        throw ZeroBudget("design_gamma: budget underflow");

    std::vector<double> gamma(n);
    for (std::size_t i = 0; i < n; ++i)
        gamma[i] = weights[i] * budget / lti::hinf_norm(plants[i]);
    return GammaBounds::symmetric(std::move(gamma));
}

ControllerOutput controller_step(InternalModel& model, YoulaFilter& q,
                                 const GammaBounds& gamma, double r, double y,
                                 const std::vector<double>& u_prev) {
    const double y_m = model.advance(u_prev);
    const double error = r - (y - y_m);
    const double v = q.advance(error);
    return {v, expand(v, gamma, model.consumer_count())};
}

} // namespace weakctl::imc
