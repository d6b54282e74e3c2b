#pragma once

#include <vector>

#include "weakctl/lti.hpp"

namespace weakctl::imc {

using lti::DiscreteSim;
using lti::TransferFunction;

/// Per-consumer deviation fractions of the equal split.
struct GammaBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    static GammaBounds zero(std::size_t n) {
        return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    }
    static GammaBounds unbounded(std::size_t n);
    static GammaBounds symmetric(std::vector<double> gamma) {
        auto g = gamma;
        return {std::move(gamma), std::move(g)};
    }
    std::size_t size() const { return lower.size(); }
};

/// Set-valued request: equal-split center, per-consumer interval, coupling sum.
struct Request {
    double center = 0.0;
    double sum_target = 0.0;
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t size() const { return lo.size(); }
};

/// Bank of consumer plant models; the model output is the sum of the branches.
class InternalModel {
public:
    InternalModel(std::vector<TransferFunction> models, double step);

    /// Advance all branches with the previous consumer actions, return y_M.
    double advance(const std::vector<double>& u_prev);

    std::size_t consumer_count() const { return models_.size(); }
    const std::vector<TransferFunction>& models() const { return models_; }
    void reset();

private:
    std::vector<TransferFunction> models_;
    std::vector<DiscreteSim> sims_;
};

class YoulaFilter {
public:
    YoulaFilter(TransferFunction q, double step);

    double advance(double error) { return sim_.step_sim(error); }
    const TransferFunction& tf() const { return q_; }
    void reset() { sim_.reset(); }

private:
    TransferFunction q_;
    DiscreteSim sim_;
};

/// Q(s) = n F(s) / sum_i G_Mi(s); requires F(0) = 1 and a stable
/// minimum-phase model sum.
TransferFunction build_youla(const std::vector<TransferFunction>& models,
                             const TransferFunction& f);

/// Interval request around the equal split v/n, half-widths gamma*|v|/n.
Request expand(double v, const GammaBounds& gamma, std::size_t n);

/// Split the deviation budget of the L2 bound across consumers:
/// gamma_i = w_i * epsilon * n / (||Q|| * ||d|| * ||G_i||).
GammaBounds design_gamma(const std::vector<TransferFunction>& plants,
                         const TransferFunction& q, double d_l2, double epsilon,
                         const std::vector<double>& weights);

struct ControllerOutput {
    double v = 0.0;
    Request request;
};

/// One controller update: advance the internal model with the realized
/// actions, drive Q with r - (y - y_M), expand the filtered reference.
ControllerOutput controller_step(InternalModel& model, YoulaFilter& q,
                                 const GammaBounds& gamma, double r, double y,
                                 const std::vector<double>& u_prev);

} // namespace weakctl::imc
