#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "weakctl/errors.hpp"

namespace weakctl::lti {

/// Rational SISO transfer function, coefficients in descending powers of s.
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;

    TransferFunction() : num{0.0}, den{1.0} {}
    TransferFunction(std::vector<double> n, std::vector<double> d);

    int degree_num() const { return static_cast<int>(num.size()) - 1; }
    int degree_den() const { return static_cast<int>(den.size()) - 1; }

    bool is_stable() const;

    static TransferFunction unity() { return TransferFunction({1.0}, {1.0}); }
    /// 1/(tau*s + 1)
    static TransferFunction first_order_lag(double tau) {
        return TransferFunction({1.0}, {tau, 1.0});
    }
};

// Polynomial helpers (coefficients descending, as in TransferFunction).
std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q);
std::vector<double> poly_add(const std::vector<double>& p, const std::vector<double>& q);
std::complex<double> poly_eval(const std::vector<double>& p, std::complex<double> s);
std::vector<std::complex<double>> poly_roots(const std::vector<double>& p);

/// Discrete-time state-space realization with internal state.
class DiscreteSim {
public:
    DiscreteSim() = default;
    DiscreteSim(Eigen::MatrixXd A, Eigen::VectorXd B, Eigen::RowVectorXd C,
                double D, double step);

    /// Advance one step with the given input, return the output sample.
    double step_sim(double input);

    void reset() { state_.setZero(); }
    double step() const { return step_; }
    double dc_gain() const;
    Eigen::Index order() const { return state_.size(); }

private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd B_;
    Eigen::RowVectorXd C_;
    double D_ = 0.0;
    Eigen::VectorXd state_;
    double step_ = 0.0;
};

/// Uniformly sampled real signal.
struct SignalTrace {
    double step = 0.0;
    std::vector<double> samples;

    std::size_t size() const { return samples.size(); }
};

double dc_gain(const TransferFunction& tf);
std::complex<double> freq_response(const TransferFunction& tf, double omega);

struct FrequencyGrid {
    double omega_min = 1e-3;
    double omega_max = 1e4;
    int points = 2000;
};

/// Peak gain over a log-spaced grid with golden-section refinement.
double hinf_norm(const TransferFunction& tf, const FrequencyGrid& grid = {});

/// Controllable-canonical realization discretized by zero-order hold.
DiscreteSim discretize(const TransferFunction& tf, double step);

/// Discrete approximation of the continuous L2 norm: sqrt(step * sum x^2).
double l2_norm(const SignalTrace& trace);

} // namespace weakctl::lti
