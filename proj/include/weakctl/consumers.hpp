#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "weakctl/imc.hpp"

namespace weakctl::consumers {

using imc::Request;

/// Private quadratic cost a*u^2 + b*u with box limits [floor, cap].
struct ConsumerSpec {
    double a = 1.0;
    double b = 0.0;
    double cap = std::numeric_limits<double>::infinity();
    double floor = 0.0;

    double cost(double u) const { return a * u * u + b * u; }
};

enum class StrategyKind { Selfish, EqualSplit, Adversarial };

struct DecisionStrategy {
    StrategyKind kind = StrategyKind::Selfish;
    std::uint64_t seed = 0;

    static DecisionStrategy selfish() { return {StrategyKind::Selfish, 0}; }
    static DecisionStrategy equal_split() { return {StrategyKind::EqualSplit, 0}; }
    static DecisionStrategy adversarial(std::uint64_t seed) {
        return {StrategyKind::Adversarial, seed};
    }
};

struct Allocation {
    std::vector<double> u;
    bool feasible = true;
    double slack = 0.0; // coupling violation when the boxes cannot meet the sum
};

/// Exact minimizer of sum(a_i u_i^2 + b_i u_i) subject to sum(u) = target
/// and lo <= u <= hi, by bisection on the dual variable.
std::vector<double> solve_qp(const std::vector<double>& a,
                             const std::vector<double>& b,
                             const std::vector<double>& lo,
                             const std::vector<double>& hi, double target);

Allocation decide(const std::vector<ConsumerSpec>& specs, const Request& req,
                  const DecisionStrategy& strategy);
Allocation decide(const std::vector<ConsumerSpec>& specs, const Request& req,
                  const DecisionStrategy& strategy, std::mt19937_64& rng);

/// Largest realized deviation ratio |u_i - v/n| / (|v|/n); 0 at v = u = 0.
double delta_gain(const Request& req, const std::vector<double>& u);

} // namespace weakctl::consumers
