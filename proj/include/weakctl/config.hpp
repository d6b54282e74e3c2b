#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weakctl/scenario.hpp"

namespace weakctl::config {

using lti::SignalTrace;
using lti::TransferFunction;

struct ConsumerEntry {
    double a = 1.0;
    double b = 0.0;
    double m = 100.0; // initial consumption; cap = 0.2 * m
    double floor = 0.0;
};

struct PlantConfig {
    std::string preset = "unity"; // "unity", "first_order", or "explicit"
    std::vector<double> tau;      // first_order time constants (cycled if short)
    std::vector<TransferFunction> tfs; // explicit transfer functions
};

struct GammaConfig {
    std::string mode = "zero"; // "zero", "unbounded", "design", "explicit"
    double epsilon = 2.0;
    double d_l2 = 10.0;
    std::optional<std::vector<double>> weights; // default: uniform
    std::vector<double> values;                 // explicit mode
};

struct ReferenceSegment {
    double start = 0.0; // time units
    double value = 0.0;
};

struct DisturbanceConfig {
    std::string mode = "filtered_gaussian"; // "filtered_gaussian", "step_hold", "none"
    std::uint64_t seed = 0;
    double variance = 10.0;
    double level = 0.0;
    double sample_interval = 1.0;
};

struct RunConfig {
    std::vector<ConsumerEntry> consumers;
    PlantConfig plants;
    std::vector<TransferFunction> models; // internal model; default all-unity
    TransferFunction filter_f = TransferFunction::first_order_lag(1.5);
    TransferFunction filter_fd = TransferFunction::first_order_lag(10.0);
    GammaConfig gamma;
    std::vector<ReferenceSegment> reference;
    DisturbanceConfig disturbance;
    double horizon = 60.0; // time units
    double step = 0.01;
    std::string output_dir = "out";
};

RunConfig parse(const std::string& text);
RunConfig load(const std::string& path);
std::string serialize(const RunConfig& cfg);

// Materialize simulation inputs from a validated config.
std::vector<scenario::ConsumerSpec> build_specs(const RunConfig& cfg);
std::vector<TransferFunction> build_plants(const RunConfig& cfg);
std::vector<TransferFunction> build_models(const RunConfig& cfg);
SignalTrace build_reference(const RunConfig& cfg);
scenario::DisturbanceGen build_disturbance(const RunConfig& cfg);
std::size_t horizon_steps(const RunConfig& cfg);

/// Resolve the gamma bounds, designing them from the budget when requested.
imc::GammaBounds build_gamma(const RunConfig& cfg, const TransferFunction& q);

} // namespace weakctl::config
