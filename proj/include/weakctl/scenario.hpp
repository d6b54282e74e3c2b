#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "weakctl/consumers.hpp"
#include "weakctl/imc.hpp"
#include "weakctl/lti.hpp"

namespace weakctl::scenario {

using consumers::ConsumerSpec;
using consumers::DecisionStrategy;
using imc::GammaBounds;
using lti::DiscreteSim;
using lti::SignalTrace;
using lti::TransferFunction;

/// One discretized plant per consumer; DC gains checked against unity
/// when dc_check is set.
class PlantSet {
public:
    PlantSet(std::vector<TransferFunction> plants, double step, bool dc_check = true);

    std::size_t size() const { return plants_.size(); }
    const std::vector<TransferFunction>& transfer_functions() const { return plants_; }
    std::vector<DiscreteSim>& sims() { return sims_; }
    void reset();

private:
    std::vector<TransferFunction> plants_;
    std::vector<DiscreteSim> sims_;
};

enum class DisturbanceMode { FilteredGaussian, StepHold, Custom };

/// Seeded disturbance source; same seed yields a bit-identical trace.
struct DisturbanceGen {
    DisturbanceMode mode = DisturbanceMode::FilteredGaussian;
    std::uint64_t seed = 0;
    double variance = 10.0;
    TransferFunction filter = TransferFunction::first_order_lag(10.0);
    double sample_interval = 1.0; // white-noise hold interval, time units
    double level = 0.0;           // StepHold constant
    SignalTrace custom;           // Custom mode

    SignalTrace generate(std::size_t steps, double step) const;
};

struct SimTrace {
    double step = 0.0;
    SignalTrace r, d, v, y, y_m;
    std::vector<SignalTrace> u;   // per consumer
    std::vector<SignalTrace> y_i; // per consumer
    SignalTrace cost;
    std::vector<std::size_t> infeasible_steps;

    std::size_t length() const { return y.samples.size(); }
};

struct Metrics {
    double rms_tracking = 0.0; // unweighted sample sum at the plot rate
    double l2_y = 0.0;
    double l2_d_minus_df = 0.0;
    double total_cost = 0.0;
    bool bound_ok = true;
};

struct ControllerSetup {
    imc::InternalModel model;
    imc::YoulaFilter q;
    GammaBounds gamma;
};

SimTrace run_closed_loop(PlantSet plants, ControllerSetup controller,
                         const std::vector<ConsumerSpec>& specs,
                         const DecisionStrategy& strategy,
                         const SignalTrace& reference,
                         const DisturbanceGen& disturbance, std::size_t horizon);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

/// Verify ||y|| <= ||d - F d|| + epsilon on a zero-reference trace.
BoundCheck check_disturbance_bound(const SimTrace& trace, const TransferFunction& f,
                                   double epsilon);

Metrics compute_metrics(const SimTrace& trace, const TransferFunction& f,
                        double epsilon = std::numeric_limits<double>::infinity());

struct DemoSetup {
    std::vector<ConsumerSpec> specs;
    std::vector<TransferFunction> plants;
    std::vector<TransferFunction> models;
    TransferFunction f = TransferFunction::first_order_lag(1.5);
    DisturbanceGen disturbance;
    SignalTrace reference;
    double step = 0.01;
};

struct DemoReport {
    double rms_a = 0.0, rms_b = 0.0;
    double cost_a_total = 0.0, cost_b_total = 0.0;
    bool cost_reduced = false;
    std::vector<double> saving_a; // per-consumer integrated output, case A
    std::vector<double> saving_b; // per-consumer integrated output, case B
};

struct DemoResult {
    SimTrace trace_a;
    SimTrace trace_b;
    DemoReport report;
};

/// Run the two-request comparison: equal split (zero deviation) against
/// the fully free allocation, same seed.
DemoResult case_study_demo(const DemoSetup& setup);

// Trace serialization: k,t,r,d,v,y,u_1..u_n,y_1..y_n,cost at 15 significant digits.
std::string trace_to_csv(const SimTrace& trace);
SimTrace trace_from_csv(const std::string& text);
void write_trace_csv(const std::string& path, const SimTrace& trace);

/// Self-contained SVG line chart of r and y over time.
std::string trace_to_svg(const SimTrace& trace);

} // namespace weakctl::scenario
