#include "weakctl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace weakctl::scenario {

PlantSet::PlantSet(std::vector<TransferFunction> plants, double step, bool dc_check)
    : plants_(std::move(plants)) {
    if (plants_.empty()) throw Error("plant set: need at least one plant");
    for (const auto& p : plants_) {
        if (dc_check && std::abs(lti::dc_gain(p) - 1.0) > 1e-6)
            throw Error("plant set: plant DC gain must be 1");
        sims_.push_back(lti::discretize(p, step));
    }
}

void PlantSet::reset() {
    for (auto& sim : sims_) sim.reset();
}

namespace {

// Deterministic standard normals: Box-Muller over mt19937_64 uniforms,
// independent of the standard library's distribution internals.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform() {
        return static_cast<double>(rng_()) / (static_cast<double>(rng_.max()) + 1.0);
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace

SignalTrace DisturbanceGen::generate(std::size_t steps, double step) const {
    SignalTrace trace;
    trace.step = step;
    trace.samples.resize(steps, 0.0);

    switch (mode) {
        case DisturbanceMode::StepHold:
            std::fill(trace.samples.begin(), trace.samples.end(), level);
            break;
        case DisturbanceMode::Custom: {
            for (std::size_t k = 0; k < steps; ++k)
                trace.samples[k] = k < custom.samples.size() ? custom.samples[k] : 0.0;
            break;
        }
        case DisturbanceMode::FilteredGaussian: {
            NormalSource normals(seed);
            auto sim = lti::discretize(filter, step);
            const double sigma = std::sqrt(variance);
            const std::size_t hold =
                std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_interval / step)));
            double white = 0.0;
            for (std::size_t k = 0; k < steps; ++k) {
                if (k % hold == 0) white = sigma * normals.next();
                trace.samples[k] = sim.step_sim(white);
            }
            break;
        }
    }
    return trace;
}

SimTrace run_closed_loop(PlantSet plants, ControllerSetup controller,
                         const std::vector<ConsumerSpec>& specs,
                         const DecisionStrategy& strategy,
                         const SignalTrace& reference,
                         const DisturbanceGen& disturbance, std::size_t horizon) {
    const std::size_t n = plants.size();
    if (specs.size() != n || controller.model.consumer_count() != n)
        throw DimensionMismatch("run_closed_loop: consumer count mismatch");
    if (horizon < 1) throw Error("run_closed_loop: horizon must be at least 1");

    const double step = reference.step;
    plants.reset();
    controller.model.reset();
    controller.q.reset();

    SimTrace trace;
    trace.step = step;
    for (auto* sig : {&trace.r, &trace.d, &trace.v, &trace.y, &trace.y_m, &trace.cost}) {
        sig->step = step;
        sig->samples.reserve(horizon);
    }
    trace.u.assign(n, SignalTrace{step, {}});
    trace.y_i.assign(n, SignalTrace{step, {}});

    const SignalTrace d = disturbance.generate(horizon, step);
    std::mt19937_64 rng(strategy.seed);

    double y_prev = 0.0;
    std::vector<double> u_prev(n, 0.0);
    for (std::size_t k = 0; k < horizon; ++k) {
        const double r_k = k < reference.samples.size() ? reference.samples[k] : 0.0;
        const double d_k = d.samples[k];

        const double y_m = controller.model.advance(u_prev);
        const double v = controller.q.advance(r_k - (y_prev - y_m));
        const auto request = imc::expand(v, controller.gamma, n);

        const auto alloc = consumers::decide(specs, request, strategy, rng);
        if (!alloc.feasible) trace.infeasible_steps.push_back(k);

        double y_k = d_k;
        double cost_k = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = plants.sims()[i].step_sim(alloc.u[i]);
            trace.u[i].samples.push_back(alloc.u[i]);
            trace.y_i[i].samples.push_back(yi);
            y_k += yi;
            cost_k += specs[i].cost(alloc.u[i]);
        }

        trace.r.samples.push_back(r_k);
        trace.d.samples.push_back(d_k);
        trace.v.samples.push_back(v);
        trace.y.samples.push_back(y_k);
        trace.y_m.samples.push_back(y_m);
        trace.cost.samples.push_back(cost_k);

        y_prev = y_k;
        u_prev = alloc.u;
    }
    return trace;
}

namespace {

SignalTrace filtered_residual(const SimTrace& trace, const TransferFunction& f) {
    auto sim = lti::discretize(f, trace.step);
    SignalTrace out{trace.step, {}};
    out.samples.reserve(trace.length());
    for (double dk : trace.d.samples)
        out.samples.push_back(dk - sim.step_sim(dk));
    return out;
}

} // namespace

BoundCheck check_disturbance_bound(const SimTrace& trace, const TransferFunction& f,
                                   double epsilon) {
    for (double rk : trace.r.samples)
        if (rk != 0.0)
            throw NonZeroReference("check_disturbance_bound: reference must be identically zero");
    BoundCheck result;
    result.lhs = lti::l2_norm(trace.y);
    result.rhs = lti::l2_norm(filtered_residual(trace, f)) + epsilon;
    result.ok = result.lhs <= result.rhs + 1e-6;
    return result;
}

Metrics compute_metrics(const SimTrace& trace, const TransferFunction& f,
                        double epsilon) {
    Metrics m;
    // Tracking error sampled at the unit plot rate, plain sample sum.
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / trace.step)));
    double acc = 0.0;
    for (std::size_t k = stride - 1; k < trace.length(); k += stride) {
        const double e = trace.y.samples[k] - trace.r.samples[k];
        acc += e * e;
    }
    m.rms_tracking = std::sqrt(acc);
    m.l2_y = lti::l2_norm(trace.y);
    m.l2_d_minus_df = lti::l2_norm(filtered_residual(trace, f));
    m.total_cost = trace.step *
                   std::accumulate(trace.cost.samples.begin(), trace.cost.samples.end(), 0.0);
    const bool zero_ref = std::all_of(trace.r.samples.begin(), trace.r.samples.end(),
                                      [](double x) { return x == 0.0; });
    m.bound_ok = !zero_ref || !std::isfinite(epsilon) ||
                 m.l2_y <= m.l2_d_minus_df + epsilon + 1e-6;
    return m;
}

DemoResult case_study_demo(const DemoSetup& setup) {
    if (setup.specs.size() != 5)
        throw ConfigMismatch("demo: the case study uses exactly 5 consumers");
    const std::size_t n = setup.specs.size();
    if (setup.plants.size() != n || setup.models.size() != n)
        throw ConfigMismatch("demo: plant and model counts must match the consumers");

    const auto q_tf = imc::build_youla(setup.models, setup.f);
    const std::size_t horizon = setup.reference.samples.size();

    auto run_case = [&](const GammaBounds& gamma, const DecisionStrategy& strategy) {
        PlantSet plants(setup.plants, setup.step);
        ControllerSetup controller{imc::InternalModel(setup.models, setup.step),
                                   imc::YoulaFilter(q_tf, setup.step), gamma};
        return run_closed_loop(std::move(plants), std::move(controller), setup.specs,
                               strategy, setup.reference, setup.disturbance, horizon);
    };

    DemoResult result;
    result.trace_a = run_case(GammaBounds::zero(n), DecisionStrategy::equal_split());
    result.trace_b = run_case(GammaBounds::unbounded(n), DecisionStrategy::selfish());

    const auto metrics_a = compute_metrics(result.trace_a, setup.f);
    const auto metrics_b = compute_metrics(result.trace_b, setup.f);
    result.report.rms_a = metrics_a.rms_tracking;
    result.report.rms_b = metrics_b.rms_tracking;
    result.report.cost_a_total = metrics_a.total_cost;
    result.report.cost_b_total = metrics_b.total_cost;
    result.report.cost_reduced = result.report.cost_b_total <= result.report.cost_a_total;
    for (std::size_t i = 0; i < n; ++i) {
        const auto integrate = [&](const SignalTrace& s) {
            return s.step * std::accumulate(s.samples.begin(), s.samples.end(), 0.0);
        };
        result.report.saving_a.push_back(integrate(result.trace_a.y_i[i]));
        result.report.saving_b.push_back(integrate(result.trace_b.y_i[i]));
    }
    return result;
}

namespace {

std::string format_g15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

} // namespace

std::string trace_to_csv(const SimTrace& trace) {
    const std::size_t n = trace.u.size();
    std::ostringstream out;
    out << "k,t,r,d,v,y";
    for (std::size_t i = 0; i < n; ++i) out << ",u_" << (i + 1);
    for (std::size_t i = 0; i < n; ++i) out << ",y_" << (i + 1);
    out << ",cost\n";
    for (std::size_t k = 0; k < trace.length(); ++k) {
        out << k << ',' << format_g15(static_cast<double>(k) * trace.step)
            << ',' << format_g15(trace.r.samples[k])
            << ',' << format_g15(trace.d.samples[k])
            << ',' << format_g15(trace.v.samples[k])
            << ',' << format_g15(trace.y.samples[k]);
        for (std::size_t i = 0; i < n; ++i) out << ',' << format_g15(trace.u[i].samples[k]);
        for (std::size_t i = 0; i < n; ++i) out << ',' << format_g15(trace.y_i[i].samples[k]);
        out << ',' << format_g15(trace.cost.samples[k]) << '\n';
    }
    return out.str();
}

SimTrace trace_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("trace CSV: empty input");

    std::size_t columns = 1;
    for (char c : line) columns += (c == ',');
    if (columns < 7 || (columns - 7) % 2 != 0)
        throw Error("trace CSV: unexpected column count");
    const std::size_t n = (columns - 7) / 2;

    SimTrace trace;
    trace.u.assign(n, SignalTrace{});
    trace.y_i.assign(n, SignalTrace{});
    std::vector<double> row(columns);
    bool first_row = true;
    double prev_t = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        for (std::size_t c = 0; c < columns; ++c) {
            if (!std::getline(cells, cell, ',')) throw Error("trace CSV: short row");
            row[c] = std::stod(cell);
        }
        if (first_row) {
            first_row = false;
        } else if (trace.step == 0.0) {
            trace.step = row[1] - prev_t;
        }
        prev_t = row[1];
        trace.r.samples.push_back(row[2]);
        trace.d.samples.push_back(row[3]);
        trace.v.samples.push_back(row[4]);
        trace.y.samples.push_back(row[5]);
        for (std::size_t i = 0; i < n; ++i) trace.u[i].samples.push_back(row[6 + i]);
        for (std::size_t i = 0; i < n; ++i) trace.y_i[i].samples.push_back(row[6 + n + i]);
        trace.cost.samples.push_back(row[6 + 2 * n]);
    }
    for (auto* sig : {&trace.r, &trace.d, &trace.v, &trace.y, &trace.y_m, &trace.cost})
        sig->step = trace.step;
    for (auto& s : trace.u) s.step = trace.step;
    for (auto& s : trace.y_i) s.step = trace.step;
    return trace;
}

void write_trace_csv(const std::string& path, const SimTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << trace_to_csv(trace);
}

std::string trace_to_svg(const SimTrace& trace) {
    const int width = 800, height = 400, margin = 40;
    double lo = 0.0, hi = 1.0;
    for (const auto* sig : {&trace.r, &trace.y}) {
        for (double x : sig->samples) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    const double span = hi - lo > 0 ? hi - lo : 1.0;
    const std::size_t len = std::max<std::size_t>(2, trace.length());

    auto polyline = [&](const SignalTrace& sig, const char* color) {
        std::ostringstream p;
        p << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (std::size_t k = 0; k < sig.samples.size(); ++k) {
            const double px = margin + (width - 2.0 * margin) * static_cast<double>(k) /
                                           static_cast<double>(len - 1);
            const double py = height - margin -
                              (height - 2.0 * margin) * (sig.samples[k] - lo) / span;
            p << px << ',' << py << ' ';
        }
        p << "\"/>\n";
        return p.str();
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << polyline(trace.r, "black") << polyline(trace.y, "steelblue")
        << "</svg>\n";
    return out.str();
}

} // namespace weakctl::scenario
