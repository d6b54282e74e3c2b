// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "weakctl/config.hpp"
#include "weakctl/scenario.hpp"

#include "qp_oracle.hpp"

using namespace weakctl;
using namespace weakctl::scenario;
using consumers::ConsumerSpec;
using consumers::DecisionStrategy;
using imc::GammaBounds;
using lti::TransferFunction;

namespace {

constexpr double kStep = 0.01;

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::vector<ConsumerSpec> demo_specs(double cap = 20.0, double floor = 0.0) {
    std::vector<ConsumerSpec> specs;
    for (int i = 1; i <= 5; ++i) specs.push_back({1.0, 6.0 * i, cap, floor});
    return specs;
}

std::vector<TransferFunction> surrogate_plants() {
    std::vector<TransferFunction> plants;
    for (double tau : {0.05, 0.0875, 0.125, 0.1625, 0.2})
        plants.push_back(TransferFunction::first_order_lag(tau));
    return plants;
}

SignalTrace constant_ref(double value, double horizon, double step = kStep) {
    const auto steps = static_cast<std::size_t>(std::llround(horizon / step));
    return {step, std::vector<double>(steps, value)};
}

DisturbanceGen gaussian(std::uint64_t seed, double variance = 10.0) {
    DisturbanceGen gen;
    gen.mode = DisturbanceMode::FilteredGaussian;
    gen.seed = seed;
    gen.variance = variance;
    return gen;
}

DisturbanceGen constant_dist(double level) {
    DisturbanceGen gen;
    gen.mode = DisturbanceMode::StepHold;
    gen.level = level;
    return gen;
}

SimTrace run_loop(const std::vector<TransferFunction>& plants,
                  const std::vector<TransferFunction>& models, const TransferFunction& f,
                  const GammaBounds& gamma, const std::vector<ConsumerSpec>& specs,
                  const DecisionStrategy& strategy, const SignalTrace& reference,
                  const DisturbanceGen& dist, double step = kStep) {
    PlantSet plant_set(plants, step);
    ControllerSetup controller{imc::InternalModel(models, step),
                               imc::YoulaFilter(imc::build_youla(models, f), step), gamma};
    return run_closed_loop(std::move(plant_set), std::move(controller), specs, strategy,
                           reference, dist, reference.samples.size());
}

DemoSetup demo_setup(std::uint64_t seed) {
    DemoSetup setup;
    setup.specs = demo_specs();
    setup.plants.assign(5, TransferFunction::unity());
    setup.models.assign(5, TransferFunction::unity());
    setup.f = TransferFunction::first_order_lag(1.5);
    setup.disturbance = gaussian(seed);
    setup.reference = constant_ref(50.0, 60.0);
    setup.step = kStep;
    return setup;
}

// Criterion 1: steady-state tracking under every strategy and request width.
bool criterion_tracking(std::string& detail) {
    const auto f = TransferFunction::first_order_lag(1.5);
    // Identical surrogate lags: the total output then depends only on the
    // allocation sum, so even a never-settling adversarial split tracks.
    const std::vector<std::vector<TransferFunction>> plant_sets = {
        std::vector<TransferFunction>(5, TransferFunction::unity()),
        std::vector<TransferFunction>(5, TransferFunction::first_order_lag(0.1))};
    const std::vector<TransferFunction> models(5, TransferFunction::unity());
    const auto q = imc::build_youla(models, f);

    const std::vector<std::pair<std::string, GammaBounds>> gammas = {
        {"zero", GammaBounds::zero(5)},
        {"designed", imc::design_gamma(std::vector<TransferFunction>(5, TransferFunction::unity()),
                                       q, 10.0, 2.0, std::vector<double>(5, 0.2))},
        {"unbounded", GammaBounds::unbounded(5)}};
    const std::vector<std::pair<std::string, DecisionStrategy>> strategies = {
        {"selfish", DecisionStrategy::selfish()},
        {"equal_split", DecisionStrategy::equal_split()},
        {"adversarial", DecisionStrategy::adversarial(17)}};

    double worst_err = 0.0, worst_time = 0.0;
    for (const auto& plants : plant_sets) {
        for (const auto& [gname, gamma] : gammas) {
            for (const auto& [sname, strategy] : strategies) {
                const double t0 = now_seconds();
                const auto trace = run_loop(plants, models, f, gamma, demo_specs(), strategy,
                                            constant_ref(50.0, 60.0), constant_dist(5.0));
                const double elapsed = now_seconds() - t0;
                worst_time = std::max(worst_time, elapsed);
                for (std::size_t k = trace.length() - trace.length() / 10;
                     k < trace.length(); ++k)
                    worst_err = std::max(worst_err, std::abs(trace.y.samples[k] - 50.0));
            }
        }
    }
    std::ostringstream out;
    out << "max |y-50| over final 10% = " << worst_err << " (tol 1e-3), slowest case "
        << worst_time << " s (limit 1)";
    detail = out.str();
    return worst_err <= 1e-3 && worst_time < 1.0;
}

// Criterion 2: equal-split and free-allocation cases coincide on unity plants.
bool criterion_case_equivalence(std::string& detail) {
    const auto result = case_study_demo(demo_setup(2024));
    double max_dev = 0.0;
    for (std::size_t k = 0; k < result.trace_a.length(); ++k)
        max_dev = std::max(max_dev, std::abs(result.trace_a.y.samples[k] -
                                             result.trace_b.y.samples[k]));
    const double rms_dev = std::abs(result.report.rms_a - result.report.rms_b);
    std::ostringstream out;
    out << "max |yA-yB| = " << max_dev << " (tol 1e-9), |rmsA-rmsB| = " << rms_dev
        << "; rms = " << result.report.rms_a << " (paper reference 36.723, not asserted)";
    detail = out.str();
    return max_dev <= 1e-9 && rms_dev <= 1e-9;
}

// Criterion 3: free allocation reduces the total cost on (almost) every seed.
bool criterion_cost_reduction(std::string& detail) {
    int reduced = 0, strict = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto result = case_study_demo(demo_setup(seed));
        if (result.report.cost_b_total <= result.report.cost_a_total) ++reduced;
        if (result.report.cost_b_total < result.report.cost_a_total) ++strict;
    }
    std::ostringstream out;
    out << reduced << "/50 seeds reduced, " << strict << "/50 strictly (need 50 and >= 49)";
    detail = out.str();
    return reduced == 50 && strict >= 49;
}

// Criterion 4: disturbance-suppression bound, plus a falsifiability control.
bool criterion_bound(std::string& detail) {
    const double t0 = now_seconds();
    const double epsilon = 2.0;
    const auto plants = surrogate_plants();
    const auto& models = plants; // exact internal model
    const auto f = TransferFunction::first_order_lag(1.5);
    const auto q = imc::build_youla(models, f);
    const auto specs = demo_specs(1e6, -1e6); // boxes wide, the request governs
    const auto zero_ref = constant_ref(0.0, 60.0);
    const std::vector<double> weights(5, 0.2);

    int ok_count = 0;
    int violations_inflated = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto dist = gaussian(seed);
        const double d_l2 = lti::l2_norm(dist.generate(zero_ref.samples.size(), kStep));
        auto gamma = imc::design_gamma(plants, q, d_l2, epsilon, weights);

        const auto trace = run_loop(plants, models, f, gamma, specs,
                                    DecisionStrategy::adversarial(seed), zero_ref, dist);
        const auto check = check_disturbance_bound(trace, f, epsilon);
        if (check.ok) ++ok_count;
        worst_margin = std::min(worst_margin, check.rhs - check.lhs);

        // control run: 100x the designed freedom must break the guarantee
        for (auto* side : {&gamma.lower, &gamma.upper})
            for (double& g : *side) g *= 100.0;
        const auto inflated = run_loop(plants, models, f, gamma, specs,
                                       DecisionStrategy::adversarial(seed), zero_ref, dist);
        if (!check_disturbance_bound(inflated, f, epsilon).ok) ++violations_inflated;
    }
    const double elapsed = now_seconds() - t0;
    std::ostringstream out;
    out << ok_count << "/100 seeds satisfy the bound (worst margin " << worst_margin
        << "), " << violations_inflated
        << "/100 violations with gamma x100 (need >= 1), " << elapsed << " s (limit 30)";
    detail = out.str();
    return ok_count == 100 && violations_inflated >= 1 && elapsed < 30.0;
}

// Criterion 5: zero-deviation loop reproduces the nominal residual norm.
bool criterion_nominal_identity(std::string& detail) {
    const auto f = TransferFunction::first_order_lag(1.5);
    const std::vector<TransferFunction> unity(5, TransferFunction::unity());
    const auto zero_ref = constant_ref(0.0, 60.0);
    double worst_rel = 0.0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto trace = run_loop(unity, unity, f, GammaBounds::zero(5),
                                    demo_specs(1e6, -1e6), DecisionStrategy::equal_split(),
                                    zero_ref, gaussian(seed));
        const auto check = check_disturbance_bound(trace, f, 0.0);
        worst_rel = std::max(worst_rel, std::abs(check.lhs - check.rhs) / check.rhs);
    }
    std::ostringstream out;
    out << "worst relative gap over 20 seeds = " << worst_rel << " (tol 0.01)";
    detail = out.str();
    return worst_rel <= 0.01;
}

// Criterion 6: QP solver against the brute-force grid oracle plus KKT.
bool criterion_qp_oracle(std::string& detail) {
    auto kkt_residual = [](const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& lo, const std::vector<double>& hi,
                           double target, const std::vector<double>& u) {
        double residual = std::abs(std::accumulate(u.begin(), u.end(), 0.0) - target);
        double lambda = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u[i] > lo[i] + 1e-9 && u[i] < hi[i] - 1e-9)
                lambda = 2.0 * a[i] * u[i] + b[i];
        for (std::size_t i = 0; i < u.size(); ++i) {
            residual = std::max(residual, std::max(lo[i] - u[i], u[i] - hi[i]));
            if (std::isnan(lambda)) continue;
            const double grad = 2.0 * a[i] * u[i] + b[i];
            if (u[i] <= lo[i] + 1e-9)
                residual = std::max(residual, lambda - grad);
            else if (u[i] >= hi[i] - 1e-9)
                residual = std::max(residual, grad - lambda);
            else
                residual = std::max(residual, std::abs(grad - lambda));
        }
        return residual;
    };

    double worst_coord = 0.0, worst_kkt = 0.0;

    // paper-derived instance
    {
        const double inf = std::numeric_limits<double>::infinity();
        const std::vector<double> a(5, 1.0), b{6, 12, 18, 24, 30}, lo(5, 0.0), hi(5, inf);
        const auto u = consumers::solve_qp(a, b, lo, hi, 10.0);
        const std::vector<double> expected{19.0 / 3.0, 10.0 / 3.0, 1.0 / 3.0, 0.0, 0.0};
        for (std::size_t i = 0; i < 5; ++i)
            worst_coord = std::max(worst_coord, std::abs(u[i] - expected[i]));
        worst_kkt = std::max(worst_kkt, kkt_residual(a, b, lo, hi, 10.0, u));
    }

    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> adist(0.2, 3.0);
    std::uniform_real_distribution<double> bdist(-5.0, 5.0);
    std::uniform_real_distribution<double> codist(-2.0, 2.0);
    std::uniform_real_distribution<double> widist(0.2, 0.7);
    std::uniform_real_distribution<double> mix(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 3;
        std::vector<double> a(n), b(n), lo(n), hi(n);
        double sum_lo = 0.0, sum_hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = adist(rng);
            b[i] = bdist(rng);
            lo[i] = codist(rng);
            hi[i] = lo[i] + widist(rng);
            sum_lo += lo[i];
            sum_hi += hi[i];
        }
        const double target = sum_lo + mix(rng) * (sum_hi - sum_lo);
        const auto u = consumers::solve_qp(a, b, lo, hi, target);
        const auto oracle = testing::qp_grid_oracle(a, b, lo, hi, target, 1e-3);
        if (oracle.empty()) return false;
        for (std::size_t i = 0; i < n; ++i)
            worst_coord = std::max(worst_coord, std::abs(u[i] - oracle[i]));
        worst_kkt = std::max(worst_kkt, kkt_residual(a, b, lo, hi, target, u));
    }
    std::ostringstream out;
    out << "worst coordinate error vs oracle = " << worst_coord
        << " (tol 5e-3), worst KKT residual = " << worst_kkt << " (tol 1e-8)";
    detail = out.str();
    return worst_coord <= 5e-3 && worst_kkt <= 1e-8;
}

// Criterion 7: bounded inputs keep the output bounded under adversarial play.
bool criterion_stability_stress(std::string& detail) {
    const auto f = TransferFunction::first_order_lag(1.5);
    const auto plants = surrogate_plants();
    const auto specs = demo_specs(1e6, -1e6);
    const auto gamma = GammaBounds::symmetric(std::vector<double>(5, 0.5));
    const double horizon = 600.0;
    const auto steps = static_cast<std::size_t>(std::llround(horizon / kStep));

    double worst_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        // piecewise-constant reference switching inside [-100, 100]
        SignalTrace ref{kStep, std::vector<double>(steps, 0.0)};
        std::mt19937_64 ref_rng(seed * 977 + 1);
        std::uniform_real_distribution<double> level(-100.0, 100.0);
        double current = level(ref_rng);
        for (std::size_t k = 0; k < steps; ++k) {
            if (k % 5000 == 0) current = level(ref_rng);
            ref.samples[k] = current;
        }

        auto dist = gaussian(seed, 10.0);
        auto d_trace = dist.generate(steps, kStep);
        double max_d = 0.0, max_r = 100.0;
        for (double& x : d_trace.samples) {
            x = std::clamp(x, -100.0, 100.0);
            max_d = std::max(max_d, std::abs(x));
        }
        DisturbanceGen custom;
        custom.mode = DisturbanceMode::Custom;
        custom.custom = d_trace;

        const auto trace = run_loop(plants, plants, f, gamma, specs,
                                    DecisionStrategy::adversarial(seed), ref, custom);
        double max_y = 0.0;
        for (double y : trace.y.samples) {
            if (!std::isfinite(y)) {
                detail = "trace diverged";
                return false;
            }
            max_y = std::max(max_y, std::abs(y));
        }
        worst_ratio = std::max(worst_ratio, max_y / (max_r + max_d));
    }
    std::ostringstream out;
    out << "worst max|y| / (max|r| + max|d|) = " << worst_ratio << " (limit 10)";
    detail = out.str();
    return worst_ratio <= 10.0;
}

// Criterion 8: discretized step responses and the H-infinity norm.
bool criterion_lti_numerics(std::string& detail) {
    double worst = 0.0;
    for (double tau : {1.5, 10.0}) {
        auto sim = lti::discretize(TransferFunction::first_order_lag(tau), kStep);
        std::vector<double> resp;
        const auto steps = static_cast<std::size_t>(std::llround(6.0 * tau / kStep));
        for (std::size_t k = 0; k < steps; ++k) resp.push_back(sim.step_sim(1.0));
        for (double t : {tau, 2.0 * tau, 5.0 * tau}) {
            const auto k = static_cast<std::size_t>(std::llround(t / kStep));
            worst = std::max(worst, std::abs(resp[k] - (1.0 - std::exp(-t / tau))));
        }
    }
    const double norm = lti::hinf_norm(TransferFunction::first_order_lag(1.5));
    std::ostringstream out;
    out << "worst step-response error = " << worst << " (tol 1e-3), ||F||_inf = " << norm
        << " (tol 1e-6 about 1)";
    detail = out.str();
    return worst <= 1e-3 && std::abs(norm - 1.0) <= 1e-6;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 steady-state tracking", criterion_tracking},
        {"2 case A/B equivalence", criterion_case_equivalence},
        {"3 cost reduction", criterion_cost_reduction},
        {"4 disturbance bound + falsification", criterion_bound},
        {"5 nominal identity", criterion_nominal_identity},
        {"6 QP oracle equivalence", criterion_qp_oracle},
        {"7 stability stress", criterion_stability_stress},
        {"8 LTI core numerics", criterion_lti_numerics},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", criterion.name.c_str(),
                    detail.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
