#include "weakctl/consumers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace weakctl::consumers {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

double primal_sum(double lambda, const std::vector<double>& a,
                  const std::vector<double>& b, const std::vector<double>& lo,
                  const std::vector<double>& hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += clamp((lambda - b[i]) / (2.0 * a[i]), lo[i], hi[i]);
    return s;
}

} // namespace

std::vector<double> solve_qp(const std::vector<double>& a,
                             const std::vector<double>& b,
                             const std::vector<double>& lo,
                             const std::vector<double>& hi, double target) {
    const std::size_t n = a.size();
    if (b.size() != n || lo.size() != n || hi.size() != n)
        throw DimensionMismatch("solve_qp: input length mismatch");
    double sum_lo = 0.0, sum_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] <= 0.0) throw Error("solve_qp: quadratic coefficients must be positive");
        if (lo[i] > hi[i]) throw InfeasibleBox("solve_qp: empty box");
        sum_lo += lo[i];
        sum_hi += hi[i];
    }
    if (sum_lo > target + 1e-12 || sum_hi < target - 1e-12)
        throw InfeasibleBox("solve_qp: boxes cannot meet the coupling sum");

    // Bracket the dual variable; the primal sum is nondecreasing in lambda.
    double lam_lo = -1.0, lam_hi = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double at_lo = 2.0 * a[i] * lo[i] + b[i];
        const double at_hi = 2.0 * a[i] * hi[i] + b[i];
        if (std::isfinite(at_lo)) lam_lo = std::min(lam_lo, at_lo - 1.0);
        if (std::isfinite(at_hi)) lam_hi = std::max(lam_hi, at_hi + 1.0);
    }
    for (int it = 0; it < 200 && primal_sum(lam_lo, a, b, lo, hi) > target; ++it)
        lam_lo -= std::max(1.0, std::abs(lam_lo));
    for (int it = 0; it < 200 && primal_sum(lam_hi, a, b, lo, hi) < target; ++it)
        lam_hi += std::max(1.0, std::abs(lam_hi));

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lam_lo + lam_hi);
        if (primal_sum(mid, a, b, lo, hi) < target)
            lam_lo = mid;
        else
            lam_hi = mid;
    }
    double lambda = 0.5 * (lam_lo + lam_hi);

    // Exact dual step on the active set identified by the bisection.
    double bound_sum = 0.0, inv_a = 0.0, offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double raw = (lambda - b[i]) / (2.0 * a[i]);
        if (raw <= lo[i]) {
            bound_sum += lo[i];
        } else if (raw >= hi[i]) {
            bound_sum += hi[i];
        } else {
            inv_a += 1.0 / (2.0 * a[i]);
            offset += b[i] / (2.0 * a[i]);
        }
    }
    if (inv_a > 0.0) {
        const double exact = (target - bound_sum + offset) / inv_a;
        if (std::abs(primal_sum(exact, a, b, lo, hi) - target) <=
            std::abs(primal_sum(lambda, a, b, lo, hi) - target))
            lambda = exact;
    }

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = clamp((lambda - b[i]) / (2.0 * a[i]), lo[i], hi[i]);
    return u;
}

namespace {

struct Box {
    std::vector<double> lo, hi;
    double sum_lo = 0.0, sum_hi = 0.0;
    bool empty = false;
};

Box intersect(const std::vector<ConsumerSpec>& specs, const Request& req) {
    Box box;
    const std::size_t n = specs.size();
    box.lo.resize(n);
    box.hi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        box.lo[i] = std::max(req.lo[i], specs[i].floor);
        box.hi[i] = std::min(req.hi[i], specs[i].cap);
        if (box.lo[i] > box.hi[i]) box.empty = true;
        box.sum_lo += box.lo[i];
        box.sum_hi += box.hi[i];
    }
    return box;
}

// Vertex-heavy feasible sample: random bound per coordinate, then the
// coupling residual is pushed through coordinates with remaining room.
std::vector<double> adversarial_point(const Box& box, double target,
                                      std::mt19937_64& rng) {
    const std::size_t n = box.lo.size();
    std::vector<double> u(n);
    std::uniform_int_distribution<int> coin(0, 1);
    auto finite_or = [](double x, double fallback) {
        return std::isfinite(x) ? x : fallback;
    };
    const double spread = std::abs(target) + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = finite_or(box.lo[i], target / static_cast<double>(n) - spread);
        const double hi = finite_or(box.hi[i], target / static_cast<double>(n) + spread);
        u[i] = coin(rng) ? hi : lo;
    }
    double residual = target - std::accumulate(u.begin(), u.end(), 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
        if (std::abs(residual) <= 1e-15) break;
        const double room = residual > 0.0 ? box.hi[i] - u[i] : box.lo[i] - u[i];
        const double take = residual > 0.0 ? std::min(residual, room)
                                           : std::max(residual, room);
        u[i] += take;
        residual -= take;
    }
    return u;
}

} // namespace

Allocation decide(const std::vector<ConsumerSpec>& specs, const Request& req,
                  const DecisionStrategy& strategy) {
    std::mt19937_64 rng(strategy.seed);
    return decide(specs, req, strategy, rng);
}

Allocation decide(const std::vector<ConsumerSpec>& specs, const Request& req,
                  const DecisionStrategy& strategy, std::mt19937_64& rng) {
    const std::size_t n = specs.size();
    if (req.size() != n)
        throw DimensionMismatch("decide: spec count does not match the request");

    const Box box = intersect(specs, req);

    // Infeasible request: saturate toward the target and report the slack.
    Allocation alloc;
    if (box.empty) {
        alloc.u.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            alloc.u[i] = clamp(req.center, specs[i].floor, specs[i].cap);
        alloc.feasible = false;
        alloc.slack = req.sum_target - std::accumulate(alloc.u.begin(), alloc.u.end(), 0.0);
        return alloc;
    }
    if (box.sum_lo > req.sum_target + 1e-12) {
        alloc.u = box.lo;
        alloc.feasible = false;
        alloc.slack = req.sum_target - box.sum_lo;
        return alloc;
    }
    if (box.sum_hi < req.sum_target - 1e-12) {
        alloc.u = box.hi;
        alloc.feasible = false;
        alloc.slack = req.sum_target - box.sum_hi;
        return alloc;
    }

    switch (strategy.kind) {
        case StrategyKind::Selfish: {
            std::vector<double> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = specs[i].a;
                b[i] = specs[i].b;
            }
            alloc.u = solve_qp(a, b, box.lo, box.hi, req.sum_target);
            break;
        }
        case StrategyKind::EqualSplit: {
            bool admissible = true;
            for (std::size_t i = 0; i < n; ++i)
                if (req.center < box.lo[i] || req.center > box.hi[i]) admissible = false;
            if (admissible) {
                alloc.u.assign(n, req.center);
            } else {
                // Nearest feasible point to the equal split.
                std::vector<double> a(n, 1.0), b(n);
                for (std::size_t i = 0; i < n; ++i) b[i] = -2.0 * req.center;
                alloc.u = solve_qp(a, b, box.lo, box.hi, req.sum_target);
            }
            break;
        }
        case StrategyKind::Adversarial:
            alloc.u = adversarial_point(box, req.sum_target, rng);
            break;
    }
    return alloc;
}

double delta_gain(const Request& req, const std::vector<double>& u) {
    if (u.size() != req.size())
        throw DimensionMismatch("delta_gain: action length mismatch");
    const double scale = std::abs(req.sum_target) / static_cast<double>(req.size());
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (double ui : u)
        worst = std::max(worst, std::abs(ui - req.center) / scale);
    return worst;
}

} // namespace weakctl::consumers
