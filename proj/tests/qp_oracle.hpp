#pragma once

// Test-only brute-force oracle for the box-constrained allocation QP.
// Grids the first n-1 coordinates over their sum-feasible ranges,
// eliminates the last through the coupling sum, keeps the cheapest point.
// Independent of the dual-bisection solver under test.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace weakctl::testing {

inline std::vector<double> qp_grid_oracle(const std::vector<double>& a,
                                          const std::vector<double>& b,
                                          const std::vector<double>& lo,
                                          const std::vector<double>& hi,
                                          double target, double resolution) {
    const std::size_t n = a.size();
    std::vector<double> best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> u(n);

    auto consider = [&]() {
        u[n - 1] = target - std::accumulate(u.begin(), u.end() - 1, 0.0);
        if (u[n - 1] < lo[n - 1] - 1e-12 || u[n - 1] > hi[n - 1] + 1e-12) return;
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += a[i] * u[i] * u[i] + b[i] * u[i];
        if (c < best_cost) {
            best_cost = c;
            best = u;
        }
    };

    // Range for coordinate i that keeps the residual sum reachable by the
    // coordinates after it; both endpoints are always sampled.
    auto feasible_range = [&](std::size_t i, double chosen_sum) {
        double rest_lo = 0.0, rest_hi = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            rest_lo += lo[j];
            rest_hi += hi[j];
        }
        const double residual = target - chosen_sum;
        return std::pair<double, double>{std::max(lo[i], residual - rest_hi),
                                         std::min(hi[i], residual - rest_lo)};
    };
    auto scan = [&](std::size_t i, double chosen_sum, auto&& body) {
        const auto [from, to] = feasible_range(i, chosen_sum);
        if (from > to + 1e-12) return;
        for (double x = from; x < to; x += resolution) {
            u[i] = x;
            body();
        }
        u[i] = to;
        body();
    };

    if (n == 1) {
        u[0] = target;
        consider();
        return best;
    }
    scan(0, 0.0, [&]() {
        if (n == 2)
            consider();
        else
            scan(1, u[0], [&]() { consider(); });
    });
    return best;
}

} // namespace weakctl::testing
