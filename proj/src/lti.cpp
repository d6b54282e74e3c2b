#include "weakctl/lti.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace weakctl::lti {

namespace {

std::vector<double> strip_leading_zeros(std::vector<double> p) {
    std::size_t i = 0;
    while (i + 1 < p.size() && p[i] == 0.0) ++i;
    p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i));
    return p;
}

} // namespace

TransferFunction::TransferFunction(std::vector<double> n, std::vector<double> d)
    : num(strip_leading_zeros(std::move(n))), den(strip_leading_zeros(std::move(d))) {
    if (den.empty() || den.front() == 0.0)
        throw Error("transfer function: denominator must be nonempty with nonzero leading coefficient");
    if (num.empty()) num = {0.0};
    if (degree_num() > degree_den())
        throw ImproperSystem("transfer function: degree(num) > degree(den)");
}

bool TransferFunction::is_stable() const {
    if (degree_den() == 0) return true;
    for (const auto& root : poly_roots(den))
        if (root.real() >= 0.0) return false;
    return true;
}

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            out[i + j] += p[i] * q[j];
    return out;
}

std::vector<double> poly_add(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out(std::max(p.size(), q.size()), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        out[out.size() - p.size() + i] += p[i];
    for (std::size_t i = 0; i < q.size(); ++i)
        out[out.size() - q.size() + i] += q[i];
    return out;
}

std::complex<double> poly_eval(const std::vector<double>& p, std::complex<double> s) {
    std::complex<double> acc = 0.0;
    for (double c : p) acc = acc * s + c;
    return acc;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& p) {
    auto q = strip_leading_zeros(p);
    const int n = static_cast<int>(q.size()) - 1;
    if (n < 1) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -q[static_cast<std::size_t>(n - i)] / q[0];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return roots;
}

DiscreteSim::DiscreteSim(Eigen::MatrixXd A, Eigen::VectorXd B, Eigen::RowVectorXd C,
                         double D, double step)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(D), step_(step) {
    if (A_.rows() != A_.cols() || B_.size() != A_.rows() || C_.size() != A_.rows())
        throw DimensionMismatch("state-space dimensions inconsistent");
    state_ = Eigen::VectorXd::Zero(A_.rows());
}

double DiscreteSim::step_sim(double input) {
    const double output = (state_.size() > 0 ? C_.dot(state_) : 0.0) + D_ * input;
    if (state_.size() > 0) state_ = A_ * state_ + B_ * input;
    return output;
}

double DiscreteSim::dc_gain() const {
    if (state_.size() == 0) return D_;
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(A_.rows(), A_.cols()) - A_;
    return C_.dot(M.partialPivLu().solve(B_)) + D_;
}

double dc_gain(const TransferFunction& tf) {
    if (tf.den.back() == 0.0)
        throw DivisionAtZero("dc_gain: denominator vanishes at s = 0");
    return tf.num.back() / tf.den.back();
}

std::complex<double> freq_response(const TransferFunction& tf, double omega) {
    const std::complex<double> s(0.0, omega);
    const auto d = poly_eval(tf.den, s);
    if (std::abs(d) == 0.0)
        throw DivisionAtZero("freq_response: denominator vanishes on the imaginary axis");
    return poly_eval(tf.num, s) / d;
}

namespace {

double magnitude_at(const TransferFunction& tf, double omega) {
    return std::abs(freq_response(tf, omega));
}

// Golden-section maximization of |G(jw)| on [lo, hi].
double golden_refine(const TransferFunction& tf, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = magnitude_at(tf, c), fd = magnitude_at(tf, d);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + b); ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - kInvPhi * (b - a);
            fc = magnitude_at(tf, c);
        } else {
            a = c; c = d; fc = fd;
            d = a + kInvPhi * (b - a);
            fd = magnitude_at(tf, d);
        }
    }
    return std::max(fc, fd);
}

} // namespace

double hinf_norm(const TransferFunction& tf, const FrequencyGrid& grid) {
    if (!tf.is_stable())
        throw UnstableSystem("hinf_norm: system is not stable");

    double best = std::abs(dc_gain(tf));
    int best_idx = -1;
    const double log_lo = std::log10(grid.omega_min);
    const double log_hi = std::log10(grid.omega_max);
    std::vector<double> omegas(static_cast<std::size_t>(grid.points));
    for (int i = 0; i < grid.points; ++i) {
        const double t = static_cast<double>(i) / (grid.points - 1);
        omegas[static_cast<std::size_t>(i)] = std::pow(10.0, log_lo + t * (log_hi - log_lo));
        const double mag = magnitude_at(tf, omegas[static_cast<std::size_t>(i)]);
        if (mag > best) {
            best = mag;
            best_idx = i;
        }
    }
    if (best_idx >= 0) {
        const double lo = omegas[static_cast<std::size_t>(std::max(0, best_idx - 1))];
        const double hi = omegas[static_cast<std::size_t>(std::min(grid.points - 1, best_idx + 1))];
        best = std::max(best, golden_refine(tf, lo, hi));
    }
    return best;
}

DiscreteSim discretize(const TransferFunction& tf, double step) {
    if (step <= 0.0) throw Error("discretize: step must be positive");
    if (tf.degree_num() > tf.degree_den())
        throw ImproperSystem("discretize: improper transfer function");

    const int n = tf.degree_den();
    // Monic denominator and numerator padded to n+1 coefficients.
    std::vector<double> a(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) a[static_cast<std::size_t>(i)] = tf.den[static_cast<std::size_t>(i)] / tf.den[0];
    std::vector<double> b(static_cast<std::size_t>(n + 1), 0.0);
    const int pad = n - tf.degree_num();
    for (std::size_t i = 0; i < tf.num.size(); ++i)
        b[static_cast<std::size_t>(pad) + i] = tf.num[i] / tf.den[0];

    const double D = b[0];
    if (n == 0)
        return DiscreteSim(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), Eigen::RowVectorXd(0), D, step);

    // Controllable canonical form.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    for (int i = 0; i < n; ++i) A(n - 1, i) = -a[static_cast<std::size_t>(n - i)];
    Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
    B(n - 1) = 1.0;
    Eigen::RowVectorXd C(n);
    for (int i = 0; i < n; ++i)
        C(i) = b[static_cast<std::size_t>(n - i)] - a[static_cast<std::size_t>(n - i)] * D;

    // Zero-order hold via the augmented matrix exponential.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
    M.topLeftCorner(n, n) = A * step;
    M.topRightCorner(n, 1) = B * step;
    const Eigen::MatrixXd E = M.exp();
    Eigen::MatrixXd Ad = E.topLeftCorner(n, n);
    Eigen::VectorXd Bd = E.topRightCorner(n, 1);

    return DiscreteSim(std::move(Ad), std::move(Bd), std::move(C), D, step);
}

double l2_norm(const SignalTrace& trace) {
    double acc = 0.0;
    for (double x : trace.samples) acc += x * x;
    return std::sqrt(trace.step * acc);
}

} // namespace weakctl::lti
