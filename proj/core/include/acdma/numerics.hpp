#pragma once

// Numeric kernel shared by the analytic solvers and the Monte Carlo engine:
// Hermitian positive-definite solves, quadrature on uniform grids, damped
// fixed-point iteration and bracketed root finding.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "acdma/error.hpp"

namespace acdma {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// max|M - M^H| <= rel_tol * max|M|.
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12);

/// Solves A x = b for Hermitian positive-definite A with a Cholesky
/// factorization. Throws ErrorCode::NotPositiveDefinite on a non-positive pivot.
ComplexVector hermitian_solve(const ComplexMatrix& a, const ComplexVector& b);
ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// Inverse of a Hermitian positive-definite matrix, symmetrized.
ComplexMatrix hermitian_inverse(const ComplexMatrix& a);

/// Uniformly spaced normalized frequencies covering (-pi, pi]. Points are
/// cell midpoints -pi + (m + 1/2) * 2pi/M, so the band edges are never sampled.
class FrequencyGrid {
public:
    explicit FrequencyGrid(std::size_t count);

    std::size_t size() const noexcept { return points_.size(); }
    double spacing() const noexcept { return spacing_; }
    double operator[](std::size_t m) const { return points_[m]; }
    std::span<const double> points() const noexcept { return points_; }

private:
    std::vector<double> points_;
    double spacing_;
};

/// Closed trapezoidal rule over samples that include both interval endpoints.
double integrate_uniform(std::span<const double> samples, double spacing);
cplx integrate_uniform(std::span<const cplx> samples, double spacing);

/// Rectangle sum for cell-midpoint samples of a periodic (or compactly
/// supported) integrand; this is the trapezoidal rule on a periodic grid.
double integrate_periodic(std::span<const double> samples, double spacing);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(std::size_t count);

struct FixedPointOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 10000;
    double damping = 1.0;
    /// Halve the damping whenever the residual fails to decrease.
    bool adaptive_damping = true;
    double min_damping = 1.0 / 1024.0;
};

struct FixedPointReport {
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    double damping_used = 1.0;
};

namespace detail {

inline double sup_distance(double a, double b) { return std::abs(a - b); }
inline bool finite(double x) { return std::isfinite(x); }

template <typename Derived>
double sup_distance(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived>& b)
{
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool finite(const Eigen::MatrixBase<Derived>& x)
{
    return x.allFinite();
}

void check_fixed_point_options(const FixedPointOptions& options);

} // namespace detail

/// Iterates x <- (1-d) x + d map(x) until sup|map(x) - x| <= tolerance or the
/// iteration budget is exhausted. Non-convergence is reported, never thrown;
/// a non-finite iterate throws ErrorCode::Divergence.
template <typename State, typename Map>
std::pair<State, FixedPointReport> fixed_point(Map&& map, State init, const FixedPointOptions& options = {})
{
    detail::check_fixed_point_options(options);

    State x = std::move(init);
    FixedPointReport report;
    double damping = options.damping;
    double previous = std::numeric_limits<double>::infinity();

    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        State mapped = map(x);
        if (!detail::finite(mapped)) {
            throw Error(ErrorCode::Divergence, "non-finite state at iteration " + std::to_string(it));
        }
        const double residual = detail::sup_distance(mapped, x);
        report.iterations = it;
        report.final_residual = residual;

        if (options.adaptive_damping && residual >= previous && damping > options.min_damping) {
            damping = std::max(options.min_damping, 0.5 * damping);
        }
        previous = residual;

        if (damping == 1.0) {
            x = std::move(mapped);
        } else {
            x = State((1.0 - damping) * x + damping * mapped);
        }
        if (residual <= options.tolerance) {
            report.converged = true;
            break;
        }
    }
    report.damping_used = damping;
    return {std::move(x), report};
}

/// Bisection for a sign change of f on [lo, hi]; returns a root within tol.
/// Throws ErrorCode::Bracket when f(lo) and f(hi) share a strict sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Kolmogorov-Smirnov distance between the empirical distributions of two samples.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// 10 log10(x) and its inverse.
double to_db(double linear);
double from_db(double db);

} // namespace acdma
