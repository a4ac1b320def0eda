#include "acdma/numerics.hpp"

#include <algorithm>

namespace acdma {

bool is_hermitian(const ComplexMatrix& m, double rel_tol)
{
    if (m.rows() != m.cols()) {
        return false;
    }
    if (m.size() == 0) {
        return true;
    }
    const double scale = m.cwiseAbs().maxCoeff();
    const double skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
    return skew <= rel_tol * scale;
}

namespace {

Eigen::LLT<ComplexMatrix> factorize(const ComplexMatrix& a, Eigen::Index rhs_rows)
{
    if (a.rows() != a.cols() || a.rows() != rhs_rows) {
        throw Error(ErrorCode::InvalidArgument, "hermitian_solve dimension mismatch");
    }
    Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "Cholesky pivot is not positive");
    }
    return llt;
}

} // namespace

ComplexVector hermitian_solve(const ComplexMatrix& a, const ComplexVector& b)
{
    return factorize(a, b.rows()).solve(b);
}

ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return factorize(a, b.rows()).solve(b);
}

ComplexMatrix hermitian_inverse(const ComplexMatrix& a)
{
    ComplexMatrix inv = hermitian_solve(a, ComplexMatrix(ComplexMatrix::Identity(a.rows(), a.cols())));
    return 0.5 * (inv + inv.adjoint());
}

FrequencyGrid::FrequencyGrid(std::size_t count)
{
    if (count == 0) {
        throw Error(ErrorCode::EmptyGrid, "frequency grid needs at least one point");
    }
    if (count % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "frequency grid size must be even");
    }
    spacing_ = two_pi / static_cast<double>(count);
    points_.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
        points_[m] = -pi + (static_cast<double>(m) + 0.5) * spacing_;
    }
}

namespace {

template <typename T>
T trapezoid(std::span<const T> samples, double spacing)
{
    if (samples.empty()) {
        throw Error(ErrorCode::EmptyGrid, "no samples to integrate");
    }
    if (samples.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "trapezoid rule needs at least two samples");
    }
    T interior{};
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        interior += samples[i];
    }
    return spacing * (interior + 0.5 * (samples.front() + samples.back()));
}

} // namespace

double integrate_uniform(std::span<const double> samples, double spacing)
{
    return trapezoid(samples, spacing);
}

cplx integrate_uniform(std::span<const cplx> samples, double spacing)
{
    return trapezoid(samples, spacing);
}

double integrate_periodic(std::span<const double> samples, double spacing)
{
    if (samples.empty()) {
        throw Error(ErrorCode::EmptyGrid, "no samples to integrate");
    }
    double sum = 0.0;
    for (double s : samples) {
        sum += s;
    }
    return spacing * sum;
}

QuadratureRule gauss_legendre(std::size_t count)
{
    if (count == 0) {
        throw Error(ErrorCode::EmptyGrid, "Gauss-Legendre rule needs at least one node");
    }
    QuadratureRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const auto n = static_cast<double>(count);
    const std::size_t half = (count + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= count; ++k) {
                const auto kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= count; ++k) {
            const auto kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[count - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[count - 1 - i] = w;
    }
    if (count % 2 == 1) {
        rule.nodes[count / 2] = 0.0;
    }
    return rule;
}

namespace detail {

void check_fixed_point_options(const FixedPointOptions& options)
{
    if (!(options.tolerance > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "fixed-point tolerance must be positive");
    }
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
    }
    if (options.max_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_iterations must be at least 1");
    }
}

} // namespace detail

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    if (!(tol > 0.0) || !(lo <= hi)) {
        throw Error(ErrorCode::InvalidArgument, "bisect needs lo <= hi and tol > 0");
    }
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw Error(ErrorCode::Bracket, "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fmid = f(mid);
        if (fmid == 0.0) {
            return mid;
        }
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double ks_distance(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyGrid, "KS distance needs two non-empty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) {
            ++i;
        }
        while (j < b.size() && b[j] <= x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

double from_db(double db)
{
    return std::pow(10.0, db / 10.0);
}

} // namespace acdma
