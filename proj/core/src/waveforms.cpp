#include "acdma/waveforms.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace acdma {

namespace {

constexpr double edge_slack = 1e-12;

std::string shortest(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return ec == std::errc{} ? std::string(buf, end) : std::to_string(x);
}

double squared_rrc(double omega, double rho, double tc)
{
    const double a = std::abs(omega);
    const double flat_edge = (1.0 - rho) * pi / tc;
    const double stop_edge = (1.0 + rho) * pi / tc;
    if (a <= flat_edge) {
        return tc;
    }
    if (rho == 0.0 || a > stop_edge * (1.0 + edge_slack)) {
        return 0.0;
    }
    return 0.5 * tc * (1.0 + std::cos(tc / (2.0 * rho) * (a - flat_edge)));
}

cplx interpolate(const TabulatedShape& t, double omega)
{
    const auto it = std::upper_bound(t.omega.begin(), t.omega.end(), omega);
    if (it == t.omega.begin()) {
        return t.value.front();
    }
    if (it == t.omega.end()) {
        return t.value.back();
    }
    const auto hi = static_cast<std::size_t>(it - t.omega.begin());
    const std::size_t lo = hi - 1;
    const double frac = (omega - t.omega[lo]) / (t.omega[hi] - t.omega[lo]);
    return t.value[lo] + frac * (t.value[hi] - t.value[lo]);
}

} // namespace

ChipWaveform::ChipWaveform(Shape shape, double chip_interval)
    : shape_(std::move(shape)), chip_interval_(chip_interval)
{
    if (!(chip_interval > 0.0) || !std::isfinite(chip_interval)) {
        throw Error(ErrorCode::InvalidArgument, "chip interval must be positive");
    }
    const double tc = chip_interval;
    if (const auto* s = std::get_if<SincShape>(&shape_)) {
        if (!(s->relative_bandwidth > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "sinc relative bandwidth must be positive");
        }
        bandwidth_ = s->relative_bandwidth / (2.0 * tc);
        energy_ = 1.0;
    } else if (const auto* r = std::get_if<RootRaisedCosineShape>(&shape_)) {
        if (!(r->roll_off >= 0.0 && r->roll_off <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "roll-off must lie in [0, 1]");
        }
        bandwidth_ = (1.0 + r->roll_off) / (2.0 * tc);
        energy_ = 1.0;
    } else {
        auto& t = std::get<TabulatedShape>(shape_);
        if (t.omega.size() < 2 || t.omega.size() != t.value.size()) {
            throw Error(ErrorCode::InvalidArgument, "tabulated pulse needs at least two (omega, value) samples");
        }
        for (std::size_t i = 1; i < t.omega.size(); ++i) {
            if (!(t.omega[i] > t.omega[i - 1])) {
                throw Error(ErrorCode::InvalidArgument, "tabulated frequencies must be strictly increasing");
            }
        }
        // Support closure: any sample that is nonzero or adjacent to a nonzero one.
        double edge = 0.0;
        double energy = 0.0;
        const std::size_t n = t.omega.size();
        for (std::size_t i = 0; i < n; ++i) {
            const bool live = t.value[i] != cplx{} || (i > 0 && t.value[i - 1] != cplx{}) ||
                              (i + 1 < n && t.value[i + 1] != cplx{});
            if (live) {
                edge = std::max(edge, std::abs(t.omega[i]));
            }
            if (i + 1 < n) {
                const cplx a = t.value[i];
                const cplx b = t.value[i + 1];
                const double h = t.omega[i + 1] - t.omega[i];
                // Exact integral of |a + (b - a) x|^2 over x in [0, 1].
                energy += h * (std::norm(a) + std::real(a * std::conj(b)) + std::norm(b)) / 3.0;
            }
        }
        bandwidth_ = edge / two_pi;
        energy_ = energy / two_pi;
        if (!(energy_ > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "tabulated pulse has zero energy");
        }
    }
}

ChipWaveform ChipWaveform::sinc(double relative_bandwidth, double chip_interval)
{
    return ChipWaveform(SincShape{relative_bandwidth}, chip_interval);
}

ChipWaveform ChipWaveform::root_raised_cosine(double roll_off, double chip_interval)
{
    return ChipWaveform(RootRaisedCosineShape{roll_off}, chip_interval);
}

ChipWaveform ChipWaveform::tabulated(std::vector<double> omega, std::vector<cplx> value, double chip_interval)
{
    return ChipWaveform(TabulatedShape{std::move(omega), std::move(value)}, chip_interval);
}

ChipWaveform ChipWaveform::load_table(const std::filesystem::path& path, double chip_interval)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open waveform table " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::InvalidArgument, "waveform table is missing its header row");
    }
    std::vector<double> omega;
    std::vector<cplx> value;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double w = 0.0;
        double re = 0.0;
        double im = 0.0;
        if (!(fields >> w >> re)) {
            throw Error(ErrorCode::InvalidArgument, "malformed waveform table row " + std::to_string(row));
        }
        if (!(fields >> im)) {
            im = 0.0;
        }
        omega.push_back(w);
        value.emplace_back(re, im);
    }
    return tabulated(std::move(omega), std::move(value), chip_interval);
}

cplx ChipWaveform::spectrum(double omega) const
{
    if (!std::isfinite(omega)) {
        throw Error(ErrorCode::InvalidArgument, "frequency must be finite");
    }
    if (const auto* t = std::get_if<TabulatedShape>(&shape_)) {
        if (omega < t->omega.front() || omega > t->omega.back()) {
            throw Error(ErrorCode::OutOfTabulatedRange, "omega = " + shortest(omega));
        }
        return interpolate(*t, omega);
    }
    return spectrum_or_zero(omega);
}

cplx ChipWaveform::spectrum_or_zero(double omega) const
{
    const double tc = chip_interval_;
    if (std::abs(omega) > support_edge() * (1.0 + edge_slack)) {
        return {};
    }
    if (const auto* s = std::get_if<SincShape>(&shape_)) {
        return {std::sqrt(tc / s->relative_bandwidth), 0.0};
    }
    if (const auto* r = std::get_if<RootRaisedCosineShape>(&shape_)) {
        return {std::sqrt(squared_rrc(omega, r->roll_off, tc)), 0.0};
    }
    const auto& t = std::get<TabulatedShape>(shape_);
    if (omega < t.omega.front() || omega > t.omega.back()) {
        return {};
    }
    return interpolate(t, omega);
}

int ChipWaveform::min_oversampling() const
{
    const double need = 2.0 * bandwidth_ * chip_interval_;
    return std::max(1, static_cast<int>(std::ceil(need - 1e-12)));
}

std::string ChipWaveform::describe() const
{
    if (const auto* s = std::get_if<SincShape>(&shape_)) {
        return "sinc:" + shortest(s->relative_bandwidth);
    }
    if (const auto* r = std::get_if<RootRaisedCosineShape>(&shape_)) {
        return "rrc:" + shortest(r->roll_off);
    }
    return "table:" + std::to_string(std::get<TabulatedShape>(shape_).omega.size()) + "-samples";
}

double numerical_energy(const ChipWaveform& w, std::size_t samples)
{
    if (samples < 2) {
        throw Error(ErrorCode::EmptyGrid, "energy quadrature needs at least two samples");
    }
    const double edge = w.support_edge();
    const double h = 2.0 * edge / static_cast<double>(samples - 1);
    std::vector<double> f(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        f[i] = std::norm(w.spectrum_or_zero(-edge + h * static_cast<double>(i)));
    }
    return integrate_uniform(f, h) / two_pi;
}

ChipWaveform parse_waveform(const std::string& text, double chip_interval)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "waveform must look like sinc:<alpha>, rrc:<rho> or table:<csv>");
    }
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "table") {
        return ChipWaveform::load_table(arg, chip_interval);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
        throw Error(ErrorCode::InvalidArgument, "bad waveform parameter '" + arg + "'");
    }
    if (kind == "sinc") {
        return ChipWaveform::sinc(value, chip_interval);
    }
    if (kind == "rrc") {
        return ChipWaveform::root_raised_cosine(value, chip_interval);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown waveform kind '" + kind + "'");
}

void check_oversampling(const ChipWaveform& w, int r)
{
    if (r < 1) {
        throw Error(ErrorCode::InvalidArgument, "oversampling factor must be positive");
    }
    if (2.0 * w.bandwidth() * w.chip_interval() > static_cast<double>(r) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::UndersampledConfiguration,
                    "r = " + std::to_string(r) + " < 2 B Tc = " + shortest(2.0 * w.bandwidth() * w.chip_interval()));
    }
}

double wrap_frequency(double omega)
{
    double w = std::remainder(omega, two_pi); // [-pi, pi]
    if (w <= -pi) {
        w += two_pi;
    }
    return w;
}

std::vector<int> alias_window(int r, double omega)
{
    const double w = wrap_frequency(omega);
    const int down = w >= 0.0 ? r / 2 : (r - 1) / 2;
    std::vector<int> nu(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        nu[static_cast<std::size_t>(i)] = -down + i;
    }
    return nu;
}

namespace {

struct Aliases {
    double omega;                 // wrapped
    std::vector<double> freq;     // Omega + 2 pi nu
    std::vector<cplx> conj_phi;   // conj(Phi(freq / Tc))
};

Aliases aliases(const ChipWaveform& w, int r, double omega)
{
    check_oversampling(w, r);
    Aliases a;
    a.omega = wrap_frequency(omega);
    const double tc = w.chip_interval();
    for (int nu : alias_window(r, a.omega)) {
        const double f = a.omega + two_pi * nu;
        a.freq.push_back(f);
        a.conj_phi.push_back(std::conj(w.spectrum_or_zero(f / tc)));
    }
    return a;
}

cplx alias_sum(const Aliases& a, double tau, double tc)
{
    cplx acc{};
    for (std::size_t i = 0; i < a.freq.size(); ++i) {
        if (a.conj_phi[i] != cplx{}) {
            acc += std::polar(1.0, tau * a.freq[i] / tc) * a.conj_phi[i];
        }
    }
    return acc / tc;
}

} // namespace

cplx sampled_spectrum(const ChipWaveform& w, int r, double omega, double tau)
{
    return alias_sum(aliases(w, r, omega), tau, w.chip_interval());
}

DelayVector delta_vector(const ChipWaveform& w, int r, double omega, double tau)
{
    const Aliases a = aliases(w, r, omega);
    const double tc = w.chip_interval();
    DelayVector d{r, a.omega, tau, ComplexVector(r)};
    for (int s = 0; s < r; ++s) {
        d.components(s) = alias_sum(a, tau - static_cast<double>(s) * tc / r, tc);
    }
    return d;
}

ComplexMatrix q_delay_free(const ChipWaveform& w, int r, double omega)
{
    const Aliases a = aliases(w, r, omega);
    const double tc = w.chip_interval();
    ComplexMatrix q = ComplexMatrix::Zero(r, r);
    for (std::size_t i = 0; i < a.freq.size(); ++i) {
        const double mag2 = std::norm(a.conj_phi[i]) / (tc * tc);
        if (mag2 == 0.0) {
            continue;
        }
        for (int k = 0; k < r; ++k) {
            for (int l = 0; l < r; ++l) {
                q(k, l) += mag2 * std::polar(1.0, -static_cast<double>(k - l) * a.freq[i] / r);
            }
        }
    }
    return q;
}

QSplit q_split(const ChipWaveform& w, int r, double omega, double tau)
{
    const DelayVector d = delta_vector(w, r, omega, tau);
    QSplit q;
    q.full = d.components * d.components.adjoint();
    q.delay_free = q_delay_free(w, r, omega);
    q.oscillating = q.full - q.delay_free;
    return q;
}

QEigen q_eigendecomposition(const ChipWaveform& w, int r, double omega)
{
    const Aliases a = aliases(w, r, omega);
    const double tc = w.chip_interval();
    QEigen e{ComplexMatrix(r, r), RealVector(r)};
    const double norm = 1.0 / std::sqrt(static_cast<double>(r));
    for (int s = 0; s < r; ++s) {
        const double f = a.freq[static_cast<std::size_t>(s)];
        for (int i = 0; i < r; ++i) {
            e.basis(i, s) = norm * std::polar(1.0, -static_cast<double>(i) * f / r);
        }
        e.diagonal(s) = static_cast<double>(r) * std::norm(a.conj_phi[static_cast<std::size_t>(s)]) / (tc * tc);
    }
    return e;
}

} // namespace acdma
