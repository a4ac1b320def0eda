#pragma once

// Chip-pulse spectra and the frequency/delay objects built from them: the
// sampled spectrum phi(Omega, tau), the oversampled delay vector, the split
// of its outer product into a delay-free and an oscillating part, and the
// eigendecomposition of the delay-free part.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "acdma/numerics.hpp"

namespace acdma {

struct SincShape {
    double relative_bandwidth; // alpha
};

struct RootRaisedCosineShape {
    double roll_off; // rho
};

struct TabulatedShape {
    std::vector<double> omega; // rad/s, strictly increasing
    std::vector<cplx> value;
};

/// Spectrum Phi(omega) of the received chip pulse. Immutable once built.
///
/// Energies follow E = (1/2pi) * integral |Phi(omega)|^2 d omega, so the
/// built-in sinc and root-raised-cosine pulses have unit energy.
class ChipWaveform {
public:
    using Shape = std::variant<SincShape, RootRaisedCosineShape, TabulatedShape>;

    static ChipWaveform sinc(double relative_bandwidth, double chip_interval = 1.0);
    static ChipWaveform root_raised_cosine(double roll_off, double chip_interval = 1.0);
    /// Linear interpolation between samples; the support ends where the table does.
    static ChipWaveform tabulated(std::vector<double> omega, std::vector<cplx> value, double chip_interval = 1.0);
    /// Reads a CSV with a header row and columns omega, real[, imag].
    static ChipWaveform load_table(const std::filesystem::path& path, double chip_interval = 1.0);

    /// Phi(omega). Zero outside the support; tabulated pulses throw
    /// ErrorCode::OutOfTabulatedRange outside the tabulated frequencies.
    cplx spectrum(double omega) const;

    /// Phi(omega), returning zero anywhere outside the support.
    cplx spectrum_or_zero(double omega) const;

    double chip_interval() const noexcept { return chip_interval_; }
    double energy() const noexcept { return energy_; }
    /// One-sided bandwidth B in Hz; Phi vanishes for |omega| > 2 pi B.
    double bandwidth() const noexcept { return bandwidth_; }
    double support_edge() const noexcept { return two_pi * bandwidth_; }
    /// Smallest oversampling factor r with B <= r / (2 Tc).
    int min_oversampling() const;

    const Shape& shape() const noexcept { return shape_; }
    /// "sinc:<alpha>", "rrc:<rho>" or "table:<n samples>".
    std::string describe() const;

private:
    ChipWaveform(Shape shape, double chip_interval);

    Shape shape_;
    double chip_interval_;
    double energy_ = 0.0;
    double bandwidth_ = 0.0;
};

/// Numerical (1/2pi) * integral |Phi|^2 over the support with a closed
/// trapezoid rule on `samples` points. Used to cross-check energy().
double numerical_energy(const ChipWaveform& w, std::size_t samples = 200001);

/// Parses "sinc:<alpha>", "rrc:<rho>" or "table:<csv path>".
ChipWaveform parse_waveform(const std::string& text, double chip_interval = 1.0);

/// Throws ErrorCode::UndersampledConfiguration unless B <= r / (2 Tc).
void check_oversampling(const ChipWaveform& w, int r);

/// The r consecutive alias indices nu with |Omega + 2 pi nu| <= r pi, in
/// ascending order, for Omega in (-pi, pi]. Omega = 0 counts as positive.
std::vector<int> alias_window(int r, double omega);

/// Wraps a normalized frequency into (-pi, pi].
double wrap_frequency(double omega);

/// phi(Omega, tau) = (1/Tc) sum_nu exp(j tau (Omega + 2 pi nu)/Tc) conj(Phi((Omega + 2 pi nu)/Tc)).
cplx sampled_spectrum(const ChipWaveform& w, int r, double omega, double tau);

struct DelayVector {
    int oversampling;
    double omega;
    double tau;
    /// Component s (0-based) is phi(Omega, tau - s Tc / r).
    ComplexVector components;
};

DelayVector delta_vector(const ChipWaveform& w, int r, double omega, double tau);

struct QSplit {
    ComplexMatrix full;        // Delta Delta^H
    ComplexMatrix delay_free;  // Q(Omega)
    ComplexMatrix oscillating; // full - delay_free
};

QSplit q_split(const ChipWaveform& w, int r, double omega, double tau);

/// Delay-free part Q(Omega) evaluated from the alias window directly.
ComplexMatrix q_delay_free(const ChipWaveform& w, int r, double omega);

struct QEigen {
    ComplexMatrix basis;  // unitary U(Omega), column s is e(Omega + 2 pi nu_s)
    RealVector diagonal;  // D(Omega)_ss = (r / Tc^2) |Phi((Omega + 2 pi nu_s)/Tc)|^2
};

QEigen q_eigendecomposition(const ChipWaveform& w, int r, double omega);

} // namespace acdma
