#pragma once

// Large-system (K, N -> infinity, K/N -> load) limits of the linear MMSE
// detector for chip-asynchronous CDMA: the matrix fixed point over
// normalized frequency, the scalar efficiency spectral density for uniform
// delays or sub-Nyquist pulses, and the synchronous Tse-Hanly baseline.

#include <optional>
#include <vector>

#include "acdma/numerics.hpp"
#include "acdma/waveforms.hpp"

namespace acdma {

struct PowerAtom {
    double power;  // lambda = |a|^2
    double weight;
};

using PowerLaw = std::vector<PowerAtom>;

/// Single power level with probability one.
PowerLaw equal_powers(double power = 1.0);

struct PowerDelayAtom {
    double power;
    double delay;  // seconds in [0, Tc)
    double weight;
};

/// Discrete approximation of the joint received-power / delay distribution.
class PowerDelayLaw {
public:
    /// Independent product of a power law and `delay_atoms` equally spaced
    /// delays k Tc / n, k = 0..n-1 (uniform delays).
    static PowerDelayLaw uniform_delays(const PowerLaw& powers, std::size_t delay_atoms, double chip_interval);
    /// Independent product of a power law and a delay law.
    static PowerDelayLaw independent(const PowerLaw& powers, const std::vector<double>& delays,
                                     const std::vector<double>& delay_weights, double chip_interval);
    /// All users share one delay (chip-synchronous when delay = 0).
    static PowerDelayLaw point_delay(const PowerLaw& powers, double delay, double chip_interval);
    /// Arbitrary joint atoms; no structure flags are set.
    static PowerDelayLaw from_atoms(std::vector<PowerDelayAtom> atoms, double chip_interval);

    const std::vector<PowerDelayAtom>& atoms() const noexcept { return atoms_; }
    bool powers_delays_independent() const noexcept { return independent_; }
    bool delays_uniform() const noexcept { return uniform_; }
    double chip_interval() const noexcept { return chip_interval_; }

    /// Power marginal with equal powers merged.
    PowerLaw power_marginal() const;
    /// Distinct delays in ascending order.
    std::vector<double> distinct_delays() const;

private:
    PowerDelayLaw(std::vector<PowerDelayAtom> atoms, double chip_interval, bool independent, bool uniform);

    std::vector<PowerDelayAtom> atoms_;
    double chip_interval_;
    bool independent_;
    bool uniform_;
};

struct SystemLaw {
    double load;           // beta = K / N
    double noise_density;  // N0
    int oversampling;      // r
    ChipWaveform waveform;
    PowerDelayLaw law;

    /// sigma^2 = r N0 / Tc.
    double noise_variance() const { return oversampling * noise_density / waveform.chip_interval(); }
    /// E_phi / N0.
    double snr() const { return waveform.energy() / noise_density; }
};

/// Throws ErrorCode::InvalidArgument / UndersampledConfiguration for an
/// inconsistent system description.
void validate(const SystemLaw& sys);

/// Per-grid-point r x r matrices Upsilon(Omega_m).
struct UpsilonField {
    FrequencyGrid grid;
    std::vector<ComplexMatrix> matrices;
};

struct UpsilonSolution {
    UpsilonField field;
    FixedPointReport report;
};

/// Solves the matrix fixed point
///   Upsilon^-1(Omega) = sigma^2 I + beta sum_a w_a lambda_a Delta Delta^H / (1 + lambda_a c(tau_a)),
///   c(tau) = (1/2pi) integral Delta^H(Omega', tau) Upsilon(Omega') Delta(Omega', tau) dOmega',
/// starting from Upsilon = I / sigma^2. Non-convergence is reported.
UpsilonSolution solve_upsilon(const SystemLaw& sys, const FrequencyGrid& grid, const FixedPointOptions& options = {});

/// Large-system SINR (|a|^2 / 2pi) integral Delta^H Upsilon Delta dOmega of a
/// user with received power `power` and delay `delay` (reduced modulo Tc).
double sinr_user(const UpsilonField& field, const SystemLaw& sys, double power, double delay);

/// eta_k = SINR N0 / (lambda E_phi). Throws ErrorCode::ZeroPower for lambda = 0.
double efficiency_of_user(double sinr, double power, const SystemLaw& sys);

/// Weight-averaged multiuser efficiency over the atoms of sys.law.
double mean_efficiency(const UpsilonField& field, const SystemLaw& sys);

/// beta sum_a w_a lambda_a Delta Delta^H / (1 + lambda_a c(tau_a)) at grid point m,
/// i.e. Upsilon^-1(Omega_m) - sigma^2 I.
ComplexMatrix interference_matrix(const UpsilonField& field, const SystemLaw& sys, std::size_t grid_index);

struct EfficiencySpectrum {
    std::vector<double> omega;    // rad/s, midpoints over [-2 pi B, 2 pi B]
    std::vector<double> density;  // eta(omega)
    double scalar = 0.0;          // eta = (1/2pi) integral eta(omega) d omega
    FixedPointReport report;
};

struct ScalarSolveOptions {
    std::size_t grid_points = 512;
    /// With an initial value the scalar efficiency is iterated as a fixed
    /// point from it; otherwise the root of eta - g(eta) is bracketed in [0, 1].
    std::optional<double> init;
    FixedPointOptions fixed_point;
};

/// True when the scalar efficiency density applies: uniform delays
/// independent of powers, or a pulse with B <= 1/(2 Tc).
bool scalar_hypotheses_hold(const SystemLaw& sys);

/// Solves 1/eta(w) = E/|Phi(w)|^2 + (beta/Tc) sum w_l lambda / (N0/E + lambda eta) on the
/// pulse support with eta = (1/2pi) integral eta(w) dw. Throws
/// ErrorCode::HypothesisViolated when scalar_hypotheses_hold() is false.
EfficiencySpectrum solve_efficiency_scalar(const SystemLaw& sys, const ScalarSolveOptions& options = {});

/// Unique positive root of 1/eta = 1 + (beta/alpha) sum w lambda / (N0 + lambda eta).
double solve_efficiency_sinc(double load, double alpha, const PowerLaw& powers, double noise_density);

/// Tse-Hanly: 1/eta = 1 + beta sum w lambda / (N0 + lambda eta).
double solve_efficiency_sync(double load, const PowerLaw& powers, double noise_density);

/// P_self P_other / (P_self + P_other sinr); zero when both densities vanish.
double effective_interference_density(double p_self, double p_other, double sinr);

/// SINR spectral density of a user with power lambda_k at angular frequency
/// omega, given its SINR, using received power densities lambda |Phi|^2 / Tc.
double sinr_spectral_density(const SystemLaw& sys, double power, double sinr, double omega);

} // namespace acdma
