#pragma once

// Total capacity per chip, spectral efficiency and Eb/N0 accounting for
// large random CDMA with Gaussian inputs and linear MMSE front ends.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "acdma/large_system.hpp"

namespace acdma {

/// F(y, z) = (sqrt(y (1 + sqrt z)^2 + 1) - sqrt(y (1 - sqrt z)^2 + 1))^2.
double capacity_f(double y, double z);

/// Capacity per chip of large synchronous CDMA with Nyquist pulses and
/// equal powers, in bits/chip. snr = 0 gives 0.
double capacity_sync_closed_form(double load, double snr);

struct CapacityOptions {
    std::size_t initial_nodes = 129;
    std::size_t max_nodes = 2049;
    double relative_tolerance = 1e-5;
    ScalarSolveOptions scalar;
};

/// C = (beta / ln 2) int_0^snr sum w lambda eta_g / (1 + lambda g eta_g) dg, with
/// eta_g the scalar efficiency at SNR g (N0 = E_phi / g). Gauss-Legendre nodes
/// in t = log(1 + g) on [0, log(1 + snr)] are refined (n -> 2n - 1) until the
/// relative change is below options.relative_tolerance. The SNR is sys.snr().
double capacity_constrained(const SystemLaw& sys, const CapacityOptions& options = {});

/// Gamma = C / (Tc B) with B the one-sided bandwidth. Throws ZeroBandwidth for B = 0.
double spectral_efficiency(double capacity_per_chip, const ChipWaveform& waveform);

/// Eb/N0 = beta snr / C (linear).
double ebn0(double load, double snr, double capacity_per_chip);

/// Solves beta snr / C(snr) = target (linear) by bisection on log snr over
/// [snr_min, snr_max]. Throws ErrorCode::UnreachableEbN0 when the target is
/// not bracketed.
double snr_for_ebn0(double target_ebn0, double load, const std::function<double(double)>& capacity,
                    double snr_min = 1e-6, double snr_max = 1e8);

struct CapacityResult {
    double capacity_per_chip = 0.0;
    double spectral_efficiency = 0.0;
    double snr = 0.0;
    double eb_n0 = 0.0;
    double load = 0.0;
    double bandwidth_chip_product = 0.0;
};

CapacityResult make_capacity_result(double load, double snr, double capacity_per_chip, const ChipWaveform& waveform);

/// Constrained capacity for a waveform with uniform, power-independent delays
/// at the given SNR (E_phi / N0), equal powers.
double capacity_uniform_delays(double load, double snr, const ChipWaveform& waveform, int oversampling,
                               const CapacityOptions& options = {});

struct Figure2Row {
    double alpha = 0.0;
    std::optional<double> gamma_async;
    std::optional<double> gamma_sync;
};

/// Spectral efficiency versus normalized bandwidth for sinc pulses at fixed
/// Eb/N0 (linear). Unreachable points are left empty.
std::vector<Figure2Row> figure2_rows(const std::vector<double>& alphas, double load, double target_ebn0,
                                     const CapacityOptions& options = {});

struct Figure3Row {
    double load = 0.0;
    std::optional<double> gamma_async;
    std::optional<double> gamma_sync;
    std::optional<double> relative_gap;  // (async - sync) / async
};

/// Spectral efficiency versus load for a given waveform (uniform delays) and
/// the synchronous closed form divided by the same Tc B, at fixed Eb/N0.
std::vector<Figure3Row> figure3_rows(const std::vector<double>& loads, const ChipWaveform& waveform, int oversampling,
                                     double target_ebn0, const CapacityOptions& options = {});

} // namespace acdma
