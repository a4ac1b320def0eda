#pragma once

// Finite-size random spreading experiments: virtual spreading matrices,
// per-user linear MMSE SINR, seeded trial runs and the delay reduction
// harness for delays spanning whole symbols.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "acdma/large_system.hpp"
#include "acdma/numerics.hpp"
#include "acdma/waveforms.hpp"

namespace acdma {

enum class MatrixKind { BlockToeplitz, BlockCirculant };

const char* to_string(MatrixKind kind);

/// Time-domain pulse phi(t) = (1/2pi) int Phi(w) e^{jwt} dw by composite
/// Gauss-Legendre quadrature over the pulse support.
class PulseTimeDomain {
public:
    explicit PulseTimeDomain(const ChipWaveform& waveform, std::size_t panels = 4096);
    cplx operator()(double t) const;

private:
    std::vector<double> omega_;
    std::vector<cplx> weighted_;  // quadrature weight * Phi(omega) / 2pi
};

/// rN x N virtual spreading matrix for delay tau in [0, N Tc).
/// BlockCirculant: (F (x) I_r) diag(conj Delta(Omega_l, tau)) F^H with
/// Omega_l = 2 pi l / N. BlockToeplitz: block (p, q), component i equals
/// phi((p - q) Tc - tau + i Tc / r); samples below 1e-6 of the peak are dropped
/// and ErrorCode::PulseTooLong is thrown when more than 1e-4 of the pulse
/// energy falls outside |t| <= (N - 1) Tc.
ComplexMatrix build_phi_matrix(const ChipWaveform& waveform, std::size_t n, int r, double tau, MatrixKind kind);

struct FiniteSystemConfig {
    std::size_t spreading_factor = 128;  // N
    std::size_t users = 64;              // K
    int oversampling = 2;                // r
    ChipWaveform waveform = ChipWaveform::root_raised_cosine(0.22);
    std::vector<cplx> amplitudes;        // a_k, one per user
    std::vector<double> delays;          // tau_k in [0, Tc)
    double noise_density = 0.1;          // N0
    MatrixKind kind = MatrixKind::BlockCirculant;

    double noise_variance() const { return oversampling * noise_density / waveform.chip_interval(); }
};

/// Equal amplitudes sqrt(lambda) and delays taken round-robin from the atoms
/// of a law (user k gets atom k mod #atoms).
FiniteSystemConfig config_from_law(const PowerDelayLaw& law, std::size_t n, std::size_t k, int r,
                                   const ChipWaveform& waveform, double noise_density,
                                   MatrixKind kind = MatrixKind::BlockCirculant);

/// One realization: S with i.i.d. CN(0, 1/N) entries and H = [a_k Phi_k s_k].
struct FiniteSystem {
    FiniteSystemConfig config;
    std::uint64_t seed = 0;
    ComplexMatrix spreading;  // N x K
    ComplexMatrix channel;    // rN x K
};

/// Validates a configuration and keeps the per-user Phi matrices so that
/// repeated draws only sample spreading sequences.
class FiniteModel {
public:
    explicit FiniteModel(FiniteSystemConfig config);

    const FiniteSystemConfig& config() const noexcept { return config_; }
    const ComplexMatrix& phi(std::size_t user) const { return *phi_[user]; }

    FiniteSystem draw(std::uint64_t seed) const;

private:
    FiniteSystemConfig config_;
    std::vector<std::shared_ptr<const ComplexMatrix>> phi_;
};

/// N x K matrix of i.i.d. CN(0, 1/N) entries from mt19937_64(seed), column by column.
ComplexMatrix draw_spreading(std::size_t n, std::size_t k, std::uint64_t seed);

struct SinrSample {
    std::size_t trial = 0;
    std::size_t user = 0;
    double sinr = 0.0;
    double efficiency = 0.0;
    std::uint64_t seed = 0;
};

/// h_k^H (H_k H_k^H + sigma^2 I)^-1 h_k with H_k = H without column k.
SinrSample mmse_sinr(const FiniteSystem& system, std::size_t user);

/// All users at once through 1 / (sigma^2 [(H^H H + sigma^2 I)^-1]_kk) - 1.
std::vector<SinrSample> mmse_sinr_all(const ComplexMatrix& channel, double noise_variance);
std::vector<SinrSample> mmse_sinr_all(const FiniteSystem& system);

/// Trial t uses seed master ^ ((t + 1) * 0x9E3779B97F4A7C15).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

struct TrialSummary {
    std::size_t trials = 0;
    double mean_sinr = 0.0;
    double std_sinr = 0.0;
    double stderr_sinr = 0.0;
    double mean_efficiency = 0.0;
    double std_efficiency = 0.0;     // across per-trial user averages
    double stderr_efficiency = 0.0;
    std::vector<double> per_user_efficiency;
};

/// Summarizes samples grouped by trial; per-trial averages over users are the
/// statistical units.
TrialSummary summarize(const std::vector<SinrSample>& samples, std::size_t users);

struct TrialRun {
    std::vector<SinrSample> samples;
    TrialSummary summary;
};

TrialRun run_trials(const FiniteModel& model, std::size_t trials, std::uint64_t master_seed);

/// Large-system prediction of the mean efficiency for the users of a config:
/// each user's (power, delay) becomes an equal-weight atom.
std::vector<double> predicted_user_efficiencies(const FiniteSystemConfig& config, std::size_t grid_points = 512,
                                                const FixedPointOptions& options = {});
double predicted_mean_efficiency(const FiniteSystemConfig& config, std::size_t grid_points = 512,
                                 const FixedPointOptions& options = {});

/// CSV rows: trial,user,delay_over_tc,power,sinr,efficiency and, when
/// per-user predictions are given, predicted_efficiency.
void write_samples_csv(std::ostream& out, const FiniteSystemConfig& config, const std::vector<SinrSample>& samples,
                       const std::vector<double>& predictions = {});

struct Theorem3Config {
    std::size_t spreading_factor = 64;
    std::size_t users = 32;
    int oversampling = 2;
    ChipWaveform waveform = ChipWaveform::root_raised_cosine(0.22);
    std::vector<double> delays;  // tau_k in [0, N Tc)
    std::size_t window = 3;      // M, symbols -M..M
    double noise_density = 0.1;
};

/// Delays uniform on [0, N Tc) from mt19937_64(seed).
std::vector<double> draw_symbol_delays(std::size_t users, std::size_t n, double chip_interval, std::uint64_t seed);

struct Theorem3Result {
    TrialSummary general;  // window model, centre symbol
    TrialSummary reduced;  // delays modulo Tc
    std::vector<SinrSample> general_samples;
    std::vector<SinrSample> reduced_samples;
};

/// Paired runs: per trial the centre-symbol spreading sequences are shared
/// by the (2M+1)-symbol general model and the reduced model.
Theorem3Result theorem3_harness(const Theorem3Config& config, std::size_t trials, std::uint64_t master_seed);

} // namespace acdma
