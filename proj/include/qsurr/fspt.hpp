#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsurr/noise.hpp"
#include "qsurr/surrogate_qs.hpp"

namespace qsurr {

enum class FsptBackend : std::uint8_t { Exact, Trajectory, SurrogateBank };

struct FsptScanConfig {
    int num_qubits = 6;
    int half_periods = 40;            // n_k; the subharmonic bin is exact when 4 | n_k
    std::vector<double> delta_grid;   // defaults to 40 points on [0.01, 0.8]
    int disorder_samples = 20;        // S
    double j_low = 0.0, j_high = 1.0; // J ~ Unif[j_low, j_high]
    FsptBackend backend = FsptBackend::Exact;
    int trajectory_shots = 0;         // 0 = exact expectations along each trajectory
    int trajectories = 1;
    double peak_fraction = 0.95;      // width criterion, 0.90 or 0.95
    std::uint64_t seed = 1;

    void validate() const;
    static std::vector<double> default_delta_grid();
};

// <Z_i> after each U1/U2 boundary k = 1..n_k, one row per qubit. Noiseless
// exact backend or trajectory-averaged noisy backend.
std::vector<std::vector<double>> magnetization_trace(int num_qubits, double delta,
                                                     std::span<const double> j_couplings,
                                                     int half_periods,
                                                     const PauliNoiseSpec& noise,
                                                     FsptBackend backend, int trajectories,
                                                     std::uint64_t seed);

struct AveragedTrace {
    std::vector<std::vector<double>> mean;    // [qubit][k]
    std::vector<std::vector<double>> stderr_; // standard error per element
};
AveragedTrace disorder_average(const std::vector<std::vector<std::vector<double>>>& traces);

// Single-sided amplitude spectrum |series| -> n/2+1 bins on the normalized
// frequency axis omega/omega0 = 2j/n. Interior bins carry sqrt(2)*|F_j|/n so
// that the sum of squared amplitudes equals the mean square of the series.
std::vector<double> fourier_spectrum(std::span<const double> series);

struct SubharmonicPeak {
    double amplitude = 0.0;
    int bin = 0;
    double bin_frequency = 0.0;  // achieved omega/omega0
    double offset = 0.0;         // |bin_frequency - 0.5|
};
SubharmonicPeak subharmonic_peak(std::span<const double> series);

// map (qubit, half-period) -> surrogate; complete over i in [N], k in [n_k]
struct SurrogateBank {
    int num_qubits = 0;
    int half_periods = 0;
    std::vector<SurrogateQS> models;  // index i * n_k + (k-1)

    const SurrogateQS& at(int qubit, int k) const;
    void validate() const;
};

struct BankTrainingConfig {
    int examples = 250;              // n per model
    int label_shots = 0;             // 0 sentinel: exact labels; else binomial shot noise
    int trajectories = 16;           // noise realizations averaged per label when noisy
    int feature_budget = 1000;       // |Omega(Lambda)|
    int lambda_trunc = 7;            // Lambda
    double ridge_lambda = 1.0;
    double beta_alpha = 0.9, beta_beta = 2.0;  // delta ~ Beta(a,b) scaled to [0,1]
    double j_low = 0.0, j_high = 1.0;
};

SurrogateBank train_surrogate_bank(int num_qubits, int half_periods, const BankTrainingConfig& cfg,
                                   const PauliNoiseSpec& noise, std::uint64_t seed);

// gate-angle dimension of the k-half-period circuit and the gate -> base-slot map
std::vector<int> fspt_slot_of_gate(int num_qubits, int half_periods);

struct VarianceScanResult {
    std::vector<double> delta_grid;
    std::vector<double> variance;           // of the qubit-1 subharmonic peak over disorder
    std::vector<double> stddev;
    double delta_star = 0.0;
    int star_index = 0;
    double interval_low = 0.0, interval_high = 0.0;     // variance >= fraction * max
    double neighbor_low = 0.0, neighbor_high = 0.0;     // [delta_(l*-1), delta_(l*+1)]
    std::string to_json() const;
};

VarianceScanResult variance_scan(const FsptScanConfig& cfg, const PauliNoiseSpec& noise,
                                 const SurrogateBank* bank = nullptr);

}  // namespace qsurr
