#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qsurr/circuit.hpp"
#include "qsurr/noise.hpp"
#include "qsurr/observable.hpp"
#include "qsurr/surrogate_cs.hpp"

namespace qsurr {

struct TfimSpec {
    int num_qubits;
    double coupling;  // J
    double field;     // h
};

// H = -J sum Z_i Z_{i+1} - h sum X_i with open boundary
Observable tfim_observable(const TfimSpec& spec);

struct OptimizerConfig {
    double learning_rate = 0.1;
    int max_iterations = 100;
    double ema_decay = 0.9;
    double convergence_eps = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    bool early_stopping = true;  // EMA-based; disable to run the fixed budget
};

struct OptimResult {
    std::vector<double> best_x;       // argmin over visited iterates
    double best_value = 0.0;
    std::vector<double> trace;        // objective per iteration
    int iterations_run = 0;
};

// called after every accepted iterate (including the start point)
using IterObserver = std::function<void(int iteration, std::span<const double> x, double value)>;

// ADAM descent on a black-box objective with analytic gradient
OptimResult adam_minimize(const std::function<double(std::span<const double>)>& value,
                          const std::function<std::vector<double>(std::span<const double>)>& grad,
                          std::span<const double> x0, const OptimizerConfig& cfg,
                          const IterObserver& observer = nullptr);

// Classical pre-training: minimize h_cs(x, H); no simulator access
OptimResult pretrain(const SurrogateCS& model, const Observable& hamiltonian,
                     std::span<const double> x0, const OptimizerConfig& cfg,
                     const IterObserver& observer = nullptr);

// Abstraction over expectation estimation for gradient-based tuning:
// shots == 0 evaluates exactly (pure or noisy-exact backend); shots > 0
// estimates from measurement samples on the trajectory backend.
class EnergyEvaluator {
public:
    EnergyEvaluator(const ParamCircuit& circuit, const Observable& obs, PauliNoiseSpec noise,
                    int shots, std::uint64_t seed);

    double evaluate(std::span<const double> x) const;
    double evaluate_circuit(const ConcreteCircuit& c) const;
    std::uint64_t shots_consumed() const { return shots_consumed_; }
    const ParamCircuit& circuit() const { return circuit_; }
    const Observable& observable() const { return obs_; }

private:
    ParamCircuit circuit_;
    Observable obs_;
    PauliNoiseSpec noise_;
    int shots_;
    std::uint64_t seed_;
    mutable std::uint64_t shots_consumed_ = 0;
    mutable std::uint64_t eval_counter_ = 0;
    std::vector<std::vector<std::size_t>> basis_groups_;  // qubit-wise compatible term groups
    std::vector<std::vector<Pauli>> group_bases_;
};

// d f / d x_s by shifting every gate driven by slot s one at a time by +-pi/2
// in its own resolved angle, scaled by the affine slope, and summing.
std::vector<double> parameter_shift_gradient(const ParamCircuit& circuit,
                                             std::span<const double> x, const Observable& obs,
                                             const EnergyEvaluator& eval);

struct FinetuneResult {
    std::vector<double> best_x;
    double best_value = 0.0;
    std::vector<double> trace;
    std::uint64_t shots_used = 0;
    int iterations_run = 0;
};

FinetuneResult finetune(const ParamCircuit& circuit, const Observable& hamiltonian,
                        std::span<const double> x_start, const PauliNoiseSpec& noise,
                        const OptimizerConfig& cfg, int shots, std::uint64_t seed);

// |f - E0| / (Emax - E0)
double normalized_deviation(double f_value, double ground, double top);

struct ShotLedger {
    std::uint64_t dataset_shots = 0;    // n * T
    std::uint64_t finetune_shots = 0;   // iterations * 2d * shots
    std::uint64_t baseline_shots = 0;   // conventional run: iterations * 2d * shots
    double ratio() const {
        return baseline_shots == 0
                   ? 0.0
                   : static_cast<double>(dataset_shots + finetune_shots) /
                         static_cast<double>(baseline_shots);
    }
    std::string to_json() const;
};

ShotLedger shot_ledger(std::uint64_t n_examples, std::uint64_t snapshots_per_example,
                       std::uint64_t finetune_iterations, std::uint64_t d,
                       std::uint64_t shots_per_eval, std::uint64_t baseline_iterations);

}  // namespace qsurr
