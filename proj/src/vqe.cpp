#include "qsurr/vqe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qsurr/rng.hpp"
#include "qsurr/simulator.hpp"

namespace qsurr {

Observable tfim_observable(const TfimSpec& spec) {
    if (spec.num_qubits < 2) throw std::invalid_argument("TFIM needs N >= 2");
    Observable obs;
    obs.num_qubits = spec.num_qubits;
    for (int i = 0; i + 1 < spec.num_qubits; ++i) {
        PauliString p;
        p.ops.assign(static_cast<std::size_t>(spec.num_qubits), Pauli::I);
        p.ops[static_cast<std::size_t>(i)] = Pauli::Z;
        p.ops[static_cast<std::size_t>(i) + 1] = Pauli::Z;
        obs.terms.push_back({-spec.coupling, std::move(p)});
    }
    for (int i = 0; i < spec.num_qubits; ++i) {
        PauliString p;
        p.ops.assign(static_cast<std::size_t>(spec.num_qubits), Pauli::I);
        p.ops[static_cast<std::size_t>(i)] = Pauli::X;
        obs.terms.push_back({-spec.field, std::move(p)});
    }
    obs.validate();
    return obs;
}

OptimResult adam_minimize(const std::function<double(std::span<const double>)>& value,
                          const std::function<std::vector<double>(std::span<const double>)>& grad,
                          std::span<const double> x0, const OptimizerConfig& cfg,
                          const IterObserver& observer) {
    const std::size_t d = x0.size();
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> m(d, 0.0), v(d, 0.0);

    OptimResult res;
    res.best_x = x;
    res.best_value = value(x);
    res.trace.push_back(res.best_value);
    if (observer) observer(0, x, res.best_value);

    double ema = res.best_value;
    bool ema_ready = false;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        auto g = grad(x);
        bool finite = true;
        for (double gi : g) finite = finite && std::isfinite(gi);
        if (!finite) throw std::runtime_error("non-finite gradient during optimization");
        const double b1t = 1.0 - std::pow(cfg.adam_beta1, it);
        const double b2t = 1.0 - std::pow(cfg.adam_beta2, it);
        for (std::size_t j = 0; j < d; ++j) {
            m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * g[j];
            v[j] = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * g[j] * g[j];
            double mhat = m[j] / b1t, vhat = v[j] / b2t;
            x[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + 1e-8);
        }
        double f = value(x);
        if (!std::isfinite(f)) throw std::runtime_error("non-finite objective during optimization");
        res.trace.push_back(f);
        res.iterations_run = it;
        if (observer) observer(it, x, f);
        if (f < res.best_value) {
            res.best_value = f;
            res.best_x = x;
        }
        double prev = ema;
        ema = cfg.ema_decay * ema + (1.0 - cfg.ema_decay) * f;
        if (cfg.early_stopping && ema_ready && std::fabs(prev - ema) < cfg.convergence_eps) break;
        ema_ready = true;
    }
    return res;
}

OptimResult pretrain(const SurrogateCS& model, const Observable& hamiltonian,
                     std::span<const double> x0, const OptimizerConfig& cfg,
                     const IterObserver& observer) {
    if (static_cast<int>(x0.size()) != model.dim())
        throw std::invalid_argument("start point dimension does not match the surrogate");
    auto value = [&](std::span<const double> x) { return model.predict(x, hamiltonian); };
    auto grad = [&](std::span<const double> x) {
        return model.predict_gradient(x, hamiltonian);
    };
    return adam_minimize(value, grad, x0, cfg, observer);
}

EnergyEvaluator::EnergyEvaluator(const ParamCircuit& circuit, const Observable& obs,
                                 PauliNoiseSpec noise, int shots, std::uint64_t seed)
    : circuit_(circuit), obs_(obs), noise_(noise), shots_(shots), seed_(seed) {
    if (shots_ < 0) throw std::invalid_argument("shots must be >= 0");
    // greedy qubit-wise-commuting grouping of terms into measurement settings
    for (std::size_t t = 0; t < obs_.terms.size(); ++t) {
        const auto& p = obs_.terms[t].paulis;
        bool placed = false;
        for (std::size_t g = 0; g < basis_groups_.size() && !placed; ++g) {
            auto& bases = group_bases_[g];
            bool ok = true;
            for (int q = 0; q < obs_.num_qubits && ok; ++q) {
                Pauli want = p.ops[static_cast<std::size_t>(q)];
                if (want == Pauli::I) continue;
                if (bases[static_cast<std::size_t>(q)] != Pauli::I &&
                    bases[static_cast<std::size_t>(q)] != want)
                    ok = false;
            }
            if (ok) {
                for (int q = 0; q < obs_.num_qubits; ++q) {
                    Pauli want = p.ops[static_cast<std::size_t>(q)];
                    if (want != Pauli::I) bases[static_cast<std::size_t>(q)] = want;
                }
                basis_groups_[g].push_back(t);
                placed = true;
            }
        }
        if (!placed) {
            group_bases_.emplace_back(static_cast<std::size_t>(obs_.num_qubits), Pauli::I);
            auto& bases = group_bases_.back();
            for (int q = 0; q < obs_.num_qubits; ++q) {
                Pauli want = p.ops[static_cast<std::size_t>(q)];
                if (want != Pauli::I) bases[static_cast<std::size_t>(q)] = want;
            }
            basis_groups_.push_back({t});
        }
    }
}

double EnergyEvaluator::evaluate(std::span<const double> x) const {
    return evaluate_circuit(bind_parameters(circuit_, x));
}

double EnergyEvaluator::evaluate_circuit(const ConcreteCircuit& c) const {
    const std::uint64_t tag = eval_counter_++;
    if (shots_ == 0) {
        if (noise_.is_zero() && noise_.p_e == 0.0) return expectation(run_pure(c), obs_);
        return expectation(run_noisy_exact(c, noise_), obs_);
    }
    // split the shot budget across measurement settings
    const int groups = static_cast<int>(basis_groups_.size());
    const int per_group = std::max(1, shots_ / groups);
    double total = 0;
    for (int g = 0; g < groups; ++g) {
        std::vector<Pauli> bases = group_bases_[static_cast<std::size_t>(g)];
        for (auto& b : bases)
            if (b == Pauli::I) b = Pauli::Z;
        std::vector<double> term_sums(basis_groups_[static_cast<std::size_t>(g)].size(), 0.0);
        for (int s = 0; s < per_group; ++s) {
            StateVector psi = run_noisy_trajectory(
                c, noise_, derive_seed(seed_, {0xf17e, tag, static_cast<std::uint64_t>(g),
                                               static_cast<std::uint64_t>(s)}));
            auto bits = sample_measurement(psi, bases, 1, noise_.p_e,
                                           derive_seed(seed_, {0x3b0b, tag,
                                                               static_cast<std::uint64_t>(g),
                                                               static_cast<std::uint64_t>(s)}));
            shots_consumed_ += 1;
            for (std::size_t ti = 0; ti < term_sums.size(); ++ti) {
                const auto& p = obs_.terms[basis_groups_[static_cast<std::size_t>(g)][ti]].paulis;
                int sign = 1;
                for (int q = 0; q < obs_.num_qubits; ++q)
                    if (p.ops[static_cast<std::size_t>(q)] != Pauli::I && ((bits[0] >> q) & 1))
                        sign = -sign;
                term_sums[ti] += sign;
            }
        }
        for (std::size_t ti = 0; ti < term_sums.size(); ++ti)
            total += obs_.terms[basis_groups_[static_cast<std::size_t>(g)][ti]].coeff *
                     (term_sums[ti] / per_group);
    }
    return total;
}

std::vector<double> parameter_shift_gradient(const ParamCircuit& circuit,
                                             std::span<const double> x, const Observable& obs,
                                             const EnergyEvaluator& eval) {
    (void)obs;
    constexpr double half_pi = std::numbers::pi / 2.0;
    ConcreteCircuit base = bind_parameters(circuit, x);
    std::vector<double> grad(x.size(), 0.0);
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        const GateOp& src = circuit.gates[g];
        if (!is_rotation(src.kind) || !src.angle.is_slot) continue;
        const int slot = src.angle.slot;
        const double slope = src.angle.a;
        ConcreteCircuit plus = base, minus = base;
        plus.gates[g].angle.angle += half_pi;
        minus.gates[g].angle.angle -= half_pi;
        double df = 0.5 * (eval.evaluate_circuit(plus) - eval.evaluate_circuit(minus));
        grad[static_cast<std::size_t>(slot)] += slope * df;
    }
    return grad;
}

FinetuneResult finetune(const ParamCircuit& circuit, const Observable& hamiltonian,
                        std::span<const double> x_start, const PauliNoiseSpec& noise,
                        const OptimizerConfig& cfg, int shots, std::uint64_t seed) {
    EnergyEvaluator eval(circuit, hamiltonian, noise, shots, seed);
    auto value = [&](std::span<const double> x) { return eval.evaluate(x); };
    auto grad = [&](std::span<const double> x) {
        return parameter_shift_gradient(circuit, x, hamiltonian, eval);
    };
    OptimResult inner = adam_minimize(value, grad, x_start, cfg);
    FinetuneResult res;
    res.best_x = std::move(inner.best_x);
    res.best_value = inner.best_value;
    res.trace = std::move(inner.trace);
    res.iterations_run = inner.iterations_run;
    res.shots_used = eval.shots_consumed();
    return res;
}

double normalized_deviation(double f_value, double ground, double top) {
    if (!(top > ground)) throw std::invalid_argument("degenerate spectrum: Emax <= E0");
    return std::fabs(f_value - ground) / (top - ground);
}

ShotLedger shot_ledger(std::uint64_t n_examples, std::uint64_t snapshots_per_example,
                       std::uint64_t finetune_iterations, std::uint64_t d,
                       std::uint64_t shots_per_eval, std::uint64_t baseline_iterations) {
    ShotLedger ledger;
    ledger.dataset_shots = n_examples * snapshots_per_example;
    ledger.finetune_shots = finetune_iterations * 2 * d * shots_per_eval;
    ledger.baseline_shots = baseline_iterations * 2 * d * shots_per_eval;
    return ledger;
}

std::string ShotLedger::to_json() const {
    nlohmann::json j{{"dataset_shots", dataset_shots},
                     {"finetune_shots", finetune_shots},
                     {"baseline_shots", baseline_shots},
                     {"ratio", ratio()}};
    return j.dump();
}

}  // namespace qsurr
