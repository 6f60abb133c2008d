#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qsurr/circuit.hpp"
#include "qsurr/observable.hpp"

namespace qsurr {

using cdouble = std::complex<double>;

// Dense statevector over num_qubits qubits; qubit q owns bit q of the
// amplitude index (qubit 0 = least significant bit).
class StateVector {
public:
    StateVector() = default;
    static StateVector all_zero(int num_qubits);
    static StateVector all_plus(int num_qubits);
    static StateVector from_initial(InitialState init, int num_qubits);

    int num_qubits() const { return n_; }
    std::size_t size() const { return amps_.size(); }
    std::span<const cdouble> amplitudes() const { return amps_; }
    std::span<cdouble> amplitudes_mut() { return amps_; }
    cdouble amp(std::size_t idx) const { return amps_[idx]; }

    void apply_1q(int q, const cdouble m[2][2]);
    void apply_h(int q);
    void apply_s(int q);
    void apply_sdg(int q);
    void apply_x(int q);
    void apply_rx(int q, double theta);
    void apply_ry(int q, double theta);
    void apply_rz(int q, double theta);
    void apply_cnot(int control, int target);
    void apply_cz(int q0, int q1);
    void apply_rzz(int q0, int q1, double theta);
    void apply_crz(int control, int target, double theta);
    void apply_pauli(int q, Pauli p);
    void apply_gate(const GateOp& g);  // angle must be resolved

    double norm() const;
    double fidelity_overlap(const StateVector& other) const;  // |<a|b>|

    // <psi| P |psi> for a Pauli string (real by Hermiticity)
    double pauli_expectation(const PauliString& p) const;

private:
    explicit StateVector(int n) : n_(n), amps_(std::size_t{1} << n) {}
    int n_ = 0;
    std::vector<cdouble> amps_;
};

// Precomputed index/phase form of a Pauli string: P |i> = phase(i) |i ^ mask>.
struct PauliAction {
    std::uint64_t flip_mask = 0;   // X and Y positions
    std::uint64_t phase_mask = 0;  // Y and Z positions: (-1)^popcount(i & phase_mask)
    int num_y = 0;                 // global factor i^num_y
    explicit PauliAction(const PauliString& p);
    cdouble phase(std::uint64_t basis_index) const;
};

}  // namespace qsurr
