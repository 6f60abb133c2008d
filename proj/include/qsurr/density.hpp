#pragma once

#include <vector>

#include "qsurr/noise.hpp"
#include "qsurr/statevector.hpp"

namespace qsurr {

// Exact density matrix, stored as vec(rho) on 2N qubits: entry rho_{ij} lives
// at index (i << N) | j, so row bits are qubits N..2N-1 and column bits are
// qubits 0..N-1. Unitaries act as U on the row block and conj(U) on the
// column block; Pauli channels as convex sums of paired Pauli applications.
class DensityMatrix {
public:
    static DensityMatrix from_pure(const StateVector& psi);
    static DensityMatrix from_initial(InitialState init, int num_qubits);

    int num_qubits() const { return n_; }

    void apply_gate(const GateOp& g);  // resolved angles only
    // rho -> (1 - sum p) rho + sum_k p_k P_k rho P_k, paulis on the given qubits
    void apply_pauli_channel(const std::vector<int>& qubits,
                             const std::vector<std::pair<PauliString, double>>& terms);
    // single-qubit N_P(p_x, p_y, p_z) on one qubit
    void apply_rotation_noise(int q, const PauliNoiseSpec& noise);

    double trace() const;
    double hermiticity_error() const;     // max |rho_ij - conj(rho_ji)|
    double min_eigenvalue() const;        // dense eigensolve; small N only
    double frobenius_distance(const DensityMatrix& other) const;

    double pauli_expectation(const PauliString& p) const;  // Tr(rho P)

    // raw access for tests
    cdouble entry(std::size_t row, std::size_t col) const;

private:
    explicit DensityMatrix(int n) : n_(n), vec_(StateVector::all_zero(2 * n)) {}
    int n_ = 0;
    StateVector vec_;
};

}  // namespace qsurr
