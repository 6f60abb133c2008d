#pragma once

#include <cstdint>
#include <vector>

#include "qsurr/circuit.hpp"
#include "qsurr/density.hpp"
#include "qsurr/noise.hpp"
#include "qsurr/observable.hpp"
#include "qsurr/statevector.hpp"

namespace qsurr {

// thrown when a memory/size guard rejects a request; surfaces as exit code 3
struct GuardViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxStateQubits = 24;    // statevector backends
inline constexpr int kMaxDensityQubits = 8;   // exact noisy oracle
inline constexpr int kMaxSpectrumQubits = 12; // dense diagonalization

// Noiseless statevector evolution.
StateVector run_pure(const ConcreteCircuit& c);

// Exact channel composition: the deterministic oracle every stochastic path is
// tested against. Noise placement: N_P on each qubit of a rotation gate, the
// (width-matched) Clifford channel after Clifford gates.
DensityMatrix run_noisy_exact(const ConcreteCircuit& c, const PauliNoiseSpec& noise);

// One Monte Carlo Pauli trajectory; unbiased sampler of run_noisy_exact.
StateVector run_noisy_trajectory(const ConcreteCircuit& c, const PauliNoiseSpec& noise,
                                 std::uint64_t seed);

double expectation(const StateVector& psi, const Observable& obs);
double expectation(const DensityMatrix& rho, const Observable& obs);

// Measure each qubit in the requested basis; outcomes packed little-endian
// (bit q = qubit q), readout flips applied with probability p_e per bit.
std::vector<std::uint64_t> sample_measurement(const StateVector& psi,
                                              const std::vector<Pauli>& bases, int shots,
                                              double p_e, std::uint64_t seed);

struct Spectrum {
    double ground;
    double top;
};
Spectrum exact_spectrum(const Observable& hamiltonian);

}  // namespace qsurr
