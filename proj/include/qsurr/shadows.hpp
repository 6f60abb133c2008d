#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsurr/circuit.hpp"
#include "qsurr/noise.hpp"
#include "qsurr/observable.hpp"

namespace qsurr {

// One Pauli-basis snapshot: random per-qubit basis plus the measured bit.
// Packed per qubit: 2 bits of basis (0=X, 1=Y, 2=Z) and 1 bit of outcome.
struct ShadowSnapshot {
    std::vector<std::uint8_t> bases;  // values 0/1/2 for X/Y/Z
    std::uint64_t outcomes = 0;       // bit q = outcome of qubit q

    Pauli basis(int q) const { return static_cast<Pauli>(bases[static_cast<std::size_t>(q)] + 1); }
    int outcome(int q) const { return (outcomes >> q) & 1; }
};

struct ShadowSet {
    int num_qubits = 0;
    std::vector<ShadowSnapshot> snapshots;

    int size() const { return static_cast<int>(snapshots.size()); }
};

// T snapshots of the state prepared by one noisy run of the circuit. Each
// snapshot draws fresh bases, a fresh trajectory, and one measurement with
// readout flips already applied.
ShadowSet collect_shadows(const ConcreteCircuit& c, const PauliNoiseSpec& noise, int snapshots,
                          std::uint64_t seed);

// Unbiased local estimator: mean over snapshots of prod_{q: P_q != I}
// (3 * sigma_q if the snapshot basis matches P_q, else the snapshot counts 0),
// sigma_q = +1 for outcome 0 and -1 for outcome 1.
double estimate_pauli(const ShadowSet& s, const PauliString& p);

// sum_j a_j * estimate_pauli(s, P_j); per-Pauli estimates are computed first,
// so the combination is exactly linear in the coefficients.
double estimate_observable(const ShadowSet& s, const Observable& obs);

// JSONL row encoding (base64-packed bases and outcomes) for dataset files.
std::string snapshot_to_jsonl(const ShadowSnapshot& snap, int num_qubits);
ShadowSnapshot snapshot_from_jsonl(const std::string& line, int num_qubits);

}  // namespace qsurr
