#pragma once

#include <string>
#include <vector>

namespace qsurr {

// Pauli error model of a noisy processor:
//  - p_x/p_y/p_z:     single-qubit Pauli channel inserted after every rotation
//                     gate, on each qubit the rotation touches
//  - p_c:             total error rate of the Pauli channel inserted after
//                     every Clifford gate (uniform over the non-identity
//                     Pauli strings of the gate's width unless overridden)
//  - p_e:             classical readout bit flip per qubit at measurement
struct PauliNoiseSpec {
    double p_x = 0.0;
    double p_y = 0.0;
    double p_z = 0.0;
    double p_c = 0.0;
    double p_e = 0.0;

    struct ChannelTerm {
        std::string paulis;  // e.g. "XZ" on the gate's qubits
        double prob;
    };
    // optional explicit two-qubit Clifford channel; replaces the p_c default
    std::vector<ChannelTerm> clifford_channel;

    // channel eigenvalues; each must land in [-1, 1]
    double q_x() const { return 1.0 - 2.0 * (p_z + p_y); }
    double q_y() const { return 1.0 - 2.0 * (p_z + p_x); }
    double q_z() const { return 1.0 - 2.0 * (p_x + p_y); }

    bool is_zero() const;
    void validate() const;

    // resolved per-gate channel for a Clifford gate of the given width
    std::vector<ChannelTerm> channel_for_width(int width) const;

    std::string to_json() const;
    static PauliNoiseSpec from_json_text(const std::string& text);
};

}  // namespace qsurr
