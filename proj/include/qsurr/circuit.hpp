#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qsurr {

enum class GateKind : std::uint8_t { H, S, X, CNOT, CZ, RZ, RX, RY, RZZ, CRZ };

bool is_rotation(GateKind k);
int gate_width(GateKind k);
std::string gate_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

// Rotation angle of a gate: either a fixed value in radians, or an affine map
// angle = a * x[slot] + b over one slot of the parameter vector.
struct AngleSource {
    bool is_slot = false;
    int slot = -1;
    double angle = 0.0;  // used when !is_slot
    double a = 1.0;
    double b = 0.0;

    static AngleSource fixed(double radians) { return {false, -1, radians, 1.0, 0.0}; }
    static AngleSource from_slot(int slot, double a = 1.0, double b = 0.0) {
        return {true, slot, 0.0, a, b};
    }
    double resolve(std::span<const double> x) const;
};

struct GateOp {
    GateKind kind;
    std::array<int, 2> qubits{-1, -1};  // [0] used for width-1; (control, target) for CNOT/CZ/CRZ
    AngleSource angle;                  // meaningful only for rotation kinds

    static GateOp clifford(GateKind k, int q0, int q1 = -1);
    static GateOp rotation(GateKind k, int q0, AngleSource src);
    static GateOp rotation2(GateKind k, int q0, int q1, AngleSource src);

    int width() const { return gate_width(kind); }
    void validate(int num_qubits, int num_slots) const;
};

enum class InitialState : std::uint8_t { AllZero, AllPlus };

// Parametrized circuit skeleton. Correlated parameters are expressed purely by
// slot sharing: several gates referencing the same slot, possibly through
// different affine maps.
struct ParamCircuit {
    int num_qubits = 0;
    int num_slots = 0;
    std::vector<GateOp> gates;
    InitialState init = InitialState::AllZero;

    void validate() const;
    // number of rotation gates driven by each slot
    std::vector<int> slot_multiplicity() const;
    // total rotation-gate count (the dimension of the gate-angle expansion)
    int rotation_count() const;
    std::uint64_t hash() const;

    std::string to_json() const;
    static ParamCircuit from_json_text(const std::string& text);
};

// Circuit with every angle resolved to radians.
struct ConcreteCircuit {
    int num_qubits = 0;
    std::vector<GateOp> gates;  // all angle sources fixed
    InitialState init = InitialState::AllZero;
};

// Trotter-style TFIM ansatz: per layer, N RX gates then N-1 nearest-neighbour
// RZZ gates, all slots independent (d = L*(2N-1)); prepared on |+>^N.
ParamCircuit build_vqe_ansatz(int num_qubits, int num_layers);

// Floquet circuit of alternating layers: U1 = RX(pi - 2*delta) on every qubit,
// U2 = CRZ(-pi) ladder, RY(-2*J_i) on bulk qubits, CRZ(pi) ladder. Applied U1,
// U2, U1, ... for k half-periods. Slots: 0 = delta, 1..N-2 = J_2..J_{N-1}.
ParamCircuit build_fspt_circuit(int num_qubits, int half_periods);

ConcreteCircuit bind_parameters(const ParamCircuit& c, std::span<const double> x);

// G -> G (G^dagger G)^p for every gate; unitarily equivalent to the input.
ConcreteCircuit fold_gates(const ConcreteCircuit& c, int fold_factor);

// Lowering pass for gate-count accounting: RZZ(theta) -> CNOT RZ(theta) CNOT.
ConcreteCircuit lower_rzz(const ConcreteCircuit& c);

}  // namespace qsurr
