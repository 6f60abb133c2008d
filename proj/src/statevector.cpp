#include "qsurr/statevector.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qsurr {

StateVector StateVector::all_zero(int num_qubits) {
    StateVector s(num_qubits);
    s.amps_[0] = 1.0;
    return s;
}

StateVector StateVector::all_plus(int num_qubits) {
    StateVector s(num_qubits);
    double v = 1.0 / std::sqrt(static_cast<double>(s.amps_.size()));
    for (auto& a : s.amps_) a = v;
    return s;
}

StateVector StateVector::from_initial(InitialState init, int num_qubits) {
    return init == InitialState::AllZero ? all_zero(num_qubits) : all_plus(num_qubits);
}

void StateVector::apply_1q(int q, const cdouble m[2][2]) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t size = amps_.size();
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            cdouble a0 = amps_[i], a1 = amps_[i + stride];
            amps_[i] = m[0][0] * a0 + m[0][1] * a1;
            amps_[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

void StateVector::apply_h(int q) {
    const double r = 1.0 / std::sqrt(2.0);
    const cdouble m[2][2] = {{r, r}, {r, -r}};
    apply_1q(q, m);
}

void StateVector::apply_s(int q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if (i & stride) amps_[i] *= cdouble(0, 1);
}

void StateVector::apply_sdg(int q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if (i & stride) amps_[i] *= cdouble(0, -1);
}

void StateVector::apply_x(int q) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t size = amps_.size();
    for (std::size_t base = 0; base < size; base += 2 * stride)
        for (std::size_t i = base; i < base + stride; ++i) std::swap(amps_[i], amps_[i + stride]);
}

void StateVector::apply_rx(int q, double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cdouble m[2][2] = {{c, cdouble(0, -s)}, {cdouble(0, -s), c}};
    apply_1q(q, m);
}

void StateVector::apply_ry(int q, double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cdouble m[2][2] = {{c, -s}, {s, c}};
    apply_1q(q, m);
}

void StateVector::apply_rz(int q, double theta) {
    const cdouble e0 = std::polar(1.0, -theta / 2), e1 = std::polar(1.0, theta / 2);
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] *= (i & stride) ? e1 : e0;
}

void StateVector::apply_cnot(int control, int target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
}

void StateVector::apply_cz(int q0, int q1) {
    const std::size_t mask = (std::size_t{1} << q0) | (std::size_t{1} << q1);
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if ((i & mask) == mask) amps_[i] = -amps_[i];
}

void StateVector::apply_rzz(int q0, int q1, double theta) {
    const cdouble even = std::polar(1.0, -theta / 2);  // equal bits
    const cdouble odd = std::polar(1.0, theta / 2);    // differing bits
    const std::size_t b0 = std::size_t{1} << q0, b1 = std::size_t{1} << q1;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        bool parity = (bool(i & b0) != bool(i & b1));
        amps_[i] *= parity ? odd : even;
    }
}

void StateVector::apply_crz(int control, int target, double theta) {
    const cdouble e0 = std::polar(1.0, -theta / 2), e1 = std::polar(1.0, theta / 2);
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if (i & cbit) amps_[i] *= (i & tbit) ? e1 : e0;
}

void StateVector::apply_pauli(int q, Pauli p) {
    const std::size_t stride = std::size_t{1} << q;
    switch (p) {
        case Pauli::I: return;
        case Pauli::X: apply_x(q); return;
        case Pauli::Y: {
            const cdouble m[2][2] = {{0.0, cdouble(0, -1)}, {cdouble(0, 1), 0.0}};
            apply_1q(q, m);
            return;
        }
        case Pauli::Z:
            for (std::size_t i = 0; i < amps_.size(); ++i)
                if (i & stride) amps_[i] = -amps_[i];
            return;
    }
}

void StateVector::apply_gate(const GateOp& g) {
    if (is_rotation(g.kind) && g.angle.is_slot)
        throw std::logic_error("apply_gate requires a resolved angle");
    const double th = g.angle.angle;
    switch (g.kind) {
        case GateKind::H: apply_h(g.qubits[0]); break;
        case GateKind::S: apply_s(g.qubits[0]); break;
        case GateKind::X: apply_x(g.qubits[0]); break;
        case GateKind::CNOT: apply_cnot(g.qubits[0], g.qubits[1]); break;
        case GateKind::CZ: apply_cz(g.qubits[0], g.qubits[1]); break;
        case GateKind::RZ: apply_rz(g.qubits[0], th); break;
        case GateKind::RX: apply_rx(g.qubits[0], th); break;
        case GateKind::RY: apply_ry(g.qubits[0], th); break;
        case GateKind::RZZ: apply_rzz(g.qubits[0], g.qubits[1], th); break;
        case GateKind::CRZ: apply_crz(g.qubits[0], g.qubits[1], th); break;
    }
}

double StateVector::norm() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

double StateVector::fidelity_overlap(const StateVector& other) const {
    cdouble acc = 0;
    for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
    return std::abs(acc);
}

PauliAction::PauliAction(const PauliString& p) {
    for (int q = 0; q < p.width(); ++q) {
        switch (p.ops[static_cast<std::size_t>(q)]) {
            case Pauli::I: break;
            case Pauli::X: flip_mask |= std::uint64_t{1} << q; break;
            case Pauli::Y:
                flip_mask |= std::uint64_t{1} << q;
                phase_mask |= std::uint64_t{1} << q;
                ++num_y;
                break;
            case Pauli::Z: phase_mask |= std::uint64_t{1} << q; break;
        }
    }
}

cdouble PauliAction::phase(std::uint64_t basis_index) const {
    static const cdouble ipow[4] = {1.0, cdouble(0, 1), -1.0, cdouble(0, -1)};
    cdouble ph = ipow[num_y & 3];
    if (std::popcount(basis_index & phase_mask) & 1) ph = -ph;
    return ph;
}

double StateVector::pauli_expectation(const PauliString& p) const {
    if (p.width() != n_) throw std::invalid_argument("pauli string width mismatch");
    PauliAction act(p);
    cdouble acc = 0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        // <psi|P|psi> = sum_i conj(psi[i ^ m]) * phase(i) * psi[i]
        acc += std::conj(amps_[i ^ act.flip_mask]) * act.phase(i) * amps_[i];
    }
    if (std::fabs(acc.imag()) > 1e-9)
        throw std::runtime_error("expectation has imaginary residue " + std::to_string(acc.imag()));
    return acc.real();
}

}  // namespace qsurr
