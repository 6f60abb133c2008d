#include "qsurr/simulator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qsurr/rng.hpp"

namespace qsurr {

namespace {

void check_state_guard(int n) {
    if (n > kMaxStateQubits)
        throw GuardViolation("statevector guard exceeded: N = " + std::to_string(n));
}

std::vector<std::pair<PauliString, double>> channel_terms(const PauliNoiseSpec& noise, int width) {
    std::vector<std::pair<PauliString, double>> out;
    for (const auto& t : noise.channel_for_width(width))
        out.push_back({PauliString::from_string(t.paulis), t.prob});
    return out;
}

std::vector<int> gate_qubits(const GateOp& g) {
    std::vector<int> q{g.qubits[0]};
    if (g.width() == 2) q.push_back(g.qubits[1]);
    return q;
}

}  // namespace

StateVector run_pure(const ConcreteCircuit& c) {
    check_state_guard(c.num_qubits);
    StateVector psi = StateVector::from_initial(c.init, c.num_qubits);
    for (const auto& g : c.gates) psi.apply_gate(g);
    return psi;
}

DensityMatrix run_noisy_exact(const ConcreteCircuit& c, const PauliNoiseSpec& noise) {
    if (c.num_qubits > kMaxDensityQubits)
        throw GuardViolation("density-matrix guard exceeded: N = " + std::to_string(c.num_qubits));
    noise.validate();
    DensityMatrix rho = DensityMatrix::from_initial(c.init, c.num_qubits);
    for (const auto& g : c.gates) {
        rho.apply_gate(g);
        if (is_rotation(g.kind)) {
            for (int q : gate_qubits(g)) rho.apply_rotation_noise(q, noise);
        } else {
            auto terms = channel_terms(noise, g.width());
            if (!terms.empty()) rho.apply_pauli_channel(gate_qubits(g), terms);
        }
    }
    return rho;
}

StateVector run_noisy_trajectory(const ConcreteCircuit& c, const PauliNoiseSpec& noise,
                                 std::uint64_t seed) {
    check_state_guard(c.num_qubits);
    noise.validate();
    Rng rng(seed);
    StateVector psi = StateVector::from_initial(c.init, c.num_qubits);
    const double px = noise.p_x, py = noise.p_y, pz = noise.p_z;
    auto insert_rotation_error = [&](int q) {
        double u = rng.uniform();
        if (u < px)
            psi.apply_pauli(q, Pauli::X);
        else if (u < px + py)
            psi.apply_pauli(q, Pauli::Y);
        else if (u < px + py + pz)
            psi.apply_pauli(q, Pauli::Z);
    };
    for (const auto& g : c.gates) {
        psi.apply_gate(g);
        if (is_rotation(g.kind)) {
            for (int q : gate_qubits(g)) insert_rotation_error(q);
        } else {
            auto terms = channel_terms(noise, g.width());
            if (terms.empty()) continue;
            double u = rng.uniform();
            double acc = 0;
            for (const auto& [p, prob] : terms) {
                acc += prob;
                if (u < acc) {
                    auto qs = gate_qubits(g);
                    for (std::size_t k = 0; k < p.ops.size(); ++k)
                        psi.apply_pauli(qs[k], p.ops[k]);
                    break;
                }
            }
        }
    }
    return psi;
}

double expectation(const StateVector& psi, const Observable& obs) {
    if (obs.num_qubits != psi.num_qubits())
        throw std::invalid_argument("observable width does not match state");
    double v = 0;
    for (const auto& t : obs.terms) v += t.coeff * psi.pauli_expectation(t.paulis);
    return v;
}

double expectation(const DensityMatrix& rho, const Observable& obs) {
    if (obs.num_qubits != rho.num_qubits())
        throw std::invalid_argument("observable width does not match state");
    double v = 0;
    for (const auto& t : obs.terms) v += t.coeff * rho.pauli_expectation(t.paulis);
    return v;
}

std::vector<std::uint64_t> sample_measurement(const StateVector& psi,
                                              const std::vector<Pauli>& bases, int shots,
                                              double p_e, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("need at least one shot");
    if (static_cast<int>(bases.size()) != psi.num_qubits())
        throw std::invalid_argument("basis list width mismatch");
    StateVector rotated = psi;
    for (int q = 0; q < psi.num_qubits(); ++q) {
        switch (bases[static_cast<std::size_t>(q)]) {
            case Pauli::X: rotated.apply_h(q); break;
            case Pauli::Y:
                rotated.apply_sdg(q);
                rotated.apply_h(q);
                break;
            case Pauli::Z:
            case Pauli::I: break;
        }
    }
    std::vector<double> cum(rotated.size());
    double acc = 0;
    auto amps = rotated.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        acc += std::norm(amps[i]);
        cum[i] = acc;
    }
    Rng rng(seed);
    std::vector<std::uint64_t> out(static_cast<std::size_t>(shots));
    for (int s = 0; s < shots; ++s) {
        double u = rng.uniform() * acc;
        auto it = std::lower_bound(cum.begin(), cum.end(), u);
        std::uint64_t bits = static_cast<std::uint64_t>(it - cum.begin());
        if (p_e > 0)
            for (int q = 0; q < psi.num_qubits(); ++q)
                if (rng.uniform() < p_e) bits ^= std::uint64_t{1} << q;
        out[static_cast<std::size_t>(s)] = bits;
    }
    return out;
}

Spectrum exact_spectrum(const Observable& hamiltonian) {
    const int n = hamiltonian.num_qubits;
    if (n > kMaxSpectrumQubits)
        throw GuardViolation("spectrum guard exceeded: N = " + std::to_string(n));
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (const auto& t : hamiltonian.terms) {
        PauliAction act(t.paulis);
        for (std::size_t i = 0; i < dim; ++i)
            m(static_cast<Eigen::Index>(i ^ act.flip_mask), static_cast<Eigen::Index>(i)) +=
                t.coeff * act.phase(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace qsurr
