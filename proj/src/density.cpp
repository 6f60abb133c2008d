#include "qsurr/density.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace qsurr {

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
    const int n = psi.num_qubits();
    DensityMatrix rho(n);
    const std::size_t dim = std::size_t{1} << n;
    auto out = rho.vec_.amplitudes_mut();
    auto in = psi.amplitudes();
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out[(i << n) | j] = in[i] * std::conj(in[j]);
    return rho;
}

DensityMatrix DensityMatrix::from_initial(InitialState init, int num_qubits) {
    return from_pure(StateVector::from_initial(init, num_qubits));
}

namespace {

// conj(U) of each supported gate, expressed as another gate of the same kind
GateOp conjugated(const GateOp& g, int shift) {
    GateOp out = g;
    out.qubits[0] += shift;
    if (out.qubits[1] >= 0) out.qubits[1] += shift;
    switch (g.kind) {
        case GateKind::RZ:
        case GateKind::RX:
        case GateKind::RZZ:
        case GateKind::CRZ: out.angle = AngleSource::fixed(-g.angle.angle); break;
        default: break;  // H, X, CNOT, CZ, RY are real matrices; S handled by caller
    }
    return out;
}

}  // namespace

void DensityMatrix::apply_gate(const GateOp& g) {
    // row block: U itself, shifted into qubits n..2n-1
    GateOp row = g;
    row.qubits[0] += n_;
    if (row.qubits[1] >= 0) row.qubits[1] += n_;
    vec_.apply_gate(row);
    // column block: conj(U) on qubits 0..n-1
    if (g.kind == GateKind::S) {
        vec_.apply_sdg(g.qubits[0]);
    } else {
        vec_.apply_gate(conjugated(g, 0));
    }
}

void DensityMatrix::apply_pauli_channel(const std::vector<int>& qubits,
                                        const std::vector<std::pair<PauliString, double>>& terms) {
    if (terms.empty()) return;
    double total = 0;
    for (const auto& [p, prob] : terms) total += prob;
    if (total > 1.0 + 1e-12) throw std::invalid_argument("channel probabilities sum above 1");

    const std::size_t dim = vec_.size();
    std::vector<cdouble> acc(dim);
    {
        auto cur = vec_.amplitudes();
        const double keep = 1.0 - total;
        for (std::size_t i = 0; i < dim; ++i) acc[i] = keep * cur[i];
    }
    for (const auto& [p, prob] : terms) {
        if (prob == 0.0) continue;
        StateVector work = vec_;
        int sign = 1;
        for (std::size_t k = 0; k < p.ops.size(); ++k) {
            Pauli op = p.ops[k];
            if (op == Pauli::I) continue;
            int q = qubits[k];
            work.apply_pauli(q + n_, op);  // row factor P
            work.apply_pauli(q, op);       // column factor P^T = (+/-) P
            if (op == Pauli::Y) sign = -sign;
        }
        auto w = work.amplitudes();
        const double scale = prob * sign;
        for (std::size_t i = 0; i < dim; ++i) acc[i] += scale * w[i];
    }
    auto out = vec_.amplitudes_mut();
    for (std::size_t i = 0; i < dim; ++i) out[i] = acc[i];
}

void DensityMatrix::apply_rotation_noise(int q, const PauliNoiseSpec& noise) {
    if (noise.p_x == 0 && noise.p_y == 0 && noise.p_z == 0) return;
    std::vector<std::pair<PauliString, double>> terms;
    if (noise.p_x > 0) terms.push_back({PauliString::from_string("X"), noise.p_x});
    if (noise.p_y > 0) terms.push_back({PauliString::from_string("Y"), noise.p_y});
    if (noise.p_z > 0) terms.push_back({PauliString::from_string("Z"), noise.p_z});
    apply_pauli_channel({q}, terms);
}

double DensityMatrix::trace() const {
    const std::size_t dim = std::size_t{1} << n_;
    double t = 0;
    for (std::size_t i = 0; i < dim; ++i) t += vec_.amp((i << n_) | i).real();
    return t;
}

double DensityMatrix::hermiticity_error() const {
    const std::size_t dim = std::size_t{1} << n_;
    double worst = 0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            cdouble d = vec_.amp((i << n_) | j) - std::conj(vec_.amp((j << n_) | i));
            worst = std::max(worst, std::abs(d));
        }
    return worst;
}

double DensityMatrix::min_eigenvalue() const {
    const std::size_t dim = std::size_t{1} << n_;
    Eigen::MatrixXcd m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vec_.amp((i << n_) | j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityMatrix::frobenius_distance(const DensityMatrix& other) const {
    if (n_ != other.n_) throw std::invalid_argument("qubit count mismatch");
    double s = 0;
    for (std::size_t i = 0; i < vec_.size(); ++i) s += std::norm(vec_.amp(i) - other.vec_.amp(i));
    return std::sqrt(s);
}

double DensityMatrix::pauli_expectation(const PauliString& p) const {
    if (p.width() != n_) throw std::invalid_argument("pauli string width mismatch");
    PauliAction act(p);
    const std::size_t dim = std::size_t{1} << n_;
    cdouble acc = 0;
    // Tr(rho P) = sum_i phase(i) * rho_{i, i ^ m}
    for (std::size_t i = 0; i < dim; ++i)
        acc += act.phase(i) * vec_.amp((i << n_) | (i ^ act.flip_mask));
    if (std::fabs(acc.imag()) > 1e-9)
        throw std::runtime_error("expectation has imaginary residue " + std::to_string(acc.imag()));
    return acc.real();
}

cdouble DensityMatrix::entry(std::size_t row, std::size_t col) const {
    return vec_.amp((row << n_) | col);
}

}  // namespace qsurr
