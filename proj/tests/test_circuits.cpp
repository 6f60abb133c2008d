#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qsurr/circuit.hpp"
#include "qsurr/rng.hpp"
#include "qsurr/simulator.hpp"

using namespace qsurr;

constexpr double pi = std::numbers::pi;

TEST_CASE("vqe ansatz slot count follows L(2N-1)") {
    auto c = build_vqe_ansatz(2, 1);
    CHECK(c.num_slots == 3);
    REQUIRE(c.gates.size() == 3);
    CHECK(c.gates[0].kind == GateKind::RX);
    CHECK(c.gates[1].kind == GateKind::RX);
    CHECK(c.gates[2].kind == GateKind::RZZ);
    CHECK(c.init == InitialState::AllPlus);

    CHECK(build_vqe_ansatz(6, 1).num_slots == 11);
    CHECK(build_vqe_ansatz(20, 1).num_slots == 39);
    CHECK(build_vqe_ansatz(4, 3).num_slots == 21);

    CHECK_THROWS(build_vqe_ansatz(1, 1));
    CHECK_THROWS(build_vqe_ansatz(4, 0));
}

TEST_CASE("fspt circuit layer parity") {
    // k = 1: a single U1, RX on every qubit only
    auto c1 = build_fspt_circuit(3, 1);
    REQUIRE(c1.gates.size() == 3);
    for (const auto& g : c1.gates) CHECK(g.kind == GateKind::RX);
    CHECK(c1.init == InitialState::AllZero);

    // k = 2: one full period, slot count N-1
    auto c2 = build_fspt_circuit(8, 2);
    CHECK(c2.num_slots == 7);
    // U1 has N gates; U2 has 2(N-1) CRZ + (N-2) RY
    CHECK(c2.gates.size() == 8 + 2 * 7 + 6);

    // k = 79 gives 39 full periods plus a trailing U1
    auto c79 = build_fspt_circuit(8, 79);
    int u1_layers = 0, ry_gates = 0;
    for (const auto& g : c79.gates) {
        if (g.kind == GateKind::RX) ++u1_layers;
        if (g.kind == GateKind::RY) ++ry_gates;
    }
    CHECK(u1_layers == 8 * 40);  // 40 U1 applications
    CHECK(ry_gates == 6 * 39);   // 39 U2 applications

    CHECK_THROWS(build_fspt_circuit(2, 1));
}

TEST_CASE("binding resolves affine maps") {
    auto vqe = build_vqe_ansatz(3, 1);
    std::vector<double> zeros(static_cast<std::size_t>(vqe.num_slots), 0.0);
    auto c = bind_parameters(vqe, zeros);
    for (const auto& g : c.gates) CHECK(g.angle.angle == 0.0);

    auto fspt = build_fspt_circuit(4, 2);
    // x = (delta, J2, J3)
    std::vector<double> x{0.0, 1.0, 0.25};
    auto f = bind_parameters(fspt, x);
    // first U1 gate: RX(pi - 2*0) = RX(pi)
    CHECK(f.gates[0].angle.angle == doctest::Approx(pi).epsilon(1e-15));
    // delta = 0.5, J2 = 1.0: RX(pi - 1), RY(-2)
    std::vector<double> x2{0.5, 1.0, 0.25};
    auto f2 = bind_parameters(fspt, x2);
    CHECK(f2.gates[0].angle.angle == doctest::Approx(pi - 1.0));
    bool saw_ry = false;
    for (const auto& g : f2.gates)
        if (g.kind == GateKind::RY && g.qubits[0] == 1) {
            CHECK(g.angle.angle == doctest::Approx(-2.0));
            saw_ry = true;
        }
    CHECK(saw_ry);

    CHECK_THROWS(bind_parameters(vqe, std::vector<double>{1.0}));
    std::vector<double> bad(static_cast<std::size_t>(vqe.num_slots), 0.0);
    bad[0] = std::nan("");
    CHECK_THROWS(bind_parameters(vqe, bad));
}

TEST_CASE("slot sharing reproduces affine maps bit-exactly") {
    auto fspt = build_fspt_circuit(5, 6);
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(fspt.num_slots));
        for (auto& v : x) v = rng.uniform(-pi, pi);
        auto bound = bind_parameters(fspt, x);
        std::size_t gi = 0;
        for (const auto& g : fspt.gates) {
            if (is_rotation(g.kind) && g.angle.is_slot) {
                double expect = g.angle.a * x[static_cast<std::size_t>(g.angle.slot)] + g.angle.b;
                CHECK(bound.gates[gi].angle.angle == expect);
            }
            ++gi;
        }
    }
}

TEST_CASE("gate folding multiplies counts and preserves the unitary") {
    auto base = bind_parameters(build_vqe_ansatz(3, 1), std::vector<double>{0.3, -0.7, 0.9, 1.1, -0.2});
    CHECK(fold_gates(base, 0).gates.size() == base.gates.size());
    CHECK(fold_gates(base, 1).gates.size() == 3 * base.gates.size());
    CHECK(fold_gates(base, 16).gates.size() == 33 * base.gates.size());

    // single-gate sanity: p=1 RX(t) -> RX(t) RX(-t) RX(t)
    ConcreteCircuit single;
    single.num_qubits = 1;
    single.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::fixed(0.8)));
    auto folded1 = fold_gates(single, 1);
    REQUIRE(folded1.gates.size() == 3);
    CHECK(folded1.gates[1].angle.angle == doctest::Approx(-0.8));

    // folded circuits agree with the original statevector
    Rng rng(3);
    for (int trial = 0; trial < 4; ++trial) {
        int n = 2 + static_cast<int>(rng.integer(4));  // up to 5 qubits
        auto pc = build_vqe_ansatz(n, 1);
        std::vector<double> x(static_cast<std::size_t>(pc.num_slots));
        for (auto& v : x) v = rng.uniform(-pi, pi);
        auto c = bind_parameters(pc, x);
        auto psi0 = run_pure(c);
        for (int p : {1, 2, 4}) {
            auto psi = run_pure(fold_gates(c, p));
            double dist = 0;
            for (std::size_t i = 0; i < psi.size(); ++i)
                dist = std::max(dist, std::abs(psi.amp(i) - psi0.amp(i)));
            CHECK(dist < 1e-10);
        }
    }
    // folding a circuit with S gates still preserves the state
    ConcreteCircuit sc;
    sc.num_qubits = 1;
    sc.gates.push_back(GateOp::clifford(GateKind::H, 0));
    sc.gates.push_back(GateOp::clifford(GateKind::S, 0));
    auto ref = run_pure(sc);
    auto folded = run_pure(fold_gates(sc, 2));
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(ref.amp(i) - folded.amp(i)) < 1e-12);
}

TEST_CASE("rzz lowering matches the native gate") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        double theta = rng.uniform(-2 * pi, 2 * pi);
        ConcreteCircuit c;
        c.num_qubits = 2;
        c.init = InitialState::AllPlus;
        c.gates.push_back(GateOp::rotation2(GateKind::RZZ, 0, 1, AngleSource::fixed(theta)));
        auto native = run_pure(c);
        auto lowered = run_pure(lower_rzz(c));
        for (std::size_t i = 0; i < native.size(); ++i)
            CHECK(std::abs(native.amp(i) - lowered.amp(i)) < 1e-12);
    }
}

TEST_CASE("circuit json round trip") {
    auto c = build_fspt_circuit(4, 3);
    auto back = ParamCircuit::from_json_text(c.to_json());
    CHECK(back.num_qubits == c.num_qubits);
    CHECK(back.num_slots == c.num_slots);
    CHECK(back.hash() == c.hash());
    REQUIRE(back.gates.size() == c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        CHECK(back.gates[i].kind == c.gates[i].kind);
        CHECK(back.gates[i].qubits == c.gates[i].qubits);
    }

    auto vqe = build_vqe_ansatz(3, 2);
    CHECK(ParamCircuit::from_json_text(vqe.to_json()).hash() == vqe.hash());
}

TEST_CASE("gate validation rejects malformed ops") {
    ParamCircuit c;
    c.num_qubits = 2;
    c.num_slots = 1;
    c.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(0)));
    c.validate();

    c.gates.push_back(GateOp::clifford(GateKind::CNOT, 0, 0));  // duplicate qubits
    CHECK_THROWS(c.validate());
    c.gates.pop_back();

    c.gates.push_back(GateOp::rotation(GateKind::RZ, 5, AngleSource::fixed(0.1)));  // out of range
    CHECK_THROWS(c.validate());
    c.gates.pop_back();

    ParamCircuit unused;
    unused.num_qubits = 1;
    unused.num_slots = 2;  // slot 1 never referenced
    unused.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(0)));
    CHECK_THROWS(unused.validate());
}
