#include "qsurr/circuit.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qsurr {

bool is_rotation(GateKind k) {
    switch (k) {
        case GateKind::RZ:
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZZ:
        case GateKind::CRZ: return true;
        default: return false;
    }
}

int gate_width(GateKind k) {
    switch (k) {
        case GateKind::H:
        case GateKind::S:
        case GateKind::X:
        case GateKind::RZ:
        case GateKind::RX:
        case GateKind::RY: return 1;
        default: return 2;
    }
}

std::string gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::X: return "X";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::RZ: return "RZ";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZZ: return "RZZ";
        case GateKind::CRZ: return "CRZ";
    }
    return "?";
}

GateKind gate_kind_from_name(const std::string& name) {
    for (GateKind k : {GateKind::H, GateKind::S, GateKind::X, GateKind::CNOT, GateKind::CZ,
                       GateKind::RZ, GateKind::RX, GateKind::RY, GateKind::RZZ, GateKind::CRZ})
        if (gate_name(k) == name) return k;
    throw std::invalid_argument("unknown gate kind: " + name);
}

double AngleSource::resolve(std::span<const double> x) const {
    if (!is_slot) return angle;
    return a * x[static_cast<std::size_t>(slot)] + b;
}

GateOp GateOp::clifford(GateKind k, int q0, int q1) {
    if (is_rotation(k)) throw std::invalid_argument("clifford() called with a rotation kind");
    GateOp g;
    g.kind = k;
    g.qubits = {q0, q1};
    return g;
}

GateOp GateOp::rotation(GateKind k, int q0, AngleSource src) {
    if (!is_rotation(k) || gate_width(k) != 1)
        throw std::invalid_argument("rotation() expects a single-qubit rotation kind");
    GateOp g;
    g.kind = k;
    g.qubits = {q0, -1};
    g.angle = src;
    return g;
}

GateOp GateOp::rotation2(GateKind k, int q0, int q1, AngleSource src) {
    if (!is_rotation(k) || gate_width(k) != 2)
        throw std::invalid_argument("rotation2() expects a two-qubit rotation kind");
    GateOp g;
    g.kind = k;
    g.qubits = {q0, q1};
    g.angle = src;
    return g;
}

void GateOp::validate(int num_qubits, int num_slots) const {
    int w = width();
    for (int i = 0; i < w; ++i)
        if (qubits[static_cast<std::size_t>(i)] < 0 || qubits[static_cast<std::size_t>(i)] >= num_qubits)
            throw std::invalid_argument("gate qubit index out of range");
    if (w == 2 && qubits[0] == qubits[1])
        throw std::invalid_argument("gate qubit indices must be distinct");
    if (is_rotation(kind)) {
        if (!std::isfinite(angle.a) || !std::isfinite(angle.b) || !std::isfinite(angle.angle))
            throw std::invalid_argument("non-finite angle parameters");
        if (angle.is_slot && (angle.slot < 0 || angle.slot >= num_slots))
            throw std::invalid_argument("slot index out of range");
    }
}

void ParamCircuit::validate() const {
    if (num_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
    std::vector<int> used(static_cast<std::size_t>(num_slots), 0);
    for (const auto& g : gates) {
        g.validate(num_qubits, num_slots);
        if (is_rotation(g.kind) && g.angle.is_slot) ++used[static_cast<std::size_t>(g.angle.slot)];
    }
    for (int s = 0; s < num_slots; ++s)
        if (used[static_cast<std::size_t>(s)] == 0)
            throw std::invalid_argument("slot " + std::to_string(s) + " is never referenced");
}

std::vector<int> ParamCircuit::slot_multiplicity() const {
    std::vector<int> mult(static_cast<std::size_t>(num_slots), 0);
    for (const auto& g : gates)
        if (is_rotation(g.kind) && g.angle.is_slot) ++mult[static_cast<std::size_t>(g.angle.slot)];
    return mult;
}

int ParamCircuit::rotation_count() const {
    int d = 0;
    for (const auto& g : gates)
        if (is_rotation(g.kind)) ++d;
    return d;
}

std::uint64_t ParamCircuit::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= (x >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    auto mixd = [&mix](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    };
    mix(static_cast<std::uint64_t>(num_qubits));
    mix(static_cast<std::uint64_t>(num_slots));
    mix(static_cast<std::uint64_t>(init));
    for (const auto& g : gates) {
        mix(static_cast<std::uint64_t>(g.kind));
        mix(static_cast<std::uint64_t>(g.qubits[0] + 1));
        mix(static_cast<std::uint64_t>(g.qubits[1] + 1));
        if (is_rotation(g.kind)) {
            mix(g.angle.is_slot ? 1 : 0);
            mix(static_cast<std::uint64_t>(g.angle.slot + 1));
            mixd(g.angle.angle);
            mixd(g.angle.a);
            mixd(g.angle.b);
        }
    }
    return h;
}

ParamCircuit build_vqe_ansatz(int num_qubits, int num_layers) {
    if (num_qubits < 2) throw std::invalid_argument("VQE ansatz needs N >= 2");
    if (num_layers < 1) throw std::invalid_argument("VQE ansatz needs L >= 1");
    ParamCircuit c;
    c.num_qubits = num_qubits;
    c.num_slots = num_layers * (2 * num_qubits - 1);
    c.init = InitialState::AllPlus;
    for (int l = 0; l < num_layers; ++l) {
        int base = l * (2 * num_qubits - 1);
        for (int i = 0; i < num_qubits; ++i)
            c.gates.push_back(GateOp::rotation(GateKind::RX, i, AngleSource::from_slot(base + i)));
        for (int i = 0; i < num_qubits - 1; ++i)
            c.gates.push_back(GateOp::rotation2(GateKind::RZZ, i, i + 1,
                                                AngleSource::from_slot(base + num_qubits + i)));
    }
    c.validate();
    return c;
}

ParamCircuit build_fspt_circuit(int num_qubits, int half_periods) {
    if (num_qubits < 3) throw std::invalid_argument("FSPT circuit needs N >= 3");
    if (half_periods < 1) throw std::invalid_argument("FSPT circuit needs k >= 1");
    constexpr double pi = std::numbers::pi;
    ParamCircuit c;
    c.num_qubits = num_qubits;
    c.num_slots = num_qubits - 1;  // slot 0 = delta, slots 1..N-2 = J_2..J_{N-1}
    c.init = InitialState::AllZero;

    auto push_u1 = [&c, num_qubits, pi] {
        for (int i = 0; i < num_qubits; ++i)
            c.gates.push_back(GateOp::rotation(GateKind::RX, i, AngleSource::from_slot(0, -2.0, pi)));
    };
    auto push_u2 = [&c, num_qubits, pi] {
        // ladder control sits on the higher-indexed qubit
        for (int i = 0; i < num_qubits - 1; ++i)
            c.gates.push_back(GateOp::rotation2(GateKind::CRZ, i + 1, i, AngleSource::fixed(-pi)));
        for (int i = 1; i < num_qubits - 1; ++i)
            c.gates.push_back(GateOp::rotation(GateKind::RY, i, AngleSource::from_slot(i, -2.0, 0.0)));
        for (int i = 0; i < num_qubits - 1; ++i)
            c.gates.push_back(GateOp::rotation2(GateKind::CRZ, i + 1, i, AngleSource::fixed(pi)));
    };
    for (int k = 1; k <= half_periods; ++k) {
        if (k % 2 == 1)
            push_u1();
        else
            push_u2();
    }
    // every n_k = 1 circuit lacks U2, so J slots would be unreferenced; anchor
    // them by requiring at least one full period unless k == 1
    if (half_periods == 1) c.num_slots = 1;
    c.validate();
    return c;
}

ConcreteCircuit bind_parameters(const ParamCircuit& c, std::span<const double> x) {
    if (static_cast<int>(x.size()) != c.num_slots)
        throw std::invalid_argument("parameter vector length does not match slot count");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite parameter value");
    ConcreteCircuit out;
    out.num_qubits = c.num_qubits;
    out.init = c.init;
    out.gates = c.gates;
    for (auto& g : out.gates)
        if (is_rotation(g.kind)) g.angle = AngleSource::fixed(g.angle.resolve(x));
    return out;
}

ConcreteCircuit fold_gates(const ConcreteCircuit& c, int fold_factor) {
    if (fold_factor < 0) throw std::invalid_argument("fold factor must be >= 0");
    ConcreteCircuit out;
    out.num_qubits = c.num_qubits;
    out.init = c.init;
    out.gates.reserve(c.gates.size() * (2 * static_cast<std::size_t>(fold_factor) + 1));
    for (const auto& g : c.gates) {
        out.gates.push_back(g);
        GateOp inv = g;
        if (is_rotation(g.kind)) inv.angle = AngleSource::fixed(-g.angle.angle);
        // H, S, X, CNOT, CZ: S is the only non-involutory Clifford here; its
        // inverse is S applied three times
        for (int i = 0; i < fold_factor; ++i) {
            if (g.kind == GateKind::S) {
                out.gates.push_back(g);
                out.gates.push_back(g);
                out.gates.push_back(g);
            } else {
                out.gates.push_back(inv);
            }
            out.gates.push_back(g);
        }
    }
    return out;
}

ConcreteCircuit lower_rzz(const ConcreteCircuit& c) {
    ConcreteCircuit out;
    out.num_qubits = c.num_qubits;
    out.init = c.init;
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::RZZ) {
            out.gates.push_back(GateOp::clifford(GateKind::CNOT, g.qubits[0], g.qubits[1]));
            out.gates.push_back(GateOp::rotation(GateKind::RZ, g.qubits[1], g.angle));
            out.gates.push_back(GateOp::clifford(GateKind::CNOT, g.qubits[0], g.qubits[1]));
        } else {
            out.gates.push_back(g);
        }
    }
    return out;
}

std::string ParamCircuit::to_json() const {
    nlohmann::json j;
    j["num_qubits"] = num_qubits;
    j["num_slots"] = num_slots;
    j["initial_state"] = (init == InitialState::AllZero) ? "zero" : "plus";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : gates) {
        nlohmann::json jg;
        jg["kind"] = gate_name(g.kind);
        nlohmann::json q = nlohmann::json::array();
        for (int i = 0; i < g.width(); ++i) q.push_back(g.qubits[static_cast<std::size_t>(i)]);
        jg["qubits"] = q;
        if (is_rotation(g.kind)) {
            if (g.angle.is_slot) {
                jg["slot"] = g.angle.slot;
                jg["a"] = g.angle.a;
                jg["b"] = g.angle.b;
            } else {
                jg["angle"] = g.angle.angle;
            }
        }
        arr.push_back(jg);
    }
    j["gates"] = arr;
    return j.dump();
}

ParamCircuit ParamCircuit::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ParamCircuit c;
    c.num_qubits = j.at("num_qubits").get<int>();
    c.num_slots = j.at("num_slots").get<int>();
    std::string init = j.value("initial_state", "zero");
    c.init = (init == "plus") ? InitialState::AllPlus : InitialState::AllZero;
    for (const auto& jg : j.at("gates")) {
        GateOp g;
        g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
        auto q = jg.at("qubits");
        g.qubits = {q.at(0).get<int>(), q.size() > 1 ? q.at(1).get<int>() : -1};
        if (is_rotation(g.kind)) {
            if (jg.contains("slot"))
                g.angle = AngleSource::from_slot(jg.at("slot").get<int>(), jg.value("a", 1.0),
                                                 jg.value("b", 0.0));
            else
                g.angle = AngleSource::fixed(jg.at("angle").get<double>());
        }
        c.gates.push_back(g);
    }
    c.validate();
    return c;
}

}  // namespace qsurr
