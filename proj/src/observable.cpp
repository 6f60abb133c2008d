#include "qsurr/observable.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qsurr {

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw std::invalid_argument(std::string("bad Pauli character: ") + c);
    }
}

PauliString PauliString::from_string(const std::string& s) {
    PauliString p;
    p.ops.reserve(s.size());
    for (char c : s) p.ops.push_back(pauli_from_char(c));
    return p;
}

int PauliString::weight() const {
    int w = 0;
    for (Pauli p : ops)
        if (p != Pauli::I) ++w;
    return w;
}

std::string PauliString::str() const {
    std::string s;
    s.reserve(ops.size());
    for (Pauli p : ops) s.push_back(pauli_char(p));
    return s;
}

Observable::Observable(int n, std::vector<Term> t) : num_qubits(n), terms(std::move(t)) {
    validate();
}

void Observable::validate() const {
    if (terms.empty()) throw std::invalid_argument("observable needs at least one term");
    for (const auto& t : terms) {
        if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite observable coefficient");
        if (t.paulis.width() != num_qubits)
            throw std::invalid_argument("pauli string width does not match qubit count");
    }
}

int Observable::locality() const {
    int k = 0;
    for (const auto& t : terms) k = std::max(k, t.paulis.weight());
    return k;
}

double Observable::norm_bound() const {
    double b = 0;
    for (const auto& t : terms) b += std::fabs(t.coeff);
    return b;
}

Observable Observable::scaled(double a) const {
    Observable o = *this;
    for (auto& t : o.terms) t.coeff *= a;
    return o;
}

Observable Observable::sum(double a, const Observable& o1, double b, const Observable& o2) {
    if (o1.num_qubits != o2.num_qubits) throw std::invalid_argument("observable width mismatch");
    Observable o;
    o.num_qubits = o1.num_qubits;
    for (const auto& t : o1.terms) o.terms.push_back({a * t.coeff, t.paulis});
    for (const auto& t : o2.terms) o.terms.push_back({b * t.coeff, t.paulis});
    return o;
}

std::uint64_t Observable::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= (x >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(num_qubits));
    for (const auto& t : terms) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(t.coeff));
        std::memcpy(&bits, &t.coeff, sizeof(bits));
        mix(bits);
        for (Pauli p : t.paulis.ops) mix(static_cast<std::uint64_t>(p));
    }
    return h;
}

std::string Observable::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : terms) arr.push_back({{"coeff", t.coeff}, {"pauli_string", t.paulis.str()}});
    return arr.dump();
}

Observable Observable::from_json_text(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array() || arr.empty()) throw std::invalid_argument("observable JSON must be a non-empty array");
    Observable o;
    for (const auto& item : arr) {
        PauliString p = PauliString::from_string(item.at("pauli_string").get<std::string>());
        o.terms.push_back({item.at("coeff").get<double>(), std::move(p)});
    }
    o.num_qubits = o.terms.front().paulis.width();
    o.validate();
    return o;
}

}  // namespace qsurr
