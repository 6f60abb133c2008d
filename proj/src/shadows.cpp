#include "qsurr/shadows.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qsurr/rng.hpp"
#include "qsurr/simulator.hpp"

namespace qsurr {

ShadowSet collect_shadows(const ConcreteCircuit& c, const PauliNoiseSpec& noise, int snapshots,
                          std::uint64_t seed) {
    if (snapshots < 1) throw std::invalid_argument("need at least one snapshot");
    ShadowSet set;
    set.num_qubits = c.num_qubits;
    set.snapshots.resize(static_cast<std::size_t>(snapshots));
    for (int t = 0; t < snapshots; ++t) {
        Rng rng(derive_seed(seed, {0x5ade, static_cast<std::uint64_t>(t)}));
        ShadowSnapshot& snap = set.snapshots[static_cast<std::size_t>(t)];
        snap.bases.resize(static_cast<std::size_t>(c.num_qubits));
        std::vector<Pauli> bases(static_cast<std::size_t>(c.num_qubits));
        for (int q = 0; q < c.num_qubits; ++q) {
            snap.bases[static_cast<std::size_t>(q)] = static_cast<std::uint8_t>(rng.integer(3));
            bases[static_cast<std::size_t>(q)] = snap.basis(q);
        }
        StateVector psi = run_noisy_trajectory(
            c, noise, derive_seed(seed, {0x7a11, static_cast<std::uint64_t>(t)}));
        auto bits = sample_measurement(psi, bases, 1, noise.p_e,
                                       derive_seed(seed, {0x3ea5, static_cast<std::uint64_t>(t)}));
        snap.outcomes = bits[0];
    }
    return set;
}

double estimate_pauli(const ShadowSet& s, const PauliString& p) {
    if (p.width() != s.num_qubits) throw std::invalid_argument("pauli string width mismatch");
    if (s.snapshots.empty()) throw std::invalid_argument("empty shadow set");
    double total = 0;
    for (const auto& snap : s.snapshots) {
        double v = 1.0;
        for (int q = 0; q < s.num_qubits; ++q) {
            Pauli want = p.ops[static_cast<std::size_t>(q)];
            if (want == Pauli::I) continue;
            if (snap.basis(q) != want) {
                v = 0.0;
                break;
            }
            v *= snap.outcome(q) ? -3.0 : 3.0;
        }
        total += v;
    }
    return total / static_cast<double>(s.snapshots.size());
}

double estimate_observable(const ShadowSet& s, const Observable& obs) {
    if (obs.num_qubits != s.num_qubits) throw std::invalid_argument("observable width mismatch");
    double v = 0;
    for (const auto& t : obs.terms) v += t.coeff * estimate_pauli(s, t.paulis);
    return v;
}

namespace {

const char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) << 16;
        int rem = static_cast<int>(bytes.size() - i);
        if (rem > 1) v |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (rem > 2) v |= bytes[i + 2];
        out.push_back(kB64[(v >> 18) & 63]);
        out.push_back(kB64[(v >> 12) & 63]);
        out.push_back(rem > 1 ? kB64[(v >> 6) & 63] : '=');
        out.push_back(rem > 2 ? kB64[v & 63] : '=');
    }
    return out;
}

std::vector<std::uint8_t> b64_decode(const std::string& text) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    std::uint32_t buf = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=') break;
        int v = val(c);
        if (v < 0) throw std::invalid_argument("bad base64 character");
        buf = (buf << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((buf >> bits) & 0xff));
        }
    }
    return out;
}

}  // namespace

std::string snapshot_to_jsonl(const ShadowSnapshot& snap, int num_qubits) {
    // bases: 2 bits per qubit, outcomes: 1 bit per qubit
    std::vector<std::uint8_t> bpack((static_cast<std::size_t>(num_qubits) * 2 + 7) / 8, 0);
    for (int q = 0; q < num_qubits; ++q) {
        unsigned v = snap.bases[static_cast<std::size_t>(q)] & 3u;
        bpack[static_cast<std::size_t>(q) / 4] |= static_cast<std::uint8_t>(v << (2 * (q % 4)));
    }
    std::vector<std::uint8_t> opack((static_cast<std::size_t>(num_qubits) + 7) / 8, 0);
    for (int q = 0; q < num_qubits; ++q)
        if (snap.outcome(q)) opack[static_cast<std::size_t>(q) / 8] |= static_cast<std::uint8_t>(1u << (q % 8));
    nlohmann::json j{{"b", b64_encode(bpack)}, {"o", b64_encode(opack)}};
    return j.dump();
}

ShadowSnapshot snapshot_from_jsonl(const std::string& line, int num_qubits) {
    nlohmann::json j = nlohmann::json::parse(line);
    auto bpack = b64_decode(j.at("b").get<std::string>());
    auto opack = b64_decode(j.at("o").get<std::string>());
    ShadowSnapshot snap;
    snap.bases.resize(static_cast<std::size_t>(num_qubits));
    for (int q = 0; q < num_qubits; ++q)
        snap.bases[static_cast<std::size_t>(q)] =
            static_cast<std::uint8_t>((bpack.at(static_cast<std::size_t>(q) / 4) >> (2 * (q % 4))) & 3u);
    for (int q = 0; q < num_qubits; ++q)
        if ((opack.at(static_cast<std::size_t>(q) / 8) >> (q % 8)) & 1u)
            snap.outcomes |= std::uint64_t{1} << q;
    return snap;
}

}  // namespace qsurr
