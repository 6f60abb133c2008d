#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qsurr {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

// Length-N string over {I,X,Y,Z}.
struct PauliString {
    std::vector<Pauli> ops;

    PauliString() = default;
    explicit PauliString(std::vector<Pauli> o) : ops(std::move(o)) {}
    static PauliString from_string(const std::string& s);

    int width() const { return static_cast<int>(ops.size()); }
    int weight() const;  // number of non-identity entries
    std::string str() const;

    bool operator==(const PauliString& rhs) const { return ops == rhs.ops; }
};

// Hermitian observable as a real combination of Pauli strings.
// B = sum |coeff|, K = max per-term weight.
struct Observable {
    struct Term {
        double coeff;
        PauliString paulis;
    };

    int num_qubits = 0;
    std::vector<Term> terms;

    Observable() = default;
    Observable(int n, std::vector<Term> t);

    int locality() const;
    double norm_bound() const;
    void validate() const;

    Observable scaled(double a) const;
    static Observable sum(double a, const Observable& o1, double b, const Observable& o2);

    // canonical content hash; stable across runs, used as a cache key
    std::uint64_t hash() const;

    std::string to_json() const;
    static Observable from_json_text(const std::string& text);
};

}  // namespace qsurr
