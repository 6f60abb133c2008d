#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qsurr {

// Index of one trigonometric monomial: entries in {-1, 0, +1}, where 0 -> 1,
// +1 -> cos(x_l), -1 -> sin(x_l).
struct FrequencyVector {
    std::vector<std::int8_t> entries;

    int dim() const { return static_cast<int>(entries.size()); }
    int hamming() const;      // nonzero count
    int minus_count() const;  // number of -1 entries
    bool operator==(const FrequencyVector& rhs) const { return entries == rhs.entries; }
    bool operator<(const FrequencyVector& rhs) const;  // canonical order
    std::string str() const;                           // e.g. "0+-0"
};

enum class FreqMode : std::uint8_t { C, S, OmegaSample };

// 128-bit exact counts; frequency-set sizes overflow 64 bits quickly.
using BigCount = unsigned __int128;
std::string big_count_str(BigCount v);

// |C(L)| = sum_{k<=L} binom(d,k) 2^k ; |S(L)| = sum_{a<=L} binom(d,a) 2^(d-a)
BigCount frequency_set_cardinality(int d, int lambda, FreqMode mode);

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

struct FrequencySet {
    FreqMode mode = FreqMode::C;
    int d = 0;
    int lambda = 0;
    std::uint64_t sample_size = 0;  // OmegaSample only
    std::uint64_t seed = 0;         // OmegaSample only
    bool stratified = false;        // OmegaSample only: shell-aware draw
    std::vector<FrequencyVector> members;  // canonical order

    std::string descriptor_json() const;
    static FrequencySet from_descriptor_json(const std::string& text);  // members re-derived
};

// Complete duplicate-free enumeration, ordered by hamming weight, then by
// support positions, then by sign pattern. Guarded at kEnumerationGuard.
FrequencySet enumerate_frequency_set(int d, int lambda, FreqMode mode);

// m distinct members of C(lambda) drawn uniformly without replacement via
// rank/unrank indexing; never materializes the full set.
FrequencySet sample_feature_subset(int d, int lambda, std::uint64_t m, std::uint64_t seed);

// Shell-aware variant: whole low-weight shells are kept while they fit in
// half the remaining budget, the rest is drawn uniformly from the higher
// shells. Uniform sampling over a huge C(lambda) concentrates on the top
// hamming shell and starves the constant and low-order monomials; this keeps
// them represented.
FrequencySet sample_feature_subset_stratified(int d, int lambda, std::uint64_t m,
                                              std::uint64_t seed);

// rank in [0, |C(lambda)|) -> member, consistent with the canonical order
FrequencyVector unrank_c(int d, int lambda, BigCount rank);

double phi(const FrequencyVector& w, std::span<const double> x);

// Collapsed monomial over base coordinates: prod_j cos(x_j)^plus_j sin(x_j)^minus_j.
struct CollapsedFeatureIndex {
    std::vector<int> plus;
    std::vector<int> minus;

    int dim() const { return static_cast<int>(plus.size()); }
    void validate(std::span<const int> multiplicity) const;
};

double phi_collapsed(const CollapsedFeatureIndex& idx, std::span<const double> x_base);

// Collapse an expanded frequency vector given the gate -> base-slot map.
CollapsedFeatureIndex collapse_frequency(const FrequencyVector& w, std::span<const int> slot_of_gate,
                                         int base_dim);

// Truncated trigonometric kernel sum_{|w|_0 <= lambda} 2^|w|_0 phi_w(x) phi_w(y);
// evaluated as sum_k e_k(z), z_l = 2 cos(x_l - y_l), in O(d * lambda).
double kernel(std::span<const double> x, std::span<const double> y, int lambda);

// d/dx_j kernel = -2 sin(x_j - y_j) * sum_{k=0}^{lambda-1} e_k(z without j);
// exclusion polynomials via forward/backward tables, no division.
std::vector<double> kernel_gradient(std::span<const double> x, std::span<const double> y,
                                    int lambda);

// brute-force reference for the kernel (enumerates C(lambda))
double kernel_brute_force(std::span<const double> x, std::span<const double> y, int lambda);

// Exact coefficient extraction of a degree-1 trigonometric polynomial in every
// coordinate: evaluates f on the grid {0, pi/2, pi}^d and inverts the
// per-dimension map. Returns all 3^d coefficients keyed by frequency vector.
std::map<FrequencyVector, double> extract_coefficients(
    const std::function<double(std::span<const double>)>& f, int d);

// Reconstruction sum_w alpha_w phi_w(x) from an extracted coefficient table.
double evaluate_expansion(const std::map<FrequencyVector, double>& coeffs,
                          std::span<const double> x);

}  // namespace qsurr
