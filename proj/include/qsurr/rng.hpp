#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qsurr {

// splitmix64; used both as a stream mixer and to derive child seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash-chain a root seed with a path of stream tags. Every parallel work item
// (trajectory index, snapshot index, scan cell, ...) derives its own seed this
// way, so results do not depend on thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = root ^ 0xd6e8feb86659fd93ULL;
    for (std::uint64_t tag : path) {
        s ^= tag + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        (void)splitmix64(s);
    }
    std::uint64_t tmp = s;
    return splitmix64(tmp);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return unit_(eng_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(eng_); }

    // unbiased integer in [0, n)
    std::uint64_t integer(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
    }

    double normal() { return normal_(eng_); }

    // Beta(a, b) via two gamma draws
    double beta(double a, double b) {
        std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
        double x = ga(eng_), y = gb(eng_);
        return x / (x + y);
    }

    // index from a discrete distribution given cumulative weights (last == total)
    std::size_t discrete_from_cumulative(const std::vector<double>& cum) {
        double u = uniform() * cum.back();
        auto it = std::lower_bound(cum.begin(), cum.end(), u);
        return static_cast<std::size_t>(it - cum.begin());
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qsurr
