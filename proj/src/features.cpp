#include "qsurr/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "qsurr/rng.hpp"

namespace qsurr {

int FrequencyVector::hamming() const {
    int h = 0;
    for (auto e : entries)
        if (e != 0) ++h;
    return h;
}

int FrequencyVector::minus_count() const {
    int m = 0;
    for (auto e : entries)
        if (e == -1) ++m;
    return m;
}

bool FrequencyVector::operator<(const FrequencyVector& rhs) const {
    int ha = hamming(), hb = rhs.hamming();
    if (ha != hb) return ha < hb;
    // same weight: compare support positions, then sign patterns (+1 before -1)
    for (std::size_t i = 0; i < entries.size(); ++i) {
        bool za = entries[i] == 0, zb = rhs.entries[i] == 0;
        if (za != zb) return zb;  // the side with the earlier support position wins
    }
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i] != rhs.entries[i]) return entries[i] > rhs.entries[i];  // +1 < -1
    return false;
}

std::string FrequencyVector::str() const {
    std::string s;
    for (auto e : entries) s.push_back(e == 0 ? '0' : (e == 1 ? '+' : '-'));
    return s;
}

std::string big_count_str(BigCount v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

namespace {

BigCount binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigCount r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<BigCount>(n - k + i);
        r = r / static_cast<BigCount>(i);
    }
    return r;
}

BigCount pow2(int e) { return BigCount{1} << e; }

}  // namespace

BigCount frequency_set_cardinality(int d, int lambda, FreqMode mode) {
    if (lambda < 0 || lambda > d) throw std::invalid_argument("lambda must lie in [0, d]");
    BigCount total = 0;
    if (mode == FreqMode::S) {
        for (int a = 0; a <= lambda; ++a) total += binomial(d, a) * pow2(d - a);
    } else {
        for (int k = 0; k <= lambda; ++k) total += binomial(d, k) * pow2(k);
    }
    return total;
}

namespace {

// support combination of weight k at combination-rank r (lexicographic)
std::vector<int> unrank_combination(int d, int k, BigCount rank) {
    std::vector<int> pos;
    pos.reserve(static_cast<std::size_t>(k));
    int start = 0;
    for (int slot = 0; slot < k; ++slot) {
        for (int p = start; p <= d - (k - slot); ++p) {
            BigCount block = binomial(d - p - 1, k - slot - 1);
            if (rank < block) {
                pos.push_back(p);
                start = p + 1;
                break;
            }
            rank -= block;
        }
    }
    return pos;
}

FrequencyVector assemble(int d, const std::vector<int>& support, std::uint64_t signs) {
    // sign bits count big-endian over the support so ranks match the canonical
    // order: the first support position is the most significant digit
    FrequencyVector w;
    w.entries.assign(static_cast<std::size_t>(d), 0);
    for (std::size_t i = 0; i < support.size(); ++i)
        w.entries[static_cast<std::size_t>(support[i])] =
            ((signs >> (support.size() - 1 - i)) & 1) ? std::int8_t{-1} : std::int8_t{1};
    return w;
}

}  // namespace

FrequencyVector unrank_c(int d, int lambda, BigCount rank) {
    for (int k = 0; k <= lambda; ++k) {
        BigCount block = binomial(d, k) * pow2(k);
        if (rank < block) {
            BigCount combo = rank >> k;                                  // / 2^k
            std::uint64_t signs = static_cast<std::uint64_t>(rank & (pow2(k) - 1));
            return assemble(d, unrank_combination(d, k, combo), signs);
        }
        rank -= block;
    }
    throw std::out_of_range("rank outside C(lambda)");
}

FrequencySet enumerate_frequency_set(int d, int lambda, FreqMode mode) {
    BigCount count = frequency_set_cardinality(d, lambda, mode);
    if (count > kEnumerationGuard)
        throw std::length_error("frequency set too large to enumerate: |set| = " +
                                big_count_str(count));
    FrequencySet out;
    out.mode = mode;
    out.d = d;
    out.lambda = lambda;
    out.members.reserve(static_cast<std::size_t>(count));
    if (mode == FreqMode::C) {
        for (BigCount r = 0; r < count; ++r) out.members.push_back(unrank_c(d, lambda, r));
    } else {
        // S(lambda): enumerate all of {-1,0,1}^d (d is small under the guard)
        // and keep members with minus_count <= lambda, then sort canonically.
        BigCount full = 1;
        for (int i = 0; i < d; ++i) full *= 3;
        for (BigCount r = 0; r < full; ++r) {
            FrequencyVector w;
            w.entries.resize(static_cast<std::size_t>(d));
            BigCount v = r;
            for (int i = 0; i < d; ++i) {
                int digit = static_cast<int>(v % 3);
                v /= 3;
                w.entries[static_cast<std::size_t>(i)] =
                    digit == 0 ? std::int8_t{0} : (digit == 1 ? std::int8_t{1} : std::int8_t{-1});
            }
            if (w.minus_count() <= lambda) out.members.push_back(std::move(w));
        }
        std::sort(out.members.begin(), out.members.end());
    }
    return out;
}

FrequencySet sample_feature_subset(int d, int lambda, std::uint64_t m, std::uint64_t seed) {
    BigCount count = frequency_set_cardinality(d, lambda, FreqMode::C);
    if (BigCount{m} > count)
        throw std::invalid_argument("sample size exceeds |C(lambda)| = " + big_count_str(count));
    // Floyd's algorithm; draws stay in 64 bits when possible, otherwise
    // rejection-sample the 128-bit range.
    Rng rng(seed);
    auto uniform_big = [&rng](BigCount bound) -> BigCount {
        if (bound <= BigCount{UINT64_MAX}) {
            return rng.integer(static_cast<std::uint64_t>(bound));
        }
        // bound < 2^127 always holds here; rejection-sample 128-bit values
        while (true) {
            BigCount v = (BigCount{rng.engine()()} << 64) | rng.engine()();
            BigCount limit = ~BigCount{0} - (~BigCount{0} % bound);
            if (v < limit) return v % bound;
        }
    };
    std::vector<BigCount> taken;
    auto contains = [&taken](BigCount v) {
        return std::find(taken.begin(), taken.end(), v) != taken.end();
    };
    for (BigCount t = count - BigCount{m}; t < count; ++t) {
        BigCount r = uniform_big(t + 1);
        if (contains(r))
            taken.push_back(t);
        else
            taken.push_back(r);
    }
    std::sort(taken.begin(), taken.end());
    FrequencySet out;
    out.mode = FreqMode::OmegaSample;
    out.d = d;
    out.lambda = lambda;
    out.sample_size = m;
    out.seed = seed;
    out.members.reserve(static_cast<std::size_t>(m));
    for (BigCount r : taken) out.members.push_back(unrank_c(d, lambda, r));
    return out;
}

FrequencySet sample_feature_subset_stratified(int d, int lambda, std::uint64_t m,
                                               std::uint64_t seed) {
    BigCount total = frequency_set_cardinality(d, lambda, FreqMode::C);
    if (BigCount{m} > total)
        throw std::invalid_argument("sample size exceeds |C(lambda)| = " + big_count_str(total));
    FrequencySet out;
    out.mode = FreqMode::OmegaSample;
    out.d = d;
    out.lambda = lambda;
    out.sample_size = m;
    out.seed = seed;
    out.stratified = true;

    Rng rng(seed);
    auto uniform_big = [&rng](BigCount bound) -> BigCount {
        if (bound <= BigCount{UINT64_MAX}) return rng.integer(static_cast<std::uint64_t>(bound));
        while (true) {
            BigCount v = (BigCount{rng.engine()()} << 64) | rng.engine()();
            BigCount limit = ~BigCount{0} - (~BigCount{0} % bound);
            if (v < limit) return v % bound;
        }
    };
    std::vector<BigCount> chosen;
    auto has = [&chosen](BigCount v) {
        return std::find(chosen.begin(), chosen.end(), v) != chosen.end();
    };
    // Floyd's draw of `want` distinct ranks inside [lo, lo + span)
    auto draw_within = [&](BigCount lo, BigCount span, std::uint64_t want) {
        std::vector<BigCount> local;
        auto has_local = [&local](BigCount v) {
            return std::find(local.begin(), local.end(), v) != local.end();
        };
        for (BigCount t = span - BigCount{want}; t < span; ++t) {
            BigCount r = uniform_big(t + 1);
            local.push_back(has_local(r) ? t : r);
        }
        for (BigCount r : local) chosen.push_back(lo + r);
    };

    std::uint64_t remaining = m;
    BigCount shell_start = 0;
    int s = 0;
    for (; s <= lambda && remaining > 0; ++s) {
        BigCount shell_size = binomial(d, s) * pow2(s);
        if (shell_size > BigCount{remaining / 2}) break;
        for (BigCount r = shell_start; r < shell_start + shell_size; ++r) chosen.push_back(r);
        remaining -= static_cast<std::uint64_t>(shell_size);
        shell_start += shell_size;
    }
    // spread what is left evenly over the remaining shells
    for (; s <= lambda && remaining > 0; ++s) {
        BigCount shell_size = binomial(d, s) * pow2(s);
        int shells_left = lambda - s + 1;
        std::uint64_t want = (s == lambda) ? remaining
                                           : remaining / static_cast<std::uint64_t>(shells_left);
        if (BigCount{want} > shell_size) want = static_cast<std::uint64_t>(shell_size);
        if (want > 0) draw_within(shell_start, shell_size, want);
        remaining -= want;
        shell_start += shell_size;
    }
    // residue only occurs when small late shells capped their quota; fill with
    // the lowest unchosen ranks
    for (BigCount r = 0; remaining > 0 && r < total; ++r) {
        if (!has(r)) {
            chosen.push_back(r);
            --remaining;
        }
    }
    std::sort(chosen.begin(), chosen.end());
    for (BigCount r : chosen) out.members.push_back(unrank_c(d, lambda, r));
    return out;
}

std::string FrequencySet::descriptor_json() const {
    nlohmann::json j{{"mode", mode == FreqMode::C ? "C" : (mode == FreqMode::S ? "S" : "Omega")},
                     {"d", d},
                     {"lambda", lambda}};
    if (mode == FreqMode::OmegaSample) {
        j["m"] = sample_size;
        j["seed"] = seed;
        if (stratified) j["stratified"] = true;
    }
    return j.dump();
}

FrequencySet FrequencySet::from_descriptor_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::string mode = j.at("mode").get<std::string>();
    int d = j.at("d").get<int>();
    int lambda = j.at("lambda").get<int>();
    if (mode == "Omega") {
        auto m = j.at("m").get<std::uint64_t>();
        auto seed = j.at("seed").get<std::uint64_t>();
        if (j.value("stratified", false)) return sample_feature_subset_stratified(d, lambda, m, seed);
        return sample_feature_subset(d, lambda, m, seed);
    }
    return enumerate_frequency_set(d, lambda, mode == "S" ? FreqMode::S : FreqMode::C);
}

double phi(const FrequencyVector& w, std::span<const double> x) {
    if (static_cast<std::size_t>(w.dim()) != x.size())
        throw std::invalid_argument("frequency/parameter length mismatch");
    double v = 1.0;
    for (int l = 0; l < w.dim(); ++l) {
        auto e = w.entries[static_cast<std::size_t>(l)];
        if (e == 1)
            v *= std::cos(x[static_cast<std::size_t>(l)]);
        else if (e == -1)
            v *= std::sin(x[static_cast<std::size_t>(l)]);
    }
    return v;
}

void CollapsedFeatureIndex::validate(std::span<const int> multiplicity) const {
    if (plus.size() != minus.size() || plus.size() != multiplicity.size())
        throw std::invalid_argument("collapsed index dimension mismatch");
    for (std::size_t j = 0; j < plus.size(); ++j) {
        if (plus[j] < 0 || minus[j] < 0) throw std::invalid_argument("negative power");
        if (plus[j] + minus[j] > multiplicity[j])
            throw std::invalid_argument("powers exceed slot multiplicity");
    }
}

double phi_collapsed(const CollapsedFeatureIndex& idx, std::span<const double> x_base) {
    if (static_cast<std::size_t>(idx.dim()) != x_base.size())
        throw std::invalid_argument("collapsed index/parameter length mismatch");
    double v = 1.0;
    for (int j = 0; j < idx.dim(); ++j) {
        double c = std::cos(x_base[static_cast<std::size_t>(j)]);
        double s = std::sin(x_base[static_cast<std::size_t>(j)]);
        for (int k = 0; k < idx.plus[static_cast<std::size_t>(j)]; ++k) v *= c;
        for (int k = 0; k < idx.minus[static_cast<std::size_t>(j)]; ++k) v *= s;
    }
    return v;
}

CollapsedFeatureIndex collapse_frequency(const FrequencyVector& w, std::span<const int> slot_of_gate,
                                         int base_dim) {
    if (static_cast<std::size_t>(w.dim()) != slot_of_gate.size())
        throw std::invalid_argument("frequency dimension does not match gate count");
    CollapsedFeatureIndex idx;
    idx.plus.assign(static_cast<std::size_t>(base_dim), 0);
    idx.minus.assign(static_cast<std::size_t>(base_dim), 0);
    for (int l = 0; l < w.dim(); ++l) {
        auto e = w.entries[static_cast<std::size_t>(l)];
        if (e == 0) continue;
        int j = slot_of_gate[static_cast<std::size_t>(l)];
        if (e == 1)
            ++idx.plus[static_cast<std::size_t>(j)];
        else
            ++idx.minus[static_cast<std::size_t>(j)];
    }
    return idx;
}

namespace {

// elementary symmetric polynomials e_0..e_kmax of z; k runs downward so the
// e_{k-1} factor is still the previous iteration's value
std::vector<double> esp(std::span<const double> z, int kmax) {
    std::vector<double> e(static_cast<std::size_t>(kmax) + 1, 0.0);
    e[0] = 1.0;
    int seen = 0;
    for (double zl : z) {
        ++seen;
        for (int k = std::min(kmax, seen); k >= 1; --k)
            e[static_cast<std::size_t>(k)] += zl * e[static_cast<std::size_t>(k) - 1];
    }
    return e;
}

}  // namespace

double kernel(std::span<const double> x, std::span<const double> y, int lambda) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel input length mismatch");
    const int d = static_cast<int>(x.size());
    std::vector<double> z(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l)
        z[static_cast<std::size_t>(l)] =
            2.0 * std::cos(x[static_cast<std::size_t>(l)] - y[static_cast<std::size_t>(l)]);
    auto e = esp(z, std::min(lambda, d));
    double k = 0;
    for (int j = 0; j <= std::min(lambda, d); ++j) k += e[static_cast<std::size_t>(j)];
    return k;
}

std::vector<double> kernel_gradient(std::span<const double> x, std::span<const double> y,
                                    int lambda) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel input length mismatch");
    const int d = static_cast<int>(x.size());
    std::vector<double> grad(static_cast<std::size_t>(d), 0.0);
    if (lambda == 0 || d == 0) return grad;
    const int kmax = std::min(lambda - 1, d - 1);  // need e_0..e_{lambda-1} of d-1 values

    std::vector<double> z(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l)
        z[static_cast<std::size_t>(l)] =
            2.0 * std::cos(x[static_cast<std::size_t>(l)] - y[static_cast<std::size_t>(l)]);

    // forward[i][k] = e_k(z_0..z_{i-1}), backward[i][k] = e_k(z_i..z_{d-1})
    auto table = [kmax](int rows) {
        return std::vector<std::vector<double>>(static_cast<std::size_t>(rows),
                                                std::vector<double>(static_cast<std::size_t>(kmax) + 1, 0.0));
    };
    auto fwd = table(d + 1);
    auto bwd = table(d + 1);
    fwd[0][0] = 1.0;
    for (int i = 0; i < d; ++i) {
        fwd[static_cast<std::size_t>(i) + 1] = fwd[static_cast<std::size_t>(i)];
        for (int k = kmax; k >= 1; --k)
            fwd[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)] +=
                z[static_cast<std::size_t>(i)] * fwd[static_cast<std::size_t>(i)][static_cast<std::size_t>(k) - 1];
    }
    bwd[static_cast<std::size_t>(d)][0] = 1.0;
    for (int i = d - 1; i >= 0; --i) {
        bwd[static_cast<std::size_t>(i)] = bwd[static_cast<std::size_t>(i) + 1];
        for (int k = kmax; k >= 1; --k)
            bwd[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +=
                z[static_cast<std::size_t>(i)] * bwd[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k) - 1];
    }
    for (int j = 0; j < d; ++j) {
        double s = 0;
        for (int k = 0; k <= kmax; ++k) {
            double ek = 0;  // e_k of z without coordinate j
            for (int a = 0; a <= k; ++a)
                ek += fwd[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] *
                      bwd[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(k - a)];
            s += ek;
        }
        grad[static_cast<std::size_t>(j)] =
            -2.0 * std::sin(x[static_cast<std::size_t>(j)] - y[static_cast<std::size_t>(j)]) * s;
    }
    return grad;
}

double kernel_brute_force(std::span<const double> x, std::span<const double> y, int lambda) {
    const int d = static_cast<int>(x.size());
    FrequencySet set = enumerate_frequency_set(d, std::min(lambda, d), FreqMode::C);
    double k = 0;
    for (const auto& w : set.members)
        k += std::pow(2.0, w.hamming()) * phi(w, x) * phi(w, y);
    return k;
}

std::map<FrequencyVector, double> extract_coefficients(
    const std::function<double(std::span<const double>)>& f, int d) {
    if (d > 8) throw std::length_error("coefficient extraction guard: d <= 8");
    const std::size_t grid = [d] {
        std::size_t g = 1;
        for (int i = 0; i < d; ++i) g *= 3;
        return g;
    }();
    constexpr double pi = std::numbers::pi;
    const double points[3] = {0.0, pi / 2.0, pi};

    // evaluate on the tensor grid; index digit i_l selects x_l in {0, pi/2, pi}
    std::vector<double> values(grid);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < grid; ++idx) {
        std::size_t v = idx;
        for (int l = 0; l < d; ++l) {
            x[static_cast<std::size_t>(l)] = points[v % 3];
            v /= 3;
        }
        values[idx] = f(x);
    }

    // invert dimension by dimension:
    //   f(0) = a0 + a+, f(pi/2) = a0 + a-, f(pi) = a0 - a+
    std::size_t stride = 1;
    for (int l = 0; l < d; ++l) {
        for (std::size_t base = 0; base < grid; ++base) {
            if ((base / stride) % 3 != 0) continue;
            double f0 = values[base];
            double f1 = values[base + stride];
            double f2 = values[base + 2 * stride];
            double a0 = 0.5 * (f0 + f2);
            double ap = 0.5 * (f0 - f2);
            double am = f1 - a0;
            values[base] = a0;
            values[base + stride] = ap;
            values[base + 2 * stride] = am;
        }
        stride *= 3;
    }

    std::map<FrequencyVector, double> out;
    for (std::size_t idx = 0; idx < grid; ++idx) {
        FrequencyVector w;
        w.entries.resize(static_cast<std::size_t>(d));
        std::size_t v = idx;
        for (int l = 0; l < d; ++l) {
            int digit = static_cast<int>(v % 3);
            v /= 3;
            w.entries[static_cast<std::size_t>(l)] =
                digit == 0 ? std::int8_t{0} : (digit == 1 ? std::int8_t{1} : std::int8_t{-1});
        }
        out.emplace(std::move(w), values[idx]);
    }
    return out;
}

double evaluate_expansion(const std::map<FrequencyVector, double>& coeffs,
                          std::span<const double> x) {
    double v = 0;
    for (const auto& [w, a] : coeffs) v += a * phi(w, x);
    return v;
}

}  // namespace qsurr
