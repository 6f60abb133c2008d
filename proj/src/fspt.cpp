#include "qsurr/fspt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qsurr/circuit.hpp"
#include "qsurr/parallel.hpp"
#include "qsurr/rng.hpp"
#include "qsurr/simulator.hpp"

namespace qsurr {

void FsptScanConfig::validate() const {
    if (half_periods < 4) throw std::invalid_argument("Fourier resolution needs n_k >= 4");
    if (disorder_samples < 2) throw std::invalid_argument("variance needs S >= 2");
    if (delta_grid.size() < 3) throw std::invalid_argument("scan grid needs at least 3 points");
    if (peak_fraction <= 0 || peak_fraction > 1) throw std::invalid_argument("bad peak fraction");
}

std::vector<double> FsptScanConfig::default_delta_grid() {
    std::vector<double> grid(40);
    for (int i = 0; i < 40; ++i) grid[static_cast<std::size_t>(i)] = 0.01 + (0.8 - 0.01) * i / 39.0;
    return grid;
}

namespace {

// gates of one U1 / U2 layer, bound to (delta, J)
std::vector<GateOp> u1_layer(int n, double delta) {
    constexpr double pi = std::numbers::pi;
    std::vector<GateOp> g;
    for (int i = 0; i < n; ++i)
        g.push_back(GateOp::rotation(GateKind::RX, i, AngleSource::fixed(pi - 2.0 * delta)));
    return g;
}

std::vector<GateOp> u2_layer(int n, std::span<const double> j) {
    constexpr double pi = std::numbers::pi;
    std::vector<GateOp> g;
    for (int i = 0; i < n - 1; ++i)
        g.push_back(GateOp::rotation2(GateKind::CRZ, i + 1, i, AngleSource::fixed(-pi)));
    for (int i = 1; i < n - 1; ++i)
        g.push_back(GateOp::rotation(GateKind::RY, i, AngleSource::fixed(-2.0 * j[static_cast<std::size_t>(i) - 1])));
    for (int i = 0; i < n - 1; ++i)
        g.push_back(GateOp::rotation2(GateKind::CRZ, i + 1, i, AngleSource::fixed(pi)));
    return g;
}

PauliString z_on(int n, int qubit) {
    PauliString p;
    p.ops.assign(static_cast<std::size_t>(n), Pauli::I);
    p.ops[static_cast<std::size_t>(qubit)] = Pauli::Z;
    return p;
}

}  // namespace

namespace {

// all collapsed monomials of exact total degree t under per-coordinate caps
void enumerate_degree_class(int base_dim, int degree, std::span<const int> caps,
                            std::vector<CollapsedFeatureIndex>& out) {
    CollapsedFeatureIndex idx;
    idx.plus.assign(static_cast<std::size_t>(base_dim), 0);
    idx.minus.assign(static_cast<std::size_t>(base_dim), 0);
    std::function<void(int, int)> rec = [&](int coord, int remaining) {
        if (coord == base_dim) {
            if (remaining == 0) out.push_back(idx);
            return;
        }
        int cap = std::min(caps[static_cast<std::size_t>(coord)], remaining);
        for (int a = 0; a <= cap; ++a)
            for (int b = 0; a + b <= cap; ++b) {
                idx.plus[static_cast<std::size_t>(coord)] = a;
                idx.minus[static_cast<std::size_t>(coord)] = b;
                rec(coord + 1, remaining - a - b);
            }
        idx.plus[static_cast<std::size_t>(coord)] = 0;
        idx.minus[static_cast<std::size_t>(coord)] = 0;
    };
    rec(0, degree);
}

// Deduplicated feature list for one bank model: full low-degree classes while
// they fit in half the remaining budget, then an even random split over the
// higher degree classes. The expanded frequency set collapses many-to-one,
// so sampling distinct monomials directly makes the budget count.
std::vector<CollapsedFeatureIndex> bank_feature_set(int base_dim, std::span<const int> caps,
                                                    int lambda, int budget, std::uint64_t seed) {
    std::vector<std::vector<CollapsedFeatureIndex>> classes;
    for (int t = 0; t <= lambda; ++t) {
        classes.emplace_back();
        enumerate_degree_class(base_dim, t, caps, classes.back());
    }
    std::vector<CollapsedFeatureIndex> chosen;
    std::size_t remaining = static_cast<std::size_t>(budget);
    std::size_t cls = 0;
    for (; cls < classes.size() && remaining > 0; ++cls) {
        if (classes[cls].size() > remaining / 2) break;
        chosen.insert(chosen.end(), classes[cls].begin(), classes[cls].end());
        remaining -= classes[cls].size();
    }
    Rng rng(seed);
    for (; cls < classes.size() && remaining > 0; ++cls) {
        std::size_t left = classes.size() - cls;
        std::size_t want = (cls + 1 == classes.size()) ? remaining : remaining / left;
        want = std::min(want, classes[cls].size());
        // partial Fisher-Yates over the class
        auto& pool = classes[cls];
        for (std::size_t i = 0; i < want; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.integer(pool.size() - i));
            std::swap(pool[i], pool[j]);
            chosen.push_back(pool[i]);
        }
        remaining -= want;
    }
    return chosen;
}

}  // namespace

std::vector<int> fspt_slot_of_gate(int num_qubits, int half_periods) {
    // rotation gates in circuit order; slot 0 = delta, slots 1..N-2 = J_2..J_{N-1}
    std::vector<int> slots;
    for (int k = 1; k <= half_periods; ++k) {
        if (k % 2 == 1) {
            for (int i = 0; i < num_qubits; ++i) slots.push_back(0);
        } else {
            // CRZ gates carry fixed angles (no slot); only RY gates consume J
            for (int i = 1; i < num_qubits - 1; ++i) slots.push_back(i);
        }
    }
    return slots;
}

std::vector<std::vector<double>> magnetization_trace(int num_qubits, double delta,
                                                     std::span<const double> j_couplings,
                                                     int half_periods,
                                                     const PauliNoiseSpec& noise,
                                                     FsptBackend backend, int trajectories,
                                                     std::uint64_t seed) {
    if (num_qubits < 3) throw std::invalid_argument("FSPT trace needs N >= 3");
    if (static_cast<int>(j_couplings.size()) != num_qubits - 2)
        throw std::invalid_argument("expected N-2 coupling values");
    if (backend == FsptBackend::SurrogateBank)
        throw std::invalid_argument("magnetization_trace needs a simulator backend");

    std::vector<std::vector<double>> out(static_cast<std::size_t>(num_qubits),
                                         std::vector<double>(static_cast<std::size_t>(half_periods), 0.0));
    const auto u1 = u1_layer(num_qubits, delta);
    const auto u2 = u2_layer(num_qubits, j_couplings);

    const int reps = (backend == FsptBackend::Exact) ? 1 : std::max(1, trajectories);
    std::vector<std::vector<std::vector<double>>> per_rep(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        StateVector psi = StateVector::all_zero(num_qubits);
        Rng rng(derive_seed(seed, {0xf5b7, r}));
        auto& rows = per_rep[r];
        rows.assign(static_cast<std::size_t>(num_qubits),
                    std::vector<double>(static_cast<std::size_t>(half_periods), 0.0));
        const double px = noise.p_x, py = noise.p_y, pz = noise.p_z;
        auto noisy = backend == FsptBackend::Trajectory && !noise.is_zero();
        auto insert_error = [&](int q) {
            double u = rng.uniform();
            if (u < px)
                psi.apply_pauli(q, Pauli::X);
            else if (u < px + py)
                psi.apply_pauli(q, Pauli::Y);
            else if (u < px + py + pz)
                psi.apply_pauli(q, Pauli::Z);
        };
        for (int k = 1; k <= half_periods; ++k) {
            const auto& layer = (k % 2 == 1) ? u1 : u2;
            for (const auto& g : layer) {
                psi.apply_gate(g);
                if (noisy && is_rotation(g.kind)) {
                    insert_error(g.qubits[0]);
                    if (g.width() == 2) insert_error(g.qubits[1]);
                }
            }
            for (int q = 0; q < num_qubits; ++q)
                rows[static_cast<std::size_t>(q)][static_cast<std::size_t>(k) - 1] =
                    psi.pauli_expectation(z_on(num_qubits, q));
        }
    });
    for (int r = 0; r < reps; ++r)
        for (int q = 0; q < num_qubits; ++q)
            for (int k = 0; k < half_periods; ++k)
                out[static_cast<std::size_t>(q)][static_cast<std::size_t>(k)] +=
                    per_rep[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)][static_cast<std::size_t>(k)] / reps;
    return out;
}

AveragedTrace disorder_average(const std::vector<std::vector<std::vector<double>>>& traces) {
    if (traces.empty()) throw std::invalid_argument("empty trace set");
    const std::size_t nq = traces.front().size();
    const std::size_t nk = traces.front().front().size();
    AveragedTrace out;
    out.mean.assign(nq, std::vector<double>(nk, 0.0));
    out.stderr_.assign(nq, std::vector<double>(nk, 0.0));
    const double s = static_cast<double>(traces.size());
    for (const auto& tr : traces)
        for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t k = 0; k < nk; ++k) out.mean[q][k] += tr[q][k] / s;
    if (traces.size() > 1) {
        for (const auto& tr : traces)
            for (std::size_t q = 0; q < nq; ++q)
                for (std::size_t k = 0; k < nk; ++k) {
                    double d = tr[q][k] - out.mean[q][k];
                    out.stderr_[q][k] += d * d;
                }
        for (std::size_t q = 0; q < nq; ++q)
            for (std::size_t k = 0; k < nk; ++k)
                out.stderr_[q][k] = std::sqrt(out.stderr_[q][k] / (s * (s - 1.0)));
    }
    return out;
}

std::vector<double> fourier_spectrum(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 4) throw std::invalid_argument("series too short for spectral analysis");
    const std::size_t half = n / 2;
    std::vector<double> amps(half + 1, 0.0);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t j = 0; j <= half; ++j) {
        std::complex<double> acc = 0;
        for (std::size_t k = 0; k < n; ++k)
            acc += series[k] * std::polar(1.0, -two_pi * static_cast<double>(j * k) / static_cast<double>(n));
        double scale = (j == 0 || 2 * j == n) ? 1.0 : std::numbers::sqrt2;
        amps[j] = scale * std::abs(acc) / static_cast<double>(n);
    }
    return amps;
}

SubharmonicPeak subharmonic_peak(std::span<const double> series) {
    const int n = static_cast<int>(series.size());
    auto amps = fourier_spectrum(series);
    // omega/omega0 = 2j/n; the subharmonic sits at j = n/4
    int best = 0;
    double best_dist = 2.0;
    for (int j = 0; j <= n / 2; ++j) {
        double freq = 2.0 * j / n;
        double dist = std::fabs(freq - 0.5);
        if (dist < best_dist - 1e-15) {
            best_dist = dist;
            best = j;
        }
    }
    SubharmonicPeak p;
    p.bin = best;
    p.bin_frequency = 2.0 * best / n;
    p.offset = best_dist;
    p.amplitude = amps[static_cast<std::size_t>(best)];
    return p;
}

const SurrogateQS& SurrogateBank::at(int qubit, int k) const {
    if (qubit < 0 || qubit >= num_qubits || k < 1 || k > half_periods)
        throw std::out_of_range("bank index out of range");
    return models[static_cast<std::size_t>(qubit) * static_cast<std::size_t>(half_periods) +
                  static_cast<std::size_t>(k) - 1];
}

void SurrogateBank::validate() const {
    if (models.size() != static_cast<std::size_t>(num_qubits) * static_cast<std::size_t>(half_periods))
        throw std::invalid_argument("incomplete surrogate bank");
}

SurrogateBank train_surrogate_bank(int num_qubits, int half_periods, const BankTrainingConfig& cfg,
                                   const PauliNoiseSpec& noise, std::uint64_t seed) {
    if (num_qubits < 3 || half_periods < 1) throw std::invalid_argument("bad bank dimensions");
    const int base_dim = num_qubits - 1;

    // shared sampled inputs; one simulation per draw labels every (i, k) pair
    const int n = cfg.examples;
    std::vector<std::vector<double>> inputs(static_cast<std::size_t>(n));
    std::vector<std::vector<std::vector<double>>> traces(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        Rng rng(derive_seed(seed, {0xba5e, i}));
        std::vector<double> x(static_cast<std::size_t>(base_dim));
        x[0] = rng.beta(cfg.beta_alpha, cfg.beta_beta);  // delta, scaled to [0, 1]
        for (int j = 1; j < base_dim; ++j)
            x[static_cast<std::size_t>(j)] = rng.uniform(cfg.j_low, cfg.j_high);
        inputs[i] = x;
        std::span<const double> j_span(x.data() + 1, static_cast<std::size_t>(base_dim - 1));
        FsptBackend backend = noise.is_zero() ? FsptBackend::Exact : FsptBackend::Trajectory;
        traces[i] = magnetization_trace(num_qubits, x[0], j_span, half_periods, noise, backend,
                                        cfg.trajectories, derive_seed(seed, {0x17ab, i}));
        if (cfg.label_shots > 0) {
            // binomial shot noise on every recorded expectation, matching a
            // T-shot Z-basis estimate of <Z_i>
            Rng shot_rng(derive_seed(seed, {0x5405, i}));
            for (auto& row : traces[i])
                for (auto& z : row) {
                    double p = std::clamp(0.5 * (1.0 + z), 0.0, 1.0);
                    std::binomial_distribution<int> bin(cfg.label_shots, p);
                    int ones = bin(shot_rng.engine());
                    z = 2.0 * ones / cfg.label_shots - 1.0;
                }
        }
    });

    SurrogateBank bank;
    bank.num_qubits = num_qubits;
    bank.half_periods = half_periods;
    bank.models.resize(static_cast<std::size_t>(num_qubits) * static_cast<std::size_t>(half_periods));

    // the feature basis lives on the gate angles: theta_delta = pi - 2 delta,
    // theta_J = -2 J; the trigonometric truncation theory speaks about these
    constexpr double pi = std::numbers::pi;
    std::vector<double> scale(static_cast<std::size_t>(base_dim), -2.0);
    std::vector<double> offset(static_cast<std::size_t>(base_dim), 0.0);
    offset[0] = pi;

    parallel_for(bank.models.size(), [&](std::size_t idx) {
        const int qubit = static_cast<int>(idx) / half_periods;
        const int k = static_cast<int>(idx) % half_periods + 1;
        auto slot_map = fspt_slot_of_gate(num_qubits, k);
        const int d_exp = static_cast<int>(slot_map.size());
        const int lam = std::min(cfg.lambda_trunc, d_exp);
        std::vector<int> caps(static_cast<std::size_t>(base_dim), 0);
        for (int s : slot_map) ++caps[static_cast<std::size_t>(s)];
        for (auto& c : caps) c = std::min(c, lam);
        auto features = bank_feature_set(base_dim, caps, lam, cfg.feature_budget,
                                         derive_seed(seed, {0xfea7, idx}));

        TrainingDatasetQS data;
        for (int i = 0; i < n; ++i)
            data.examples.push_back({inputs[static_cast<std::size_t>(i)],
                                     traces[static_cast<std::size_t>(i)][static_cast<std::size_t>(qubit)]
                                           [static_cast<std::size_t>(k) - 1],
                                     cfg.label_shots});
        bank.models[idx] = fit_qs_collapsed(data, std::move(features), cfg.ridge_lambda, caps,
                                            RidgeOptions{}, scale, offset);
    });
    return bank;
}

VarianceScanResult variance_scan(const FsptScanConfig& cfg, const PauliNoiseSpec& noise,
                                 const SurrogateBank* bank) {
    cfg.validate();
    if (cfg.backend == FsptBackend::SurrogateBank && bank == nullptr)
        throw std::invalid_argument("surrogate-bank scan needs a bank");

    const int nd = static_cast<int>(cfg.delta_grid.size());
    const int S = cfg.disorder_samples;
    std::vector<std::vector<double>> peaks(static_cast<std::size_t>(nd),
                                           std::vector<double>(static_cast<std::size_t>(S), 0.0));
    parallel_for(static_cast<std::size_t>(nd) * static_cast<std::size_t>(S), [&](std::size_t cell) {
        const int l = static_cast<int>(cell) / S;
        const int s = static_cast<int>(cell) % S;
        Rng rng(derive_seed(cfg.seed, {0xd15c, static_cast<std::uint64_t>(l),
                                       static_cast<std::uint64_t>(s)}));
        std::vector<double> j(static_cast<std::size_t>(cfg.num_qubits - 2));
        for (auto& v : j) v = rng.uniform(cfg.j_low, cfg.j_high);
        std::vector<double> series(static_cast<std::size_t>(cfg.half_periods));
        if (cfg.backend == FsptBackend::SurrogateBank) {
            std::vector<double> x(static_cast<std::size_t>(cfg.num_qubits - 1));
            x[0] = cfg.delta_grid[static_cast<std::size_t>(l)];
            for (std::size_t i = 0; i < j.size(); ++i) x[i + 1] = j[i];
            for (int k = 1; k <= cfg.half_periods; ++k)
                series[static_cast<std::size_t>(k) - 1] = bank->at(0, k).predict(x);
        } else {
            auto rows = magnetization_trace(cfg.num_qubits, cfg.delta_grid[static_cast<std::size_t>(l)],
                                            j, cfg.half_periods, noise, cfg.backend,
                                            cfg.trajectories,
                                            derive_seed(cfg.seed, {0x7a3c, static_cast<std::uint64_t>(l),
                                                                   static_cast<std::uint64_t>(s)}));
            series = rows[0];
        }
        peaks[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)] =
            subharmonic_peak(series).amplitude;
    });

    VarianceScanResult res;
    res.delta_grid = cfg.delta_grid;
    res.variance.resize(static_cast<std::size_t>(nd));
    res.stddev.resize(static_cast<std::size_t>(nd));
    for (int l = 0; l < nd; ++l) {
        double mean = 0;
        for (double p : peaks[static_cast<std::size_t>(l)]) mean += p;
        mean /= S;
        double var = 0;
        for (double p : peaks[static_cast<std::size_t>(l)]) var += (p - mean) * (p - mean);
        var /= S;  // population form
        res.variance[static_cast<std::size_t>(l)] = var;
        res.stddev[static_cast<std::size_t>(l)] = std::sqrt(var);
    }
    res.star_index = static_cast<int>(std::max_element(res.variance.begin(), res.variance.end()) -
                                      res.variance.begin());
    res.delta_star = res.delta_grid[static_cast<std::size_t>(res.star_index)];
    const double threshold = cfg.peak_fraction * res.variance[static_cast<std::size_t>(res.star_index)];
    int lo = res.star_index, hi = res.star_index;
    while (lo > 0 && res.variance[static_cast<std::size_t>(lo) - 1] >= threshold) --lo;
    while (hi + 1 < nd && res.variance[static_cast<std::size_t>(hi) + 1] >= threshold) ++hi;
    res.interval_low = res.delta_grid[static_cast<std::size_t>(lo)];
    res.interval_high = res.delta_grid[static_cast<std::size_t>(hi)];
    res.neighbor_low = res.delta_grid[static_cast<std::size_t>(std::max(0, res.star_index - 1))];
    res.neighbor_high = res.delta_grid[static_cast<std::size_t>(std::min(nd - 1, res.star_index + 1))];
    return res;
}

std::string VarianceScanResult::to_json() const {
    nlohmann::json j;
    j["delta_grid"] = delta_grid;
    j["variance"] = variance;
    j["stddev"] = stddev;
    j["delta_star"] = delta_star;
    j["interval"] = {interval_low, interval_high};
    j["neighbor_interval"] = {neighbor_low, neighbor_high};
    return j.dump();
}

}  // namespace qsurr
