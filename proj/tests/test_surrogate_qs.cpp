#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qsurr/rng.hpp"
#include "qsurr/simulator.hpp"
#include "qsurr/surrogate_qs.hpp"

using namespace qsurr;

constexpr double pi = std::numbers::pi;

namespace {

TrainingDatasetQS synthetic_dataset(const FrequencySet& fs, const std::vector<double>& w_true,
                                    int n, double label_noise, std::uint64_t seed, double range = pi) {
    TrainingDatasetQS data;
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        std::vector<double> x(static_cast<std::size_t>(fs.d));
        for (auto& v : x) v = rng.uniform(-range, range);
        double y = 0;
        for (std::size_t f = 0; f < fs.members.size(); ++f) y += w_true[f] * phi(fs.members[f], x);
        if (label_noise > 0) y += rng.uniform(-label_noise, label_noise);
        data.examples.push_back({std::move(x), y, 0});
    }
    return data;
}

}  // namespace

TEST_CASE("synthetic recovery at vanishing regularization") {
    const int d = 3;
    auto fs = enumerate_frequency_set(d, 2, FreqMode::C);
    Rng rng(5);
    std::vector<double> w_true(fs.members.size());
    for (auto& v : w_true) v = rng.uniform(-0.3, 0.3);
    auto data = synthetic_dataset(fs, w_true, 400, 0.0, 17);
    auto model = fit_qs(data, fs, 1e-8);
    // held-out agreement with the generating model
    Rng tr(29);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x(d);
        for (auto& v : x) v = tr.uniform(-pi, pi);
        double truth = 0;
        for (std::size_t f = 0; f < fs.members.size(); ++f) truth += w_true[f] * phi(fs.members[f], x);
        CHECK(std::fabs(model.predict(x) - truth) < 1e-6);
    }
}

TEST_CASE("degenerate weight vectors act as closed forms") {
    const int d = 2;
    auto fs = enumerate_frequency_set(d, 1, FreqMode::C);
    TrainingDatasetQS data;
    Rng rng(7);
    for (int i = 0; i < 10; ++i) {
        std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        data.examples.push_back({x, 0.0, 0});
    }
    // all-zero labels shrink to the zero vector
    auto zero = fit_qs(data, fs, 0.5);
    for (double w : zero.weights) CHECK(std::fabs(w) < 1e-12);

    // hand-set weights: e_{omega=0} is the constant 1; e_{(+,0)} is cos x1
    SurrogateQS manual = zero;
    manual.weights.assign(fs.members.size(), 0.0);
    manual.weights[0] = 1.0;  // canonical order puts omega = 0 first
    std::vector<double> xq{0.4, -0.8};
    CHECK(manual.predict(xq) == doctest::Approx(1.0));
    manual.weights[0] = 0.0;
    manual.weights[1] = 1.0;  // "+0"
    CHECK(manual.predict(xq) == doctest::Approx(std::cos(0.4)));
}

TEST_CASE("primal and dual solutions agree") {
    const int d = 4;
    auto fs = enumerate_frequency_set(d, 2, FreqMode::C);  // 33 features
    Rng rng(11);
    std::vector<double> w_true(fs.members.size());
    for (auto& v : w_true) v = rng.uniform(-0.4, 0.4);
    auto data = synthetic_dataset(fs, w_true, 60, 0.05, 13);

    RidgeOptions primal;
    primal.force_primal = true;
    RidgeOptions dual;
    dual.force_dual = true;
    auto mp = fit_qs(data, fs, 0.3, primal);
    auto md = fit_qs(data, fs, 0.3, dual);
    Rng tr(15);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(d);
        for (auto& v : x) v = tr.uniform(-pi, pi);
        CHECK(std::fabs(mp.predict(x) - md.predict(x)) < 1e-8);
    }
}

TEST_CASE("normal-equation residual vanishes at the solution") {
    const int d = 3;
    auto fs = enumerate_frequency_set(d, 2, FreqMode::C);
    Rng rng(19);
    std::vector<double> w_true(fs.members.size());
    for (auto& v : w_true) v = rng.uniform(-0.5, 0.5);
    auto data = synthetic_dataset(fs, w_true, 80, 0.1, 21);
    auto model = fit_qs(data, fs, 0.7);
    double y_inf = 0;
    for (const auto& ex : data.examples) y_inf = std::max(y_inf, std::fabs(ex.y));
    CHECK(ridge_residual(model, data) < 1e-8 * (1.0 + y_inf));
}

TEST_CASE("ridge shrinkage is monotone in lambda") {
    const int d = 3;
    auto fs = enumerate_frequency_set(d, 3, FreqMode::C);
    Rng rng(23);
    std::vector<double> w_true(fs.members.size());
    for (auto& v : w_true) v = rng.uniform(-0.5, 0.5);
    auto data = synthetic_dataset(fs, w_true, 120, 0.05, 25);
    double prev = 1e300;
    for (double lambda : {1e-4, 1e-2, 1.0}) {
        auto model = fit_qs(data, fs, lambda);
        double norm = 0;
        for (double w : model.weights) norm += w * w;
        CHECK(norm <= prev + 1e-12);
        prev = norm;
    }
}

TEST_CASE("iterative mode traces a decaying validation error") {
    const int d = 3;
    auto fs = enumerate_frequency_set(d, 2, FreqMode::C);
    Rng rng(31);
    std::vector<double> w_true(fs.members.size());
    for (auto& v : w_true) v = rng.uniform(-0.4, 0.4);
    auto train = synthetic_dataset(fs, w_true, 150, 0.02, 33);
    auto val = synthetic_dataset(fs, w_true, 50, 0.02, 35);
    RidgeOptions opts;
    opts.iterative = true;
    opts.iterations = 120;
    opts.learning_rate = 0.2;
    FitReport report;
    std::vector<int> identity;
    for (int i = 0; i < d; ++i) identity.push_back(i);
    auto model = fit_qs(train, fs, 1.0, identity, d, opts, &report, &val);
    REQUIRE(report.iteration_mse.size() == 120);
    // the error drops quickly within the first sweep of iterations
    CHECK(report.iteration_mse[20] < report.iteration_mse[0] * 0.5);
    CHECK(report.iteration_mse.back() <= report.iteration_mse[20] + 1e-9);
    CHECK(std::isfinite(model.predict(std::vector<double>{0.1, 0.2, 0.3})));
}

TEST_CASE("model json round trip") {
    const int d = 3;
    auto fs = sample_feature_subset(d, 2, 10, 41);
    Rng rng(43);
    std::vector<double> w_true(fs.members.size());
    for (auto& v : w_true) v = rng.uniform(-0.3, 0.3);
    auto data = synthetic_dataset(fs, w_true, 50, 0.01, 45);
    auto model = fit_qs(data, fs, 0.5);
    auto back = SurrogateQS::from_json_text(model.to_json());
    std::vector<double> xq{0.3, -0.6, 1.1};
    CHECK(back.predict(xq) == doctest::Approx(model.predict(xq)).epsilon(1e-14));
}

TEST_CASE("worst-case truncation bound holds on a noisy testbed") {
    // d = 4 independent-slot circuit in the FSPT gate style
    ParamCircuit pc;
    pc.num_qubits = 2;
    pc.num_slots = 4;
    pc.init = InitialState::AllZero;
    pc.gates.push_back(GateOp::clifford(GateKind::H, 1));
    pc.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(0)));
    pc.gates.push_back(GateOp::rotation(GateKind::RY, 0, AngleSource::from_slot(1)));
    pc.gates.push_back(GateOp::rotation2(GateKind::CRZ, 1, 0, AngleSource::fixed(pi / 3)));
    pc.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(2)));
    pc.gates.push_back(GateOp::rotation(GateKind::RY, 0, AngleSource::from_slot(3)));
    pc.validate();
    Observable obs(2, {{1.0, PauliString::from_string("ZI")}});

    PauliNoiseSpec noise;
    noise.p_x = noise.p_y = noise.p_z = 0.2;  // q = 0.2, high-noise regime
    auto f = [&](std::span<const double> x) {
        return expectation(run_noisy_exact(bind_parameters(pc, x), noise), obs);
    };
    const double range = 0.3;
    for (int lambda : {1, 2, 3}) {
        auto rep = worst_case_truncation_check(f, 4, noise, obs.norm_bound(), lambda, FreqMode::C,
                                               range, 2000, 7);
        CHECK(rep.within_bound);
        auto rep_s = worst_case_truncation_check(f, 4, noise, obs.norm_bound(), lambda, FreqMode::S,
                                                 range, 2000, 7);
        CHECK(rep_s.within_bound);
    }

    // lambda = d: no truncation, zero error
    auto full = worst_case_truncation_check(f, 4, noise, obs.norm_bound(), 4, FreqMode::C, range, 500, 9);
    CHECK(full.measured_max_error < 1e-12);

    // fully contracting noise kills every nonconstant coefficient
    PauliNoiseSpec dead;
    dead.p_x = dead.p_y = dead.p_z = 0.25;  // p + p_z = 1/2, q = 0
    auto fdead = [&](std::span<const double> x) {
        return expectation(run_noisy_exact(bind_parameters(pc, x), dead), obs);
    };
    for (int lambda : {0, 1}) {
        auto rep = worst_case_truncation_check(fdead, 4, dead, obs.norm_bound(), lambda, FreqMode::C,
                                               range, 500, 11);
        CHECK(rep.measured_max_error < 1e-9);
    }
}

TEST_CASE("small-range mode S beats mode C at equal feature budget") {
    ParamCircuit pc;
    pc.num_qubits = 2;
    pc.num_slots = 4;
    pc.init = InitialState::AllZero;
    pc.gates.push_back(GateOp::clifford(GateKind::H, 1));
    pc.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(0)));
    pc.gates.push_back(GateOp::rotation(GateKind::RY, 0, AngleSource::from_slot(1)));
    pc.gates.push_back(GateOp::rotation2(GateKind::CRZ, 1, 0, AngleSource::fixed(pi / 3)));
    pc.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(2)));
    pc.gates.push_back(GateOp::rotation(GateKind::RY, 0, AngleSource::from_slot(3)));
    pc.validate();
    Observable obs(2, {{1.0, PauliString::from_string("ZI")}});
    PauliNoiseSpec noise;
    noise.p_x = noise.p_y = noise.p_z = 0.05;
    auto f = [&](std::span<const double> x) {
        return expectation(run_noisy_exact(bind_parameters(pc, x), noise), obs);
    };
    const double range = 0.3;
    // |S(1)| = 48 <= |C(3)| = 65: S gets the smaller budget and must still win
    auto rep_s = worst_case_truncation_check(f, 4, noise, obs.norm_bound(), 1, FreqMode::S, range, 3000, 13);
    auto rep_c = worst_case_truncation_check(f, 4, noise, obs.norm_bound(), 3, FreqMode::C, range, 3000, 13);
    CHECK(rep_s.measured_max_error <= rep_c.measured_max_error + 1e-12);
}
