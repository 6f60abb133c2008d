#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qsurr/rng.hpp"
#include "qsurr/simulator.hpp"
#include "qsurr/surrogate_cs.hpp"
#include "qsurr/tasks.hpp"
#include "qsurr/vqe.hpp"

using namespace qsurr;

constexpr double pi = std::numbers::pi;

namespace {

Observable zz_probe() {
    return Observable(2, {{1.0, PauliString::from_string("ZI")}});
}

}  // namespace

TEST_CASE("single-example and constant-kernel degenerate models") {
    // n = 1: prediction is kappa(x', x1) * g1
    auto circuit = build_vqe_ansatz(2, 1);
    auto data = generate_dataset_cs(circuit, {}, 1, 50, 5);
    auto model = SurrogateCS::fit(data, 2);
    Observable obs = zz_probe();
    std::vector<double> xq{0.3, -0.2, 0.9};
    double g1 = estimate_observable(data->examples[0].shadows, obs);
    CHECK(model.predict(xq, obs) ==
          doctest::Approx(kernel(xq, data->examples[0].x, 2) * g1).epsilon(1e-12));

    // lambda = 0: constant predictor equal to the mean of g
    auto data2 = generate_dataset_cs(circuit, {}, 20, 10, 6);
    auto flat = SurrogateCS::fit(data2, 0);
    double mean = 0;
    for (const auto& ex : data2->examples) mean += estimate_observable(ex.shadows, obs);
    mean /= 20;
    CHECK(flat.predict(xq, obs) == doctest::Approx(mean).epsilon(1e-12));
    // and its gradient vanishes
    for (double gi : flat.predict_gradient(xq, obs)) CHECK(gi == doctest::Approx(0.0));
}

TEST_CASE("prediction is unbiased toward the truncated expansion") {
    // N = 2, d = 2 circuit; average predictions over independently re-collected
    // datasets at fixed inputs and compare with the lambda-truncated expansion
    PauliNoiseSpec noise;
    noise.p_x = 0.05;
    noise.p_y = 0.03;
    noise.p_z = 0.02;
    ParamCircuit pc;
    pc.num_qubits = 2;
    pc.num_slots = 2;
    pc.init = InitialState::AllPlus;
    pc.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(0)));
    pc.gates.push_back(GateOp::clifford(GateKind::CNOT, 0, 1));
    pc.gates.push_back(GateOp::rotation(GateKind::RY, 1, AngleSource::from_slot(1)));
    pc.validate();
    Observable obs = zz_probe();
    const int lambda = 1;

    // truncated reference via the exact coefficient table
    auto coeffs = extract_coefficients(
        [&](std::span<const double> x) {
            return expectation(run_noisy_exact(bind_parameters(pc, x), noise), obs);
        },
        2);
    std::map<FrequencyVector, double> truncated;
    for (const auto& [w, a] : coeffs)
        if (w.hamming() <= lambda) truncated.emplace(w, a);

    std::vector<double> xq{0.4, -1.0};
    const double target = evaluate_expansion(truncated, xq);

    const int repeats = 300, n = 64, t = 4;
    double acc = 0, acc2 = 0;
    for (int r = 0; r < repeats; ++r) {
        auto data = generate_dataset_cs(pc, noise, n, t, derive_seed(1234, {static_cast<std::uint64_t>(r)}));
        auto model = SurrogateCS::fit(data, lambda);
        double v = model.predict(xq, obs);
        acc += v;
        acc2 += v * v;
    }
    double mean = acc / repeats;
    double se = std::sqrt(std::max(0.0, acc2 / repeats - mean * mean) / repeats);
    CHECK(std::fabs(mean - target) < 5 * std::max(se, 1e-6));
}

TEST_CASE("prediction is exactly linear in the observable") {
    auto circuit = build_vqe_ansatz(2, 1);
    auto data = generate_dataset_cs(circuit, {}, 16, 8, 9);
    auto model = SurrogateCS::fit(data, 1);
    Observable o1(2, {{0.5, PauliString::from_string("ZZ")}});
    Observable o2(2, {{1.5, PauliString::from_string("XI")}});
    const double a = 4.0, b = 0.25;  // powers of two keep this exact
    Observable mix = Observable::sum(a, o1, b, o2);
    std::vector<double> xq{0.1, 0.2, -0.3};
    CHECK(model.predict(xq, mix) == a * model.predict(xq, o1) + b * model.predict(xq, o2));
}

TEST_CASE("gradient matches central differences") {
    auto circuit = build_vqe_ansatz(3, 1);  // d = 5
    PauliNoiseSpec noise;
    noise.p_x = noise.p_y = noise.p_z = 0.01;
    auto data = generate_dataset_cs(circuit, noise, 40, 6, 21);
    auto model = SurrogateCS::fit(data, 2);
    Observable obs = tfim_observable({3, -0.1, -0.5});
    Rng rng(3);
    std::vector<double> x(5);
    for (auto& v : x) v = rng.uniform(-pi, pi);
    auto grad = model.predict_gradient(x, obs);
    const double h = 1e-5;
    for (std::size_t j = 0; j < x.size(); ++j) {
        auto xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        double fd = (model.predict(xp, obs) - model.predict(xm, obs)) / (2 * h);
        CHECK(std::fabs(grad[j] - fd) < 1e-6);
    }

    // d = 1 closed form: -2 sin(x - x1) * g / n
    auto small = std::make_shared<TrainingDatasetCS>(*generate_dataset_cs(
        [] {
            ParamCircuit c;
            c.num_qubits = 1;
            c.num_slots = 1;
            c.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(0)));
            c.validate();
            return c;
        }(),
        {}, 1, 30, 31));
    auto m1 = SurrogateCS::fit(small, 1);
    Observable z1(1, {{1.0, PauliString::from_string("Z")}});
    double g1 = estimate_observable(small->examples[0].shadows, z1);
    std::vector<double> xq{0.9};
    auto g = m1.predict_gradient(xq, z1);
    CHECK(g[0] == doctest::Approx(-2 * std::sin(0.9 - small->examples[0].x[0]) * g1).epsilon(1e-10));
}

TEST_CASE("empirical risk identities") {
    auto circuit = build_vqe_ansatz(2, 1);
    auto data = generate_dataset_cs(circuit, {}, 10, 5, 44);
    auto model = SurrogateCS::fit(data, 1);
    Observable obs = zz_probe();
    // perfect predictor: reference equal to the model's own output
    std::vector<std::pair<std::vector<double>, double>> test;
    Rng rng(4);
    for (int i = 0; i < 7; ++i) {
        std::vector<double> x(3);
        for (auto& v : x) v = rng.uniform(-pi, pi);
        test.emplace_back(x, model.predict(x, obs));
    }
    CHECK(model.empirical_risk(test, obs) == doctest::Approx(0.0).epsilon(1e-15));
    // constant offset c shows up as c^2
    for (auto& [x, y] : test) y += 0.5;
    CHECK(model.empirical_risk(test, obs) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS(model.empirical_risk({}, obs));
}

TEST_CASE("estimate cache equals recomputation") {
    auto circuit = build_vqe_ansatz(2, 1);
    auto data = generate_dataset_cs(circuit, {}, 12, 6, 55);
    auto model = SurrogateCS::fit(data, 1);
    Observable obs = tfim_observable({2, 0.3, -0.2});
    auto cached = model.shadow_estimates(obs);
    auto again = model.shadow_estimates(obs);
    CHECK(cached.get() == again.get());  // same vector, write-once semantics
    for (std::size_t i = 0; i < data->examples.size(); ++i)
        CHECK((*cached)[i] == estimate_observable(data->examples[i].shadows, obs));
}

TEST_CASE("risk decreases with n on the scaled testbed") {
    // N = 3 keeps this quick; 5 seeds, Spearman correlation must be negative
    PauliNoiseSpec noise;
    noise.p_x = noise.p_y = noise.p_z = 0.005;
    auto circuit = build_vqe_ansatz(3, 1);
    Observable obs = tfim_observable({3, -0.1, -0.5});
    const std::vector<int> sizes{50, 150, 400};
    std::vector<double> mean_risk(sizes.size(), 0.0);
    const int seeds = 5;
    for (int seed = 0; seed < seeds; ++seed) {
        auto full = generate_dataset_cs(circuit, noise, sizes.back(), 10,
                                        derive_seed(900, {static_cast<std::uint64_t>(seed)}));
        std::vector<std::pair<std::vector<double>, double>> test;
        Rng rng(derive_seed(901, {static_cast<std::uint64_t>(seed)}));
        for (int i = 0; i < 40; ++i) {
            std::vector<double> x(static_cast<std::size_t>(circuit.num_slots));
            for (auto& v : x) v = rng.uniform(-pi, pi);
            double ref = expectation(run_noisy_exact(bind_parameters(circuit, x), noise), obs);
            test.emplace_back(std::move(x), ref);
        }
        for (std::size_t si = 0; si < sizes.size(); ++si) {
            auto sub = std::make_shared<TrainingDatasetCS>();
            sub->examples.assign(full->examples.begin(), full->examples.begin() + sizes[si]);
            auto model = SurrogateCS::fit(sub, 2);
            mean_risk[si] += model.empirical_risk(test, obs) / seeds;
        }
    }
    CHECK(mean_risk[0] > mean_risk[1]);
    CHECK(mean_risk[1] > mean_risk[2]);
}

TEST_CASE("higher noise does not hurt surrogate fidelity (soft check)") {
    auto circuit = build_vqe_ansatz(3, 1);
    Observable obs = tfim_observable({3, -0.1, -0.5});
    double risk_low = 0, risk_high = 0;
    const int seeds = 5;
    for (int seed = 0; seed < seeds; ++seed) {
        for (auto [p, out] : std::vector<std::pair<double, double*>>{{0.005, &risk_low}, {0.05, &risk_high}}) {
            PauliNoiseSpec noise;
            noise.p_x = noise.p_y = noise.p_z = p;
            auto data = generate_dataset_cs(circuit, noise, 300, 10,
                                            derive_seed(910, {static_cast<std::uint64_t>(seed),
                                                              static_cast<std::uint64_t>(p * 1000)}));
            auto model = SurrogateCS::fit(data, 2);
            std::vector<std::pair<std::vector<double>, double>> test;
            Rng rng(derive_seed(911, {static_cast<std::uint64_t>(seed)}));
            for (int i = 0; i < 30; ++i) {
                std::vector<double> x(static_cast<std::size_t>(circuit.num_slots));
                for (auto& v : x) v = rng.uniform(-pi, pi);
                test.emplace_back(x, expectation(run_noisy_exact(bind_parameters(circuit, x), noise), obs));
            }
            *out += model.empirical_risk(test, obs) / seeds;
        }
    }
    // reported, not asserted, when inside the noise band
    if (risk_high > risk_low * 1.25) {
        MESSAGE("noise-helps check inconclusive: risk(p=0.05)=" << risk_high
                                                                << " vs risk(p=0.005)=" << risk_low);
    }
    CHECK(risk_high < risk_low * 1.25 + 0.05);
}
