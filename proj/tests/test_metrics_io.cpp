#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "qsurr/io.hpp"
#include "qsurr/metrics.hpp"
#include "qsurr/rng.hpp"
#include "qsurr/tasks.hpp"

using namespace qsurr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qsurr_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("metric identities") {
    std::vector<double> y{0.1, -0.5, 1.2, 0.9, -1.4};
    auto perfect = compute_metrics(y, y);
    CHECK(perfect.mae == doctest::Approx(0.0));
    CHECK(perfect.mse == doctest::Approx(0.0));
    CHECK(perfect.wasserstein == doctest::Approx(0.0));
    CHECK(*perfect.r2 == doctest::Approx(1.0));
    CHECK(*perfect.pearson == doctest::Approx(1.0));

    std::vector<double> shifted = y;
    for (auto& v : shifted) v += 0.3;
    auto rep = compute_metrics(y, shifted);
    CHECK(rep.mae == doctest::Approx(0.3));
    CHECK(rep.mse == doctest::Approx(0.09));
    CHECK(rep.wasserstein == doctest::Approx(0.3));
    CHECK(*rep.pearson == doctest::Approx(1.0));

    // MAE^2 <= MSE on random data, and WD is permutation-invariant
    Rng rng(3);
    std::vector<double> a(40), b(40);
    for (auto& v : a) v = rng.uniform(-2, 2);
    for (auto& v : b) v = rng.uniform(-2, 2);
    auto r = compute_metrics(a, b);
    CHECK(r.mae * r.mae <= r.mse + 1e-12);
    std::vector<double> b_perm(b.rbegin(), b.rend());
    CHECK(compute_metrics(a, b_perm).wasserstein == doctest::Approx(r.wasserstein));

    // zero-variance reference: R2 and Pearson reported absent
    std::vector<double> flat(5, 1.0);
    auto undef = compute_metrics(flat, y);
    CHECK(!undef.r2.has_value());
    CHECK(!undef.pearson.has_value());
    CHECK(!undef.undefined_reason.empty());

    CHECK_THROWS(compute_metrics({}, {}));
    CHECK_THROWS(compute_metrics({1.0}, {1.0, 2.0}));
}

TEST_CASE("toml subset parses into the json shape") {
    std::string text = R"(
# run configuration
task = "fspt-scan"
seed = 7
[tfim]
num_qubits = 4
coupling = -0.1
field = -0.5
[optimizer]
learning_rate = 0.1
iterations = 100
early_stopping = false
folds = [1, 4, 8, 16]
)";
    auto j = parse_toml_text(text);
    CHECK(j.at("task").get<std::string>() == "fspt-scan");
    CHECK(j.at("seed").get<int>() == 7);
    CHECK(j.at("tfim").at("num_qubits").get<int>() == 4);
    CHECK(j.at("tfim").at("coupling").get<double>() == doctest::Approx(-0.1));
    CHECK(j.at("optimizer").at("early_stopping").get<bool>() == false);
    CHECK(j.at("optimizer").at("folds").size() == 4);

    CHECK_THROWS_AS(parse_toml_text("key"), ConfigError);
    CHECK_THROWS_AS(parse_toml_text("x = "), ConfigError);
}

TEST_CASE("dataset files round trip") {
    TempDir dir;
    auto circuit = build_vqe_ansatz(2, 1);
    auto data = generate_dataset_cs(circuit, {}, 5, 3, 77);
    fs::path p = dir.path / "ds.jsonl";
    write_dataset_cs(*data, p);
    auto back = read_dataset_cs(p);
    REQUIRE(back->examples.size() == data->examples.size());
    for (std::size_t i = 0; i < data->examples.size(); ++i) {
        CHECK(back->examples[i].x == data->examples[i].x);
        for (int t = 0; t < 3; ++t) {
            CHECK(back->examples[i].shadows.snapshots[static_cast<std::size_t>(t)].outcomes ==
                  data->examples[i].shadows.snapshots[static_cast<std::size_t>(t)].outcomes);
            CHECK(back->examples[i].shadows.snapshots[static_cast<std::size_t>(t)].bases ==
                  data->examples[i].shadows.snapshots[static_cast<std::size_t>(t)].bases);
        }
    }

    TrainingDatasetQS qs;
    qs.examples.push_back({{0.1, 0.9}, -0.4, 100});
    qs.examples.push_back({{0.7, -0.2}, 0.6, 100});
    fs::path pq = dir.path / "qs.jsonl";
    write_dataset_qs(qs, pq);
    auto qs_back = read_dataset_qs(pq);
    REQUIRE(qs_back.examples.size() == 2);
    CHECK(qs_back.examples[1].y == doctest::Approx(0.6));
}

TEST_CASE("run_config produces byte-identical artifacts for a fixed seed") {
    TempDir dir1, dir2;
    nlohmann::json cfg{{"task", "oracle-coeffs"},
                       {"seed", 5},
                       {"circuit", {{"type", "fold_benchmark"}}},
                       {"observable", nlohmann::json::array({{{"coeff", 1.0}, {"pauli_string", "ZI"}}})},
                       {"noise", {{"p_x", 0.02}, {"p_y", 0.02}, {"p_z", 0.02}}}};
    run_config(cfg, dir1.path);
    run_config(cfg, dir2.path);
    CHECK(fnv1a_file(dir1.path / "coefficients.csv") == fnv1a_file(dir2.path / "coefficients.csv"));
    CHECK(fs::exists(dir1.path / "manifest.json"));
    // 3^1 = 3 coefficient rows for the d = 1 probe circuit
    auto text = read_text_file(dir1.path / "coefficients.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 rows

    // unknown task surfaces as a config error
    nlohmann::json bad{{"task", "no-such-task"}};
    CHECK_THROWS_AS(run_config(bad, dir1.path), ConfigError);
}

TEST_CASE("eval task emits the six-metric report") {
    TempDir dir;
    nlohmann::json cfg{{"task", "eval"},
                       {"reference", nlohmann::json::array({0.1, 0.4, -0.2, 0.9})},
                       {"prediction", nlohmann::json::array({0.12, 0.38, -0.25, 0.85})}};
    run_config(cfg, dir.path);
    auto metrics = nlohmann::json::parse(read_text_file(dir.path / "metrics.json"));
    CHECK(metrics.at("mse").get<double>() < 0.01);
    CHECK(metrics.at("r2").get<double>() > 0.9);
    CHECK(fs::exists(dir.path / "kde.csv"));
}

TEST_CASE("fold bench flat under zero noise") {
    auto rows = fold_bench({}, {0, 2}, 40, 500, 1, 20, 2000, 3, 4);
    REQUIRE(rows.size() == 2);
    // folding is the identity without noise: both MSEs sit at the statistical floor
    CHECK(rows[0].mse < 0.05);
    CHECK(rows[1].mse < 0.05);
    CHECK(std::fabs(rows[0].mse - rows[1].mse) < 0.05);
}
