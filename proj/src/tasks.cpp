#include "qsurr/tasks.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qsurr/features.hpp"
#include "qsurr/fspt.hpp"
#include "qsurr/io.hpp"
#include "qsurr/metrics.hpp"
#include "qsurr/parallel.hpp"
#include "qsurr/rng.hpp"
#include "qsurr/simulator.hpp"
#include "qsurr/vqe.hpp"

namespace qsurr {

namespace fs = std::filesystem;
using nlohmann::json;

ParamCircuit circuit_from_config(const json& spec) {
    if (spec.contains("file")) return ParamCircuit::from_json_text(read_text_file(spec.at("file").get<std::string>()));
    std::string type = spec.at("type").get<std::string>();
    if (type == "vqe_ansatz")
        return build_vqe_ansatz(spec.at("num_qubits").get<int>(), spec.value("layers", 1));
    if (type == "fspt")
        return build_fspt_circuit(spec.at("num_qubits").get<int>(), spec.at("half_periods").get<int>());
    if (type == "fold_benchmark") {
        // 2-qubit CRZ(pi) CRZ(pi) RX(x) probe circuit
        constexpr double pi = std::numbers::pi;
        ParamCircuit c;
        c.num_qubits = 2;
        c.num_slots = 1;
        c.init = InitialState::AllZero;
        c.gates.push_back(GateOp::rotation(GateKind::RX, 0, AngleSource::from_slot(0)));
        c.gates.push_back(GateOp::rotation2(GateKind::CRZ, 0, 1, AngleSource::fixed(pi)));
        c.gates.push_back(GateOp::rotation2(GateKind::CRZ, 0, 1, AngleSource::fixed(pi)));
        c.validate();
        return c;
    }
    throw ConfigError("unknown circuit type: " + type);
}

PauliNoiseSpec noise_from_config(const json& spec) {
    if (spec.is_null()) return {};
    PauliNoiseSpec n = PauliNoiseSpec::from_json_text(spec.dump());
    return n;
}

std::shared_ptr<TrainingDatasetCS> generate_dataset_cs(const ParamCircuit& circuit,
                                                       const PauliNoiseSpec& noise, int examples,
                                                       int snapshots, std::uint64_t seed) {
    if (examples < 1) throw std::invalid_argument("need at least one example");
    auto data = std::make_shared<TrainingDatasetCS>();
    data->circuit_hash = circuit.hash();
    data->noise_json = noise.to_json();
    data->seed = seed;
    data->examples.resize(static_cast<std::size_t>(examples));
    constexpr double pi = std::numbers::pi;
    parallel_for(static_cast<std::size_t>(examples), [&](std::size_t i) {
        Rng rng(derive_seed(seed, {0xc5da, i}));
        std::vector<double> x(static_cast<std::size_t>(circuit.num_slots));
        for (auto& v : x) v = rng.uniform(-pi, pi);
        auto concrete = bind_parameters(circuit, x);
        auto shadows = collect_shadows(concrete, noise, snapshots, derive_seed(seed, {0xc011, i}));
        data->examples[i] = {std::move(x), std::move(shadows)};
    });
    data->validate();
    return data;
}

void write_dataset_cs(const TrainingDatasetCS& data, const fs::path& path) {
    std::string out;
    json header{{"n", data.examples.size()},
                {"T", data.snapshots_per_example()},
                {"N", data.examples.front().shadows.num_qubits},
                {"d", data.dim()},
                {"circuit_hash", data.circuit_hash},
                {"noise", json::parse(data.noise_json.empty() ? "{}" : data.noise_json)},
                {"distribution", data.distribution_tag},
                {"seed", data.seed}};
    out += header.dump() + "\n";
    for (const auto& ex : data.examples) {
        out += json{{"x", ex.x}}.dump() + "\n";
        for (const auto& snap : ex.shadows.snapshots)
            out += snapshot_to_jsonl(snap, ex.shadows.num_qubits) + "\n";
    }
    write_text_file(path, out);
}

std::shared_ptr<TrainingDatasetCS> read_dataset_cs(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty dataset file");
    json header = json::parse(line);
    const int n = header.at("n").get<int>();
    const int t = header.at("T").get<int>();
    const int nq = header.at("N").get<int>();
    auto data = std::make_shared<TrainingDatasetCS>();
    data->circuit_hash = header.value("circuit_hash", std::uint64_t{0});
    data->noise_json = header.value("noise", json::object()).dump();
    data->seed = header.value("seed", std::uint64_t{0});
    data->distribution_tag = header.value("distribution", "uniform[-pi,pi]");
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw ConfigError("truncated dataset file");
        TrainingDatasetCS::Example ex;
        ex.x = json::parse(line).at("x").get<std::vector<double>>();
        ex.shadows.num_qubits = nq;
        for (int s = 0; s < t; ++s) {
            if (!std::getline(in, line)) throw ConfigError("truncated dataset file");
            ex.shadows.snapshots.push_back(snapshot_from_jsonl(line, nq));
        }
        data->examples.push_back(std::move(ex));
    }
    data->validate();
    return data;
}

void write_dataset_qs(const TrainingDatasetQS& data, const fs::path& path) {
    std::string out;
    json header{{"n", data.examples.size()},
                {"d", data.dim()},
                {"sampling", data.sampling_json.empty() ? json::object() : json::parse(data.sampling_json)},
                {"label_stderr", data.label_stderr}};
    out += header.dump() + "\n";
    for (const auto& ex : data.examples)
        out += json{{"x", ex.x}, {"y", ex.y}, {"shots", ex.shots_used}}.dump() + "\n";
    write_text_file(path, out);
}

TrainingDatasetQS read_dataset_qs(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty dataset file");
    json header = json::parse(line);
    TrainingDatasetQS data;
    data.sampling_json = header.value("sampling", json::object()).dump();
    data.label_stderr = header.value("label_stderr", 0.0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        data.examples.push_back({j.at("x").get<std::vector<double>>(), j.at("y").get<double>(),
                                 j.value("shots", 0)});
    }
    data.validate();
    return data;
}

std::vector<FoldBenchRow> fold_bench(const PauliNoiseSpec& noise, const std::vector<int>& folds,
                                     int train_examples, int snapshots, int lambda,
                                     int test_points, int test_shots, std::uint64_t seed,
                                     int model_reps) {
    json probe{{"type", "fold_benchmark"}};
    ParamCircuit base = circuit_from_config(probe);
    Observable obs(2, {{1.0, PauliString::from_string("ZI")}});
    constexpr double pi = std::numbers::pi;
    if (model_reps < 1) model_reps = 1;

    std::vector<FoldBenchRow> rows;
    for (int p : folds) {
        // test points and shot-averaged backend references, shared by every rep
        std::vector<std::vector<double>> test_x(static_cast<std::size_t>(test_points));
        std::vector<double> ref(static_cast<std::size_t>(test_points));
        parallel_for(static_cast<std::size_t>(test_points), [&](std::size_t i) {
            Rng rng(derive_seed(seed, {0x7e57, static_cast<std::uint64_t>(p), i}));
            test_x[i] = {rng.uniform(-pi, pi)};
            auto folded = fold_gates(bind_parameters(base, test_x[i]), p);
            double acc = 0;
            for (int s = 0; s < test_shots; ++s) {
                StateVector psi = run_noisy_trajectory(
                    folded, noise,
                    derive_seed(seed, {0x7e58, static_cast<std::uint64_t>(p), i,
                                       static_cast<std::uint64_t>(s)}));
                auto bits = sample_measurement(psi, {Pauli::Z, Pauli::Z}, 1, noise.p_e,
                                               derive_seed(seed, {0x7e59, static_cast<std::uint64_t>(p), i,
                                                                  static_cast<std::uint64_t>(s)}));
                acc += (bits[0] & 1) ? -1.0 : 1.0;
            }
            ref[i] = acc / test_shots;
        });

        std::vector<double> rep_mse(static_cast<std::size_t>(model_reps), 0.0);
        for (int rep = 0; rep < model_reps; ++rep) {
            auto data = std::make_shared<TrainingDatasetCS>();
            data->seed = seed;
            data->noise_json = noise.to_json();
            data->examples.resize(static_cast<std::size_t>(train_examples));
            parallel_for(static_cast<std::size_t>(train_examples), [&](std::size_t i) {
                Rng rng(derive_seed(seed, {0xf01d, static_cast<std::uint64_t>(p), i,
                                           static_cast<std::uint64_t>(rep)}));
                std::vector<double> x{rng.uniform(-pi, pi)};
                auto folded = fold_gates(bind_parameters(base, x), p);
                auto shadows =
                    collect_shadows(folded, noise, snapshots,
                                    derive_seed(seed, {0xf02d, static_cast<std::uint64_t>(p), i,
                                                       static_cast<std::uint64_t>(rep)}));
                data->examples[i] = {std::move(x), std::move(shadows)};
            });
            SurrogateCS model = SurrogateCS::fit(data, lambda);
            double mse = 0;
            for (int i = 0; i < test_points; ++i) {
                double d = model.predict(test_x[static_cast<std::size_t>(i)], obs) -
                           ref[static_cast<std::size_t>(i)];
                mse += d * d;
            }
            rep_mse[static_cast<std::size_t>(rep)] = mse / test_points;
        }
        double mean = 0;
        for (double v : rep_mse) mean += v / model_reps;
        double se = 0;
        if (model_reps > 1) {
            for (double v : rep_mse) se += (v - mean) * (v - mean);
            se = std::sqrt(se / (model_reps * (model_reps - 1.0)));
        } else {
            se = mean;  // single model: no spread estimate, fall back to scale
        }
        rows.push_back({p, mean, se});
    }
    return rows;
}

namespace {

Observable observable_from_config(const json& spec) {
    if (spec.is_string()) return Observable::from_json_text(read_text_file(spec.get<std::string>()));
    if (spec.contains("tfim")) {
        const auto& t = spec.at("tfim");
        return tfim_observable({t.at("num_qubits").get<int>(), t.at("coupling").get<double>(),
                                t.at("field").get<double>()});
    }
    return Observable::from_json_text(spec.dump());
}

std::vector<double> sample_input(const json& sampling, int dim, Rng& rng) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    constexpr double pi = std::numbers::pi;
    if (sampling.is_null()) {
        for (auto& v : x) v = rng.uniform(-pi, pi);
        return x;
    }
    std::string type = sampling.value("type", "uniform");
    if (type == "uniform") {
        double lo = sampling.value("low", -pi), hi = sampling.value("high", pi);
        for (auto& v : x) v = rng.uniform(lo, hi);
    } else if (type == "fspt") {
        // delta ~ Beta(alpha, beta) scaled to [0,1]; J ~ Unif[j_low, j_high]
        x[0] = rng.beta(sampling.value("beta_alpha", 0.9), sampling.value("beta_beta", 2.0));
        for (std::size_t i = 1; i < x.size(); ++i)
            x[i] = rng.uniform(sampling.value("j_low", 0.0), sampling.value("j_high", 2.0));
    } else {
        throw ConfigError("unknown sampling type: " + type);
    }
    return x;
}

struct TaskContext {
    json config;
    fs::path out;
    std::uint64_t seed;
    Manifest manifest;
};

void task_gen_data_cs(TaskContext& ctx) {
    auto circuit = circuit_from_config(ctx.config.at("circuit"));
    auto noise = noise_from_config(ctx.config.value("noise", json()));
    auto data = generate_dataset_cs(circuit, noise, ctx.config.at("n").get<int>(),
                                    ctx.config.at("T").get<int>(), ctx.seed);
    fs::path path = ctx.out / "dataset_cs.jsonl";
    write_dataset_cs(*data, path);
    ctx.manifest.add_file(path);
}

void task_gen_data_qs(TaskContext& ctx) {
    auto circuit = circuit_from_config(ctx.config.at("circuit"));
    auto noise = noise_from_config(ctx.config.value("noise", json()));
    Observable obs = observable_from_config(ctx.config.at("observable"));
    const int n = ctx.config.at("n").get<int>();
    const int shots = ctx.config.value("shots", 0);
    json sampling = ctx.config.value("sampling", json());

    TrainingDatasetQS data;
    data.sampling_json = sampling.is_null() ? "{}" : sampling.dump();
    data.examples.resize(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        Rng rng(derive_seed(ctx.seed, {0x4d5, i}));
        auto x = sample_input(sampling, circuit.num_slots, rng);
        EnergyEvaluator eval(circuit, obs, noise, shots, derive_seed(ctx.seed, {0x4d6, i}));
        data.examples[i] = {x, eval.evaluate(x), shots};
    });
    if (shots > 0) data.label_stderr = obs.norm_bound() / std::sqrt(static_cast<double>(shots));
    fs::path path = ctx.out / "dataset_qs.jsonl";
    write_dataset_qs(data, path);
    ctx.manifest.add_file(path);
}

void task_train_cs(TaskContext& ctx) {
    fs::path dataset_path = ctx.config.at("dataset").get<std::string>();
    auto data = read_dataset_cs(dataset_path);
    const int lambda = ctx.config.at("lambda_trunc").get<int>();
    SurrogateCS model = SurrogateCS::fit(data, lambda);  // validates
    json model_json{{"dataset", dataset_path.string()}, {"lambda_trunc", lambda}};
    fs::path path = ctx.out / "model_cs.json";
    write_text_file(path, model_json.dump(2) + "\n");
    ctx.manifest.add_file(path);
}

void task_train_qs(TaskContext& ctx) {
    TrainingDatasetQS data = read_dataset_qs(ctx.config.at("dataset").get<std::string>());
    const int d = data.dim();
    const int lambda_trunc = std::min(ctx.config.at("lambda_trunc").get<int>(), d);
    const double ridge = ctx.config.value("ridge_lambda", 1.0);
    FrequencySet fset;
    if (ctx.config.contains("feature_budget")) {
        std::uint64_t m = ctx.config.at("feature_budget").get<std::uint64_t>();
        BigCount card = frequency_set_cardinality(d, lambda_trunc, FreqMode::C);
        fset = (card <= BigCount{m}) ? enumerate_frequency_set(d, lambda_trunc, FreqMode::C)
                                     : sample_feature_subset(d, lambda_trunc, m, ctx.seed);
    } else {
        std::string mode = ctx.config.value("mode", "C");
        fset = enumerate_frequency_set(d, lambda_trunc, mode == "S" ? FreqMode::S : FreqMode::C);
    }
    SurrogateQS model = fit_qs(data, fset, ridge);
    fs::path path = ctx.out / "model_qs.json";
    write_text_file(path, model.to_json() + "\n");
    ctx.manifest.add_file(path);
}

std::vector<std::vector<double>> read_inputs(const json& spec) {
    std::vector<std::vector<double>> xs;
    if (spec.is_string()) {
        std::istringstream in(read_text_file(spec.get<std::string>()));
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
            xs.push_back(std::move(row));
        }
    } else {
        for (const auto& row : spec) xs.push_back(row.get<std::vector<double>>());
    }
    return xs;
}

void task_predict(TaskContext& ctx) {
    auto xs = read_inputs(ctx.config.at("inputs"));
    std::vector<double> preds(xs.size());
    std::size_t d = xs.empty() ? 0 : xs.front().size();
    json model_json = json::parse(read_text_file(ctx.config.at("model").get<std::string>()));
    if (model_json.contains("dataset")) {
        auto data = read_dataset_cs(model_json.at("dataset").get<std::string>());
        SurrogateCS model = SurrogateCS::fit(data, model_json.at("lambda_trunc").get<int>());
        Observable obs = observable_from_config(ctx.config.at("observable"));
        parallel_for(xs.size(), [&](std::size_t i) { preds[i] = model.predict(xs[i], obs); });
    } else {
        SurrogateQS model = SurrogateQS::from_json_text(model_json.dump());
        parallel_for(xs.size(), [&](std::size_t i) { preds[i] = model.predict(xs[i]); });
    }
    std::vector<std::string> cols;
    for (std::size_t j = 0; j < d; ++j) cols.push_back("x" + std::to_string(j));
    cols.push_back("prediction");
    fs::path path = ctx.out / "predictions.csv";
    CsvWriter csv(path, cols);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<double> row = xs[i];
        row.push_back(preds[i]);
        csv.row(row);
    }
    csv.close();
    ctx.manifest.add_file(path);
}

OptimizerConfig optimizer_from_config(const json& spec) {
    OptimizerConfig cfg;
    if (spec.is_null()) return cfg;
    cfg.learning_rate = spec.value("learning_rate", cfg.learning_rate);
    cfg.max_iterations = spec.value("iterations", cfg.max_iterations);
    cfg.ema_decay = spec.value("ema_decay", cfg.ema_decay);
    cfg.convergence_eps = spec.value("convergence_eps", cfg.convergence_eps);
    cfg.early_stopping = spec.value("early_stopping", cfg.early_stopping);
    return cfg;
}

void task_vqe_pretrain(TaskContext& ctx) {
    const auto& tfim = ctx.config.at("tfim");
    TfimSpec spec{tfim.at("num_qubits").get<int>(), tfim.at("coupling").get<double>(),
                  tfim.at("field").get<double>()};
    Observable ham = tfim_observable(spec);
    ParamCircuit ansatz = build_vqe_ansatz(spec.num_qubits, ctx.config.value("layers", 1));
    auto noise = noise_from_config(ctx.config.value("noise", json()));
    const auto& sur = ctx.config.at("surrogate");
    auto data = generate_dataset_cs(ansatz, noise, sur.at("n").get<int>(), sur.at("T").get<int>(),
                                    derive_seed(ctx.seed, {0xda7a}));
    SurrogateCS model = SurrogateCS::fit(data, sur.at("lambda_trunc").get<int>());
    OptimizerConfig opt = optimizer_from_config(ctx.config.value("optimizer", json()));
    Spectrum spec_bounds = exact_spectrum(ham);

    constexpr double pi = std::numbers::pi;
    Rng rng(derive_seed(ctx.seed, {0x1417}));
    std::vector<double> x0(static_cast<std::size_t>(ansatz.num_slots));
    for (auto& v : x0) v = rng.uniform(-pi, pi);

    std::vector<std::pair<std::vector<double>, double>> iterates;
    auto observer = [&iterates](int, std::span<const double> x, double f) {
        iterates.emplace_back(std::vector<double>(x.begin(), x.end()), f);
    };
    OptimResult res = pretrain(model, ham, x0, opt, observer);

    // deviation along the trace measured on the exact noisy backend
    fs::path trace_path = ctx.out / "pretrain_trace.csv";
    CsvWriter csv(trace_path, {"iteration", "objective", "deviation"});
    for (std::size_t it = 0; it < iterates.size(); ++it) {
        double f = expectation(run_noisy_exact(bind_parameters(ansatz, iterates[it].first), noise), ham);
        csv.row({static_cast<double>(it), iterates[it].second,
                 normalized_deviation(f, spec_bounds.ground, spec_bounds.top)});
    }
    csv.close();
    ctx.manifest.add_file(trace_path);

    double f_init = expectation(run_noisy_exact(bind_parameters(ansatz, x0), noise), ham);
    double f_best = expectation(run_noisy_exact(bind_parameters(ansatz, res.best_x), noise), ham);
    ShotLedger ledger = shot_ledger(static_cast<std::uint64_t>(sur.at("n").get<int>()),
                                    static_cast<std::uint64_t>(sur.at("T").get<int>()), 0,
                                    static_cast<std::uint64_t>(ansatz.num_slots),
                                    ctx.config.value("baseline_shots_per_eval", std::uint64_t{40000}),
                                    static_cast<std::uint64_t>(opt.max_iterations));
    json summary{{"x0", x0},
                 {"x_hat", res.best_x},
                 {"surrogate_value", res.best_value},
                 {"deviation_initial", normalized_deviation(f_init, spec_bounds.ground, spec_bounds.top)},
                 {"deviation_pretrained", normalized_deviation(f_best, spec_bounds.ground, spec_bounds.top)},
                 {"iterations", res.iterations_run},
                 {"ground_energy", spec_bounds.ground},
                 {"max_energy", spec_bounds.top},
                 {"shot_ledger", json::parse(ledger.to_json())}};
    fs::path sum_path = ctx.out / "summary.json";
    write_text_file(sum_path, summary.dump(2) + "\n");
    ctx.manifest.add_file(sum_path);
}

void task_vqe_finetune(TaskContext& ctx) {
    const auto& tfim = ctx.config.at("tfim");
    TfimSpec spec{tfim.at("num_qubits").get<int>(), tfim.at("coupling").get<double>(),
                  tfim.at("field").get<double>()};
    Observable ham = tfim_observable(spec);
    ParamCircuit ansatz = build_vqe_ansatz(spec.num_qubits, ctx.config.value("layers", 1));
    auto noise = noise_from_config(ctx.config.value("noise", json()));
    std::vector<double> x_start;
    if (ctx.config.contains("start_from")) {
        json summary = json::parse(read_text_file(ctx.config.at("start_from").get<std::string>()));
        x_start = summary.at("x_hat").get<std::vector<double>>();
    } else {
        x_start = ctx.config.at("x_start").get<std::vector<double>>();
    }
    OptimizerConfig opt = optimizer_from_config(ctx.config.value("optimizer", json()));
    const int shots = ctx.config.value("shots", 0);
    FinetuneResult res = finetune(ansatz, ham, x_start, noise, opt, shots,
                                  derive_seed(ctx.seed, {0xf1e7}));
    Spectrum bounds = exact_spectrum(ham);

    fs::path trace_path = ctx.out / "finetune_trace.csv";
    CsvWriter csv(trace_path, {"iteration", "objective"});
    for (std::size_t it = 0; it < res.trace.size(); ++it)
        csv.row({static_cast<double>(it), res.trace[it]});
    csv.close();
    ctx.manifest.add_file(trace_path);

    double f_best = expectation(run_noisy_exact(bind_parameters(ansatz, res.best_x), noise), ham);
    ShotLedger ledger = shot_ledger(0, 0, static_cast<std::uint64_t>(res.iterations_run),
                                    static_cast<std::uint64_t>(ansatz.num_slots),
                                    static_cast<std::uint64_t>(shots == 0 ? 0 : shots),
                                    static_cast<std::uint64_t>(opt.max_iterations));
    json summary{{"x_star", res.best_x},
                 {"best_measured", res.best_value},
                 {"deviation_final", normalized_deviation(f_best, bounds.ground, bounds.top)},
                 {"shots_used", res.shots_used},
                 {"shot_ledger", json::parse(ledger.to_json())}};
    fs::path sum_path = ctx.out / "summary.json";
    write_text_file(sum_path, summary.dump(2) + "\n");
    ctx.manifest.add_file(sum_path);
}

void task_fspt_scan(TaskContext& ctx) {
    FsptScanConfig cfg;
    cfg.num_qubits = ctx.config.value("num_qubits", 6);
    cfg.half_periods = ctx.config.value("half_periods", 40);
    cfg.disorder_samples = ctx.config.value("disorder_samples", 20);
    cfg.peak_fraction = ctx.config.value("peak_fraction", 0.95);
    cfg.seed = ctx.seed;
    if (ctx.config.contains("delta_grid")) {
        const auto& g = ctx.config.at("delta_grid");
        if (g.is_array()) {
            cfg.delta_grid = g.get<std::vector<double>>();
        } else {
            double lo = g.at("low").get<double>(), hi = g.at("high").get<double>();
            int count = g.at("count").get<int>();
            for (int i = 0; i < count; ++i)
                cfg.delta_grid.push_back(lo + (hi - lo) * i / std::max(1, count - 1));
        }
    } else {
        cfg.delta_grid = FsptScanConfig::default_delta_grid();
    }
    std::string backend = ctx.config.value("backend", "exact");
    auto noise = noise_from_config(ctx.config.value("noise", json()));

    SurrogateBank bank;
    const SurrogateBank* bank_ptr = nullptr;
    if (backend == "bank") {
        cfg.backend = FsptBackend::SurrogateBank;
        BankTrainingConfig bcfg;
        if (ctx.config.contains("bank")) {
            const auto& b = ctx.config.at("bank");
            bcfg.examples = b.value("examples", bcfg.examples);
            bcfg.label_shots = b.value("label_shots", bcfg.label_shots);
            bcfg.trajectories = b.value("trajectories", bcfg.trajectories);
            bcfg.feature_budget = b.value("feature_budget", bcfg.feature_budget);
            bcfg.lambda_trunc = b.value("lambda_trunc", bcfg.lambda_trunc);
            bcfg.ridge_lambda = b.value("ridge_lambda", bcfg.ridge_lambda);
        }
        bank = train_surrogate_bank(cfg.num_qubits, cfg.half_periods, bcfg, noise,
                                    derive_seed(ctx.seed, {0xba5eed}));
        bank_ptr = &bank;
        // bank manifest + model files
        fs::path bank_dir = ctx.out / "bank";
        json files = json::array();
        for (int i = 0; i < bank.num_qubits; ++i)
            for (int k = 1; k <= bank.half_periods; ++k) {
                fs::path mp = bank_dir / ("model_q" + std::to_string(i) + "_k" + std::to_string(k) + ".json");
                write_text_file(mp, bank.at(i, k).to_json() + "\n");
                char hex[32];
                std::snprintf(hex, sizeof(hex), "%016llx",
                              static_cast<unsigned long long>(fnv1a_file(mp)));
                files.push_back({{"file", mp.filename().string()}, {"fnv1a64", hex}});
            }
        fs::path bman = ctx.out / "bank_manifest.json";
        write_text_file(bman, json{{"num_qubits", bank.num_qubits},
                                   {"half_periods", bank.half_periods},
                                   {"models", files}}
                                  .dump(2) +
                                  "\n");
        ctx.manifest.add_file(bman);
    } else if (backend == "trajectory") {
        cfg.backend = FsptBackend::Trajectory;
        cfg.trajectories = ctx.config.value("trajectories", 32);
    } else {
        cfg.backend = FsptBackend::Exact;
    }

    VarianceScanResult res = variance_scan(cfg, noise, bank_ptr);

    fs::path sum_path = ctx.out / "scan_summary.csv";
    CsvWriter sum_csv(sum_path, {"delta", "variance", "stddev"});
    for (std::size_t l = 0; l < res.delta_grid.size(); ++l)
        sum_csv.row({res.delta_grid[l], res.variance[l], res.stddev[l]});
    sum_csv.close();
    ctx.manifest.add_file(sum_path);

    fs::path res_path = ctx.out / "scan_result.json";
    write_text_file(res_path, res.to_json() + "\n");
    ctx.manifest.add_file(res_path);
}

void task_eval(TaskContext& ctx) {
    auto load_column = [](const json& spec) {
        std::vector<double> v;
        if (spec.is_string()) {
            std::istringstream in(read_text_file(spec.get<std::string>()));
            std::string line;
            std::getline(in, line);  // header
            while (std::getline(in, line))
                if (!line.empty()) v.push_back(std::stod(line.substr(line.rfind(',') + 1)));
        } else {
            v = spec.get<std::vector<double>>();
        }
        return v;
    };
    auto reference = load_column(ctx.config.at("reference"));
    auto prediction = load_column(ctx.config.at("prediction"));
    MetricsReport rep = compute_metrics(reference, prediction);
    fs::path path = ctx.out / "metrics.json";
    write_text_file(path, rep.to_json() + "\n");
    ctx.manifest.add_file(path);

    fs::path kde_path = ctx.out / "kde.csv";
    CsvWriter csv(kde_path, {"grid", "reference_density", "prediction_density"});
    for (std::size_t i = 0; i < rep.kde_grid.size(); ++i)
        csv.row({rep.kde_grid[i], rep.kde_reference[i], rep.kde_prediction[i]});
    csv.close();
    ctx.manifest.add_file(kde_path);
}

void task_oracle_coeffs(TaskContext& ctx) {
    ParamCircuit circuit = circuit_from_config(ctx.config.at("circuit"));
    Observable obs = observable_from_config(ctx.config.at("observable"));
    auto noise = noise_from_config(ctx.config.value("noise", json()));
    const int d = circuit.num_slots;
    auto f = [&](std::span<const double> x) {
        auto c = bind_parameters(circuit, x);
        if (noise.is_zero()) return expectation(run_pure(c), obs);
        return expectation(run_noisy_exact(c, noise), obs);
    };
    auto coeffs = extract_coefficients(f, d);
    fs::path path = ctx.out / "coefficients.csv";
    CsvWriter csv(path, {"omega", "alpha"});
    for (const auto& [w, a] : coeffs) csv.row_mixed({w.str(), format_double(a)});
    csv.close();
    ctx.manifest.add_file(path);
}

void task_fold_bench(TaskContext& ctx) {
    auto noise = noise_from_config(ctx.config.value("noise", json()));
    std::vector<int> folds = ctx.config.value("folds", std::vector<int>{1, 4, 8, 16});
    auto rows = fold_bench(noise, folds, ctx.config.value("n", 50), ctx.config.value("T", 1000),
                           ctx.config.value("lambda_trunc", 1), ctx.config.value("test_points", 50),
                           ctx.config.value("test_shots", 20000), ctx.seed);
    fs::path path = ctx.out / "fold_bench.csv";
    CsvWriter csv(path, {"fold_factor", "mse", "mse_stderr"});
    for (const auto& r : rows) csv.row({static_cast<double>(r.fold_factor), r.mse, r.mse_stderr});
    csv.close();
    ctx.manifest.add_file(path);
}

}  // namespace

void run_config(const json& config, const fs::path& out_dir,
                std::optional<std::uint64_t> seed_override) {
    if (!config.contains("task")) throw ConfigError("config needs a 'task' field");
    std::string task = config.at("task").get<std::string>();
    std::uint64_t seed = seed_override ? *seed_override : config.value("seed", std::uint64_t{1});

    fs::path out = out_dir;
    if (const char* env = std::getenv("SURR_OUT_DIR")) out = fs::path(env);
    std::filesystem::create_directories(out);

    TaskContext ctx{config, out, seed, Manifest(config, seed)};
    if (task == "gen-data-cs") task_gen_data_cs(ctx);
    else if (task == "gen-data-qs") task_gen_data_qs(ctx);
    else if (task == "train-cs") task_train_cs(ctx);
    else if (task == "train-qs") task_train_qs(ctx);
    else if (task == "predict") task_predict(ctx);
    else if (task == "vqe-pretrain") task_vqe_pretrain(ctx);
    else if (task == "vqe-finetune") task_vqe_finetune(ctx);
    else if (task == "fspt-scan") task_fspt_scan(ctx);
    else if (task == "eval") task_eval(ctx);
    else if (task == "oracle-coeffs") task_oracle_coeffs(ctx);
    else if (task == "fold-bench") task_fold_bench(ctx);
    else throw ConfigError("unknown task: " + task);

    ctx.manifest.write(out / "manifest.json");
}

}  // namespace qsurr
