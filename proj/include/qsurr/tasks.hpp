#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qsurr/circuit.hpp"
#include "qsurr/noise.hpp"
#include "qsurr/surrogate_cs.hpp"
#include "qsurr/surrogate_qs.hpp"

namespace qsurr {

// Executes one named task from a parsed config, writing every artifact under
// out_dir together with a manifest. Deterministic for a fixed (config, seed).
void run_config(const nlohmann::json& config, const std::filesystem::path& out_dir,
                std::optional<std::uint64_t> seed_override = std::nullopt);

// exposed pieces reused by tests and by several tasks

ParamCircuit circuit_from_config(const nlohmann::json& spec);
PauliNoiseSpec noise_from_config(const nlohmann::json& spec);

std::shared_ptr<TrainingDatasetCS> generate_dataset_cs(const ParamCircuit& circuit,
                                                       const PauliNoiseSpec& noise, int examples,
                                                       int snapshots, std::uint64_t seed);

void write_dataset_cs(const TrainingDatasetCS& data, const std::filesystem::path& path);
std::shared_ptr<TrainingDatasetCS> read_dataset_cs(const std::filesystem::path& path);

void write_dataset_qs(const TrainingDatasetQS& data, const std::filesystem::path& path);
TrainingDatasetQS read_dataset_qs(const std::filesystem::path& path);

struct FoldBenchRow {
    int fold_factor;
    double mse;
    double mse_stderr;  // uncertainty of the MSE estimate itself
};
// 2-qubit CRZ/CRZ/RX benchmark: trains kernel-mean surrogates per fold factor
// and reports surrogate-vs-backend MSE on fresh test points. model_reps > 1
// averages the MSE over independently collected training sets (the reference
// measurements are shared), which separates the folding trend from the
// frozen-shadow noise floor of a single model.
std::vector<FoldBenchRow> fold_bench(const PauliNoiseSpec& noise, const std::vector<int>& folds,
                                     int train_examples, int snapshots, int lambda,
                                     int test_points, int test_shots, std::uint64_t seed,
                                     int model_reps = 1);

}  // namespace qsurr
