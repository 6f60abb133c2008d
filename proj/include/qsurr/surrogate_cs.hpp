#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qsurr/features.hpp"
#include "qsurr/observable.hpp"
#include "qsurr/shadows.hpp"

namespace qsurr {

// Shadow-labelled training set for the kernel-mean predictor. Inputs live in
// [-pi, pi]^d; other sampling distributions are allowed but tagged.
struct TrainingDatasetCS {
    struct Example {
        std::vector<double> x;
        ShadowSet shadows;
    };
    std::vector<Example> examples;

    // metadata recorded with the dataset
    std::uint64_t circuit_hash = 0;
    std::string noise_json;
    std::string distribution_tag = "uniform[-pi,pi]";
    std::uint64_t seed = 0;

    int dim() const { return examples.empty() ? 0 : static_cast<int>(examples.front().x.size()); }
    int snapshots_per_example() const {
        return examples.empty() ? 0 : examples.front().shadows.size();
    }
    void validate() const;
};

// Kernel-mean predictor over the stored dataset:
//   h(x', O) = (1/n) sum_i kappa_Lambda(x', x_i) g(x_i, O),
// with g the shadow estimate. Fitting stores references; there is nothing to
// optimize. Per-observable estimate vectors are cached write-once.
class SurrogateCS {
public:
    SurrogateCS() = default;
    static SurrogateCS fit(std::shared_ptr<const TrainingDatasetCS> data, int lambda);

    int lambda() const { return lambda_; }
    int dim() const { return data_->dim(); }
    const TrainingDatasetCS& dataset() const { return *data_; }

    double predict(std::span<const double> x, const Observable& obs) const;
    std::vector<double> predict_gradient(std::span<const double> x, const Observable& obs) const;

    // mean of |h(x, O) - f_ref|^2 over a test set
    double empirical_risk(const std::vector<std::pair<std::vector<double>, double>>& test,
                          const Observable& obs) const;

    // cached shadow estimates g(x_i, O), in dataset order
    std::shared_ptr<const std::vector<double>> shadow_estimates(const Observable& obs) const;

private:
    struct EstimateCache {
        std::mutex mutex;
        std::unordered_map<std::uint64_t, std::shared_ptr<const std::vector<double>>> entries;
    };
    std::shared_ptr<const TrainingDatasetCS> data_;
    int lambda_ = 0;
    std::shared_ptr<EstimateCache> cache_ = std::make_shared<EstimateCache>();
};

}  // namespace qsurr
