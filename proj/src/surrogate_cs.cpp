#include "qsurr/surrogate_cs.hpp"

#include <cmath>
#include <stdexcept>

#include "qsurr/parallel.hpp"

namespace qsurr {

void TrainingDatasetCS::validate() const {
    if (examples.empty()) throw std::invalid_argument("empty training dataset");
    const std::size_t d = examples.front().x.size();
    const int t = examples.front().shadows.size();
    for (const auto& ex : examples) {
        if (ex.x.size() != d) throw std::invalid_argument("inconsistent input dimension");
        if (ex.shadows.size() != t) throw std::invalid_argument("inconsistent snapshot count");
        for (double v : ex.x)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite training input");
    }
}

SurrogateCS SurrogateCS::fit(std::shared_ptr<const TrainingDatasetCS> data, int lambda) {
    if (!data) throw std::invalid_argument("null dataset");
    data->validate();
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    SurrogateCS m;
    m.data_ = std::move(data);
    m.lambda_ = lambda;
    return m;
}

std::shared_ptr<const std::vector<double>> SurrogateCS::shadow_estimates(
    const Observable& obs) const {
    const std::uint64_t key = obs.hash();
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->entries.find(key);
        if (it != cache_->entries.end()) return it->second;
    }
    auto values = std::make_shared<std::vector<double>>(data_->examples.size());
    parallel_for(data_->examples.size(), [&](std::size_t i) {
        (*values)[i] = estimate_observable(data_->examples[i].shadows, obs);
    });
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto [it, inserted] = cache_->entries.emplace(key, values);
    return it->second;  // first writer wins; later computations are identical
}

double SurrogateCS::predict(std::span<const double> x, const Observable& obs) const {
    if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("input dimension mismatch");
    auto g = shadow_estimates(obs);
    double acc = 0;
    for (std::size_t i = 0; i < data_->examples.size(); ++i)
        acc += kernel(x, data_->examples[i].x, lambda_) * (*g)[i];
    return acc / static_cast<double>(data_->examples.size());
}

std::vector<double> SurrogateCS::predict_gradient(std::span<const double> x,
                                                  const Observable& obs) const {
    if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("input dimension mismatch");
    auto g = shadow_estimates(obs);
    std::vector<double> grad(x.size(), 0.0);
    for (std::size_t i = 0; i < data_->examples.size(); ++i) {
        auto kg = kernel_gradient(x, data_->examples[i].x, lambda_);
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += kg[j] * (*g)[i];
    }
    const double inv_n = 1.0 / static_cast<double>(data_->examples.size());
    for (double& v : grad) v *= inv_n;
    return grad;
}

double SurrogateCS::empirical_risk(
    const std::vector<std::pair<std::vector<double>, double>>& test, const Observable& obs) const {
    if (test.empty()) throw std::invalid_argument("empty test set");
    std::vector<double> sq(test.size());
    parallel_for(test.size(), [&](std::size_t i) {
        double diff = predict(test[i].first, obs) - test[i].second;
        sq[i] = diff * diff;
    });
    double acc = 0;
    for (double v : sq) acc += v;
    return acc / static_cast<double>(test.size());
}

}  // namespace qsurr
