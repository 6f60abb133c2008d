#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qsurr {

// The six-metric evaluation report. R^2 and Pearson are absent (with a
// reason) when the reference has zero variance.
struct MetricsReport {
    double mae = 0.0;
    double mse = 0.0;
    double wasserstein = 0.0;
    std::optional<double> r2;
    std::optional<double> pearson;
    std::string undefined_reason;

    // Gaussian KDE curves with Scott's-rule bandwidth eta = m^(-1/5)
    double kde_bandwidth = 0.0;
    std::vector<double> kde_grid;
    std::vector<double> kde_reference;
    std::vector<double> kde_prediction;

    std::string to_json() const;
};

MetricsReport compute_metrics(const std::vector<double>& reference,
                              const std::vector<double>& prediction, int kde_points = 101);

}  // namespace qsurr
