#include "qsurr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qsurr {

MetricsReport compute_metrics(const std::vector<double>& reference,
                              const std::vector<double>& prediction, int kde_points) {
    if (reference.empty() || reference.size() != prediction.size())
        throw std::invalid_argument("metrics need equal nonzero-length inputs");
    const std::size_t m = reference.size();
    MetricsReport rep;

    double ref_mean = 0, pred_mean = 0;
    for (std::size_t i = 0; i < m; ++i) {
        ref_mean += reference[i];
        pred_mean += prediction[i];
    }
    ref_mean /= static_cast<double>(m);
    pred_mean /= static_cast<double>(m);

    double ss_res = 0, ss_ref = 0, ss_pred = 0, cov = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double d = reference[i] - prediction[i];
        rep.mae += std::fabs(d);
        ss_res += d * d;
        double dr = reference[i] - ref_mean;
        double dp = prediction[i] - pred_mean;
        ss_ref += dr * dr;
        ss_pred += dp * dp;
        cov += dr * dp;
    }
    rep.mae /= static_cast<double>(m);
    rep.mse = ss_res / static_cast<double>(m);

    if (ss_ref > 0) {
        rep.r2 = 1.0 - ss_res / ss_ref;
        if (ss_pred > 0) rep.pearson = cov / std::sqrt(ss_ref * ss_pred);
        else rep.undefined_reason = "prediction variance is zero";
    } else {
        rep.undefined_reason = "reference variance is zero";
    }

    // 1-D Wasserstein: exact for equal-size empirical distributions as the
    // mean absolute difference of sorted samples
    std::vector<double> rs = reference, ps = prediction;
    std::sort(rs.begin(), rs.end());
    std::sort(ps.begin(), ps.end());
    for (std::size_t i = 0; i < m; ++i) rep.wasserstein += std::fabs(rs[i] - ps[i]);
    rep.wasserstein /= static_cast<double>(m);

    // KDE over a shared grid spanning both samples
    rep.kde_bandwidth = std::pow(static_cast<double>(m), -0.2);
    double lo = std::min(rs.front(), ps.front()) - 3 * rep.kde_bandwidth;
    double hi = std::max(rs.back(), ps.back()) + 3 * rep.kde_bandwidth;
    if (!(hi > lo)) hi = lo + 1.0;
    rep.kde_grid.resize(static_cast<std::size_t>(kde_points));
    rep.kde_reference.assign(static_cast<std::size_t>(kde_points), 0.0);
    rep.kde_prediction.assign(static_cast<std::size_t>(kde_points), 0.0);
    const double norm = 1.0 / (static_cast<double>(m) * rep.kde_bandwidth * std::sqrt(2 * std::numbers::pi));
    for (int g = 0; g < kde_points; ++g) {
        double s = lo + (hi - lo) * g / (kde_points - 1);
        rep.kde_grid[static_cast<std::size_t>(g)] = s;
        double fr = 0, fp = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double ur = (s - reference[i]) / rep.kde_bandwidth;
            double up = (s - prediction[i]) / rep.kde_bandwidth;
            fr += std::exp(-0.5 * ur * ur);
            fp += std::exp(-0.5 * up * up);
        }
        rep.kde_reference[static_cast<std::size_t>(g)] = norm * fr;
        rep.kde_prediction[static_cast<std::size_t>(g)] = norm * fp;
    }
    return rep;
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["mae"] = mae;
    j["mse"] = mse;
    j["wasserstein"] = wasserstein;
    j["r2"] = r2 ? nlohmann::json(*r2) : nlohmann::json(nullptr);
    j["pearson"] = pearson ? nlohmann::json(*pearson) : nlohmann::json(nullptr);
    if (!undefined_reason.empty()) j["undefined_reason"] = undefined_reason;
    j["kde"] = {{"bandwidth", kde_bandwidth},
                {"grid", kde_grid},
                {"reference", kde_reference},
                {"prediction", kde_prediction}};
    return j.dump();
}

}  // namespace qsurr
