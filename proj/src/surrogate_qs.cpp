#include "qsurr/surrogate_qs.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qsurr/parallel.hpp"
#include "qsurr/rng.hpp"

namespace qsurr {

void TrainingDatasetQS::validate() const {
    if (examples.empty()) throw std::invalid_argument("empty training dataset");
    const std::size_t d = examples.front().x.size();
    for (const auto& ex : examples) {
        if (ex.x.size() != d) throw std::invalid_argument("inconsistent input dimension");
        if (!std::isfinite(ex.y)) throw std::invalid_argument("non-finite label");
        for (double v : ex.x)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite training input");
    }
}

std::vector<double> SurrogateQS::transformed(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    if (!input_scale.empty())
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = input_scale[j] * y[j] + input_offset[j];
    return y;
}

double SurrogateQS::predict(std::span<const double> x) const {
    if (x.size() != slot_multiplicity.size())
        throw std::invalid_argument("input dimension mismatch");
    auto y = transformed(x);
    double acc = 0;
    for (std::size_t f = 0; f < features.size(); ++f)
        acc += weights[f] * phi_collapsed(features[f], y);
    return acc;
}

namespace {

Eigen::MatrixXd feature_matrix(const TrainingDatasetQS& data, const SurrogateQS& model) {
    const auto n = static_cast<Eigen::Index>(data.examples.size());
    const auto f = static_cast<Eigen::Index>(model.features.size());
    Eigen::MatrixXd X(n, f);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        auto y = model.transformed(data.examples[i].x);
        for (Eigen::Index j = 0; j < f; ++j)
            X(static_cast<Eigen::Index>(i), j) = phi_collapsed(model.features[static_cast<std::size_t>(j)], y);
    });
    return X;
}

// SPD solve with jitter escalation on factorization failure
Eigen::VectorXd solve_spd(Eigen::MatrixXd a, const Eigen::VectorXd& b, double* jitter_out) {
    double jitter = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            if (jitter_out) *jitter_out = jitter;
            return llt.solve(b);
        }
        double bump = 1e-12 * a.trace() / static_cast<double>(a.rows());
        if (bump <= 0) bump = 1e-12;
        bump *= std::pow(10.0, attempt);
        a.diagonal().array() += bump;
        jitter += bump;
    }
    throw std::runtime_error("ridge system not positive definite even after jitter escalation");
}

}  // namespace

SurrogateQS fit_qs(const TrainingDatasetQS& data, const FrequencySet& freqset, double lambda,
                   std::span<const int> slot_of_gate, int base_dim, const RidgeOptions& opts,
                   FitReport* report, const TrainingDatasetQS* validation,
                   std::span<const double> input_scale, std::span<const double> input_offset) {
    data.validate();
    if (lambda <= 0) throw std::invalid_argument("ridge requires lambda > 0");
    if (data.dim() != base_dim) throw std::invalid_argument("dataset dimension != base dimension");

    SurrogateQS model;
    model.freqset = freqset;
    model.lambda = lambda;
    model.collapsed = true;
    if (!input_scale.empty()) {
        if (input_scale.size() != static_cast<std::size_t>(base_dim) ||
            input_offset.size() != static_cast<std::size_t>(base_dim))
            throw std::invalid_argument("input transform dimension mismatch");
        model.input_scale.assign(input_scale.begin(), input_scale.end());
        model.input_offset.assign(input_offset.begin(), input_offset.end());
    }
    // base-coordinate multiplicities derived from the gate -> slot map
    model.slot_multiplicity.assign(static_cast<std::size_t>(base_dim), 0);
    for (int s : slot_of_gate) ++model.slot_multiplicity[static_cast<std::size_t>(s)];
    model.features.reserve(freqset.members.size());
    for (const auto& w : freqset.members)
        model.features.push_back(collapse_frequency(w, slot_of_gate, base_dim));

    const Eigen::MatrixXd X = feature_matrix(data, model);
    const auto n = X.rows();
    const auto f = X.cols();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = data.examples[static_cast<std::size_t>(i)].y;

    FitReport local;
    if (opts.iterative) {
        // plain gradient descent on the same objective; records held-out MSE
        Eigen::VectorXd w = Eigen::VectorXd::Zero(f);
        Eigen::MatrixXd Xv;
        Eigen::VectorXd yv;
        if (validation) {
            Xv = feature_matrix(*validation, model);
            yv.resize(Xv.rows());
            for (Eigen::Index i = 0; i < Xv.rows(); ++i)
                yv(i) = validation->examples[static_cast<std::size_t>(i)].y;
        }
        const double lr = opts.learning_rate / static_cast<double>(n);
        for (int it = 0; it < opts.iterations; ++it) {
            Eigen::VectorXd grad = 2.0 * (X.transpose() * (X * w - y)) + 2.0 * lambda * w;
            w -= lr * grad;
            if (validation) local.iteration_mse.push_back((Xv * w - yv).squaredNorm() /
                                                          static_cast<double>(Xv.rows()));
        }
        model.weights.assign(w.data(), w.data() + w.size());
    } else {
        bool dual = (n < f);
        if (opts.force_primal) dual = false;
        if (opts.force_dual) dual = true;
        Eigen::VectorXd w;
        double jitter = 0;
        if (dual) {
            Eigen::MatrixXd K = X * X.transpose();
            K.diagonal().array() += lambda;
            Eigen::VectorXd beta = solve_spd(std::move(K), y, &jitter);
            w = X.transpose() * beta;
        } else {
            Eigen::MatrixXd G = X.transpose() * X;
            G.diagonal().array() += lambda;
            w = solve_spd(std::move(G), X.transpose() * y, &jitter);
        }
        local.used_dual = dual;
        local.effective_lambda = lambda + jitter;
        model.weights.assign(w.data(), w.data() + w.size());
    }
    if (report) *report = local;
    return model;
}

SurrogateQS fit_qs(const TrainingDatasetQS& data, const FrequencySet& freqset, double lambda,
                   const RidgeOptions& opts, FitReport* report) {
    std::vector<int> identity(static_cast<std::size_t>(freqset.d));
    for (int i = 0; i < freqset.d; ++i) identity[static_cast<std::size_t>(i)] = i;
    SurrogateQS m = fit_qs(data, freqset, lambda, identity, freqset.d, opts, report, nullptr);
    m.collapsed = false;
    return m;
}

namespace {

// shared solver core once the model's feature columns are fixed
void solve_ridge(const TrainingDatasetQS& data, SurrogateQS& model, const RidgeOptions& opts) {
    const Eigen::MatrixXd X = feature_matrix(data, model);
    const auto n = X.rows();
    const auto f = X.cols();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = data.examples[static_cast<std::size_t>(i)].y;
    bool dual = (n < f);
    if (opts.force_primal) dual = false;
    if (opts.force_dual) dual = true;
    Eigen::VectorXd w;
    double jitter = 0;
    if (dual) {
        Eigen::MatrixXd K = X * X.transpose();
        K.diagonal().array() += model.lambda;
        w = X.transpose() * solve_spd(std::move(K), y, &jitter);
    } else {
        Eigen::MatrixXd G = X.transpose() * X;
        G.diagonal().array() += model.lambda;
        w = solve_spd(std::move(G), X.transpose() * y, &jitter);
    }
    model.weights.assign(w.data(), w.data() + w.size());
}

}  // namespace

SurrogateQS fit_qs_collapsed(const TrainingDatasetQS& data,
                             std::vector<CollapsedFeatureIndex> features, double lambda,
                             std::span<const int> multiplicity, const RidgeOptions& opts,
                             std::span<const double> input_scale,
                             std::span<const double> input_offset) {
    data.validate();
    if (lambda <= 0) throw std::invalid_argument("ridge requires lambda > 0");
    SurrogateQS model;
    model.lambda = lambda;
    model.collapsed = true;
    model.explicit_features = true;
    model.slot_multiplicity.assign(multiplicity.begin(), multiplicity.end());
    model.features = std::move(features);
    for (const auto& idx : model.features) idx.validate(multiplicity);
    if (!input_scale.empty()) {
        model.input_scale.assign(input_scale.begin(), input_scale.end());
        model.input_offset.assign(input_offset.begin(), input_offset.end());
    }
    solve_ridge(data, model, opts);
    return model;
}

double ridge_residual(const SurrogateQS& model, const TrainingDatasetQS& data) {
    const auto n = static_cast<Eigen::Index>(data.examples.size());
    const auto f = static_cast<Eigen::Index>(model.features.size());
    Eigen::MatrixXd X(n, f);
    Eigen::VectorXd y(n), w(f);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto tx = model.transformed(data.examples[static_cast<std::size_t>(i)].x);
        for (Eigen::Index j = 0; j < f; ++j)
            X(i, j) = phi_collapsed(model.features[static_cast<std::size_t>(j)], tx);
        y(i) = data.examples[static_cast<std::size_t>(i)].y;
    }
    for (Eigen::Index j = 0; j < f; ++j) w(j) = model.weights[static_cast<std::size_t>(j)];
    Eigen::VectorXd grad = 2.0 * (X.transpose() * (X * w - y)) + 2.0 * model.lambda * w;
    return grad.lpNorm<Eigen::Infinity>();
}

std::string SurrogateQS::to_json() const {
    nlohmann::json j;
    if (explicit_features) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : features) arr.push_back({{"p", f.plus}, {"m", f.minus}});
        j["features"] = arr;
    } else {
        j["freqset"] = nlohmann::json::parse(freqset.descriptor_json());
    }
    j["w"] = weights;
    j["lambda"] = lambda;
    j["collapsed"] = collapsed;
    j["multiplicity"] = slot_multiplicity;
    if (!input_scale.empty()) {
        j["input_scale"] = input_scale;
        j["input_offset"] = input_offset;
    }
    return j.dump();
}

SurrogateQS SurrogateQS::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SurrogateQS m;
    m.weights = j.at("w").get<std::vector<double>>();
    m.lambda = j.at("lambda").get<double>();
    m.collapsed = j.at("collapsed").get<bool>();
    m.slot_multiplicity = j.at("multiplicity").get<std::vector<int>>();
    if (j.contains("input_scale")) {
        m.input_scale = j.at("input_scale").get<std::vector<double>>();
        m.input_offset = j.at("input_offset").get<std::vector<double>>();
    }
    if (j.contains("features")) {
        m.explicit_features = true;
        for (const auto& f : j.at("features")) {
            CollapsedFeatureIndex idx;
            idx.plus = f.at("p").get<std::vector<int>>();
            idx.minus = f.at("m").get<std::vector<int>>();
            m.features.push_back(std::move(idx));
        }
        if (m.weights.size() != m.features.size())
            throw std::invalid_argument("weight vector length does not match feature list");
        return m;
    }
    m.freqset = FrequencySet::from_descriptor_json(j.at("freqset").dump());
    if (m.weights.size() != m.freqset.members.size())
        throw std::invalid_argument("weight vector length does not match frequency set");
    // rebuild the collapsed features from the multiplicities
    const int base_dim = static_cast<int>(m.slot_multiplicity.size());
    std::vector<int> slot_of_gate;
    for (int j2 = 0; j2 < base_dim; ++j2)
        for (int r = 0; r < m.slot_multiplicity[static_cast<std::size_t>(j2)]; ++r)
            slot_of_gate.push_back(j2);
    if (static_cast<int>(slot_of_gate.size()) != m.freqset.d)
        throw std::invalid_argument("multiplicities do not match frequency-set dimension");
    for (const auto& w : m.freqset.members)
        m.features.push_back(collapse_frequency(w, slot_of_gate, base_dim));
    return m;
}

TruncationCheckReport worst_case_truncation_check(
    const std::function<double(std::span<const double>)>& f, int d, const PauliNoiseSpec& noise,
    double norm_bound, int lambda, FreqMode mode, double range, int samples, std::uint64_t seed) {
    if (d > 8) throw std::length_error("truncation check guard: d <= 8");
    auto coeffs = extract_coefficients(f, d);

    // tail of the expansion outside the truncated set
    std::map<FrequencyVector, double> tail;
    for (const auto& [w, a] : coeffs) {
        bool kept = (mode == FreqMode::S) ? (w.minus_count() <= lambda) : (w.hamming() <= lambda);
        if (!kept) tail.emplace(w, a);
    }

    Rng rng(seed);
    std::vector<double> x(static_cast<std::size_t>(d));
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        for (auto& v : x) v = rng.uniform(-range, range);
        worst = std::max(worst, std::fabs(evaluate_expansion(tail, x)));
    }

    const double q = std::max(0.0, 1.0 - 2.0 * (std::min(noise.p_x, noise.p_y) + noise.p_z));
    constexpr double e = std::numbers::e;
    const double l1 = static_cast<double>(lambda) + 1.0;
    const double arg = (mode == FreqMode::S) ? (e * d * q * range) / l1
                                             : (e * d * q * (1.0 + range)) / l1;
    TruncationCheckReport rep;
    rep.measured_max_error = worst;
    rep.analytic_bound = norm_bound * std::pow(arg, l1);
    rep.within_bound = worst <= rep.analytic_bound + 1e-9;
    rep.lambda = lambda;
    rep.mode = mode;
    return rep;
}

}  // namespace qsurr
