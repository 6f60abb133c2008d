#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsurr/features.hpp"
#include "qsurr/noise.hpp"

namespace qsurr {

// (x, y) pairs with shot bookkeeping for the ridge surrogate of one fixed
// observable. Inputs are the base (physical) parameters.
struct TrainingDatasetQS {
    struct Example {
        std::vector<double> x;
        double y;
        int shots_used;
    };
    std::vector<Example> examples;
    std::string sampling_json;   // distribution descriptor
    double label_stderr = 0.0;   // estimated epsilon_l (binomial standard error)

    int dim() const { return examples.empty() ? 0 : static_cast<int>(examples.front().x.size()); }
    void validate() const;
};

// Explicit-weight surrogate over truncated trigonometric features. Features
// are stored in collapsed (cosine-power, sine-power) form over the base
// coordinates; with multiplicity one per coordinate this reduces to the plain
// monomial basis. When the circuit drives its gates through affine angle maps
// theta_j = a_j x_j + b_j, the same maps are applied to the inputs before the
// trigonometric powers, keeping the basis aligned with the gate-angle
// expansion the truncation theory speaks about.
struct SurrogateQS {
    FrequencySet freqset;                          // descriptor; members in canonical order
    std::vector<CollapsedFeatureIndex> features;   // one per member
    std::vector<double> weights;
    double lambda = 0.0;
    bool collapsed = false;
    bool explicit_features = false;                // serialize features directly
    std::vector<int> slot_multiplicity;            // base-coordinate multiplicities
    std::vector<double> input_scale;               // a_j (defaults to 1)
    std::vector<double> input_offset;              // b_j (defaults to 0)

    std::vector<double> transformed(std::span<const double> x) const;
    double predict(std::span<const double> x) const;
    std::string to_json() const;
    static SurrogateQS from_json_text(const std::string& text);
};


struct RidgeOptions {
    // minimize sum_i (y_i - <phi_i, w>)^2 + lambda * |w|^2, solved in the
    // smaller of the primal and dual dimension via an SPD factorization
    bool force_primal = false;
    bool force_dual = false;
    // iterative mode used only to trace per-iteration validation error
    bool iterative = false;
    int iterations = 480;
    double learning_rate = 0.05;
};

struct FitReport {
    bool used_dual = false;
    double effective_lambda = 0.0;
    std::vector<double> iteration_mse;  // iterative mode only, needs validation set
};

SurrogateQS fit_qs(const TrainingDatasetQS& data, const FrequencySet& freqset, double lambda,
                   std::span<const int> slot_of_gate, int base_dim,
                   const RidgeOptions& opts = {}, FitReport* report = nullptr,
                   const TrainingDatasetQS* validation = nullptr,
                   std::span<const double> input_scale = {},
                   std::span<const double> input_offset = {});

// convenience overload for uncollapsed features (multiplicity one, identity map)
SurrogateQS fit_qs(const TrainingDatasetQS& data, const FrequencySet& freqset, double lambda,
                   const RidgeOptions& opts = {}, FitReport* report = nullptr);
// Fit directly on a caller-supplied collapsed feature list (deduplicated
// monomials); used by workloads whose expanded frequency sets collapse
// many-to-one.
SurrogateQS fit_qs_collapsed(const TrainingDatasetQS& data,
                             std::vector<CollapsedFeatureIndex> features, double lambda,
                             std::span<const int> multiplicity, const RidgeOptions& opts = {},
                             std::span<const double> input_scale = {},
                             std::span<const double> input_offset = {});

// max-norm of the regularized-objective gradient at the fitted weights;
// the normal-equation residual check
double ridge_residual(const SurrogateQS& model, const TrainingDatasetQS& data);

struct TruncationCheckReport {
    double measured_max_error = 0.0;
    double analytic_bound = 0.0;
    bool within_bound = false;
    int lambda = 0;
    FreqMode mode = FreqMode::C;
};

// Worst-case truncation error of the mode-restricted expansion against the
// full coefficient table of f (obtained via extract_coefficients), sampled
// over x in [-R, R]^d, compared with the analytic bound
//   B (e d q (1+R) / (L+1))^(L+1)   for mode C
//   B (e d q R / (L+1))^(L+1)       for mode S
TruncationCheckReport worst_case_truncation_check(
    const std::function<double(std::span<const double>)>& f, int d, const PauliNoiseSpec& noise,
    double norm_bound, int lambda, FreqMode mode, double range, int samples, std::uint64_t seed);

}  // namespace qsurr
