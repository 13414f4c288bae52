#pragma once

#include "interrate/baselines.hpp"
#include "interrate/core.hpp"
#include "interrate/kernels.hpp"

#include <cstddef>
#include <optional>

namespace interrate {

// Every metric compares, per populated cell, the observed contagion
// frequency f = contagions / total with the prediction p for that cell.

/// Unweighted sum over cells of (f - p)^2.
[[nodiscard]] double rss(const Predictor& predictor, const ObservationSet& obs);

/// Total-weighted mean over cells of JS(Bernoulli(f) || Bernoulli(p)), natural log.
[[nodiscard]] double js_divergence(const Predictor& predictor, const ObservationSet& obs);

/// Jensen-Shannon divergence between Bernoulli(f) and Bernoulli(p), in [0, ln 2].
[[nodiscard]] double bernoulli_js(double f, double p);

/// Best-case F1. Per cell with N observations:
///   TP = N min(p, f), FP = N max(p - f, 0), FN = N max(f - p, 0),
/// summed over cells; 2TP / (2TP + FP + FN), or 1 when all three are zero.
[[nodiscard]] double bcf1(const Predictor& predictor, const ObservationSet& obs);

/// How mse_beta treats truth pairs that `fitted` does not contain.
enum class MissingPairs {
    Reject,  // throw Error("incomparable matrices")
    Null,    // score them as the all-zero vector (a constrained-out pair)
};

/// Mean over the truth's pairs and coefficients of (fitted - truth)^2. Throws
/// Error("incomparable matrices") if kernels or entity counts differ, if the
/// truth is empty, or for a missing pair under MissingPairs::Reject.
[[nodiscard]] double mse_beta(const BetaMatrix& fitted, const BetaMatrix& truth,
                              MissingPairs missing = MissingPairs::Reject);

struct EvalReport {
    double rss{0.0};
    double js_divergence{0.0};
    double bcf1{0.0};
    std::optional<double> mse_beta;
    std::size_t cell_count{0};
};

[[nodiscard]] EvalReport evaluate(const Predictor& predictor, const ObservationSet& obs);

} // namespace interrate
