#pragma once

#include "interrate/core.hpp"
#include "interrate/kernels.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace interrate {

struct SubproblemCell {
    std::uint32_t source_slot{0};  // index into Subproblem::sources
    int gap{0};
    std::uint64_t contagions{0};
    std::uint64_t total{0};
};

/// All observations whose target is one entity. Parameters are laid out as
/// consecutive blocks of kernel.dimension() coefficients, one block per entry
/// of `sources` (ascending ids).
struct Subproblem {
    EntityId target;
    std::vector<EntityId> sources;
    std::vector<SubproblemCell> cells;

    [[nodiscard]] std::size_t parameter_count(const KernelSpec& kernel) const {
        return sources.size() * kernel.dimension();
    }
};

/// One subproblem per distinct target, ascending. Cells partition obs.cells().
[[nodiscard]] std::vector<Subproblem> slice_subproblems(const ObservationSet& obs);

/// Negative log-likelihood of a subproblem and its gradient.
///
/// Each cell contributes
///   -[c log H + (n - c) log(1 - H)],  H = exp(-z), z = beta_y . phi(gap),
/// evaluated as c z - (n - c) log(-expm1(-z)) for accuracy when H is near 1.
class SubproblemObjective {
public:
    SubproblemObjective(const Subproblem& sub, const KernelSpec& kernel);

    [[nodiscard]] std::size_t size() const { return size_; }

    /// Throws Error("infeasible point") if any block violates check_feasible.
    void check(std::span<const double> params) const;

    [[nodiscard]] double value(std::span<const double> params) const;
    /// Writes the gradient into `grad` (size() entries) and returns the value.
    double value_and_gradient(std::span<const double> params, std::span<double> grad) const;
    /// Also writes the Hessian diagonal into `curvature`.
    double value_gradient_curvature(std::span<const double> params, std::span<double> grad,
                                    std::span<double> curvature) const;

private:
    const Subproblem* sub_;
    KernelSpec kernel_;
    FeatureTable features_;
    std::size_t size_;
};

[[nodiscard]] double neg_log_likelihood(const Subproblem& sub, std::span<const double> params,
                                        const KernelSpec& kernel);
[[nodiscard]] std::vector<double> gradient(const Subproblem& sub, std::span<const double> params,
                                           const KernelSpec& kernel);

/// NLL of a whole ObservationSet under a BetaMatrix (sum over cells).
/// Throws Error("pair not fitted") if a cell's pair has no coefficients.
[[nodiscard]] double neg_log_likelihood(const ObservationSet& obs, const BetaMatrix& beta);

} // namespace interrate
