#pragma once

#include "interrate/core.hpp"
#include "interrate/kernels.hpp"
#include "interrate/likelihood.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace interrate {

struct SolverConfig {
    int max_iterations{5000};
    double tolerance{1e-9};  // relative NLL decrease that ends the run
    double armijo_c{1e-4};
    double backtrack_factor{0.5};
    double initial_step{1.0};
    double init_background{std::numbers::ln2};
    double init_other{0.01};
    bool record_trace{false};
};

/// Throws Error if a field is out of range.
void validate(const SolverConfig& config);

struct SubproblemFit {
    std::vector<double> params;
    double nll{0.0};
    int iterations{0};
    bool converged{false};
    std::vector<double> trace;  // NLL after each accepted step, if requested
};

/// Minimizes the subproblem NLL over {beta >= 0, background >= kBackgroundFloor}
/// by projected gradient descent, the gradient scaled by the Hessian diagonal,
/// with Armijo backtracking along the projection arc from `initial_step`.
/// Stops when an accepted step lowers the NLL by less than
/// tolerance * max(|NLL|, 1), or after max_iterations steps.
[[nodiscard]] SubproblemFit fit_subproblem(const Subproblem& sub, const KernelSpec& kernel,
                                           const SolverConfig& config);

struct FitResult {
    BetaMatrix beta;
    double final_nll{0.0};
    std::map<EntityId, double> nll;
    std::map<EntityId, int> iterations;
    std::map<EntityId, bool> converged;
};

/// Fits every target subproblem, `threads` at a time. Output is identical for
/// any worker count.
[[nodiscard]] FitResult fit(const ObservationSet& obs, const KernelSpec& kernel,
                            const SolverConfig& config, int threads = 1);

} // namespace interrate
