#include "interrate/solver.hpp"
#include "interrate/error.hpp"
#include "interrate/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace interrate {

void validate(const SolverConfig& config) {
    if (config.max_iterations < 1) {
        throw Error("max_iterations must be >= 1");
    }
    if (!(config.tolerance > 0.0)) {
        throw Error("tolerance must be > 0");
    }
    if (!(config.armijo_c > 0.0 && config.armijo_c < 1.0)) {
        throw Error("armijo_c must lie in (0, 1)");
    }
    if (!(config.backtrack_factor > 0.0 && config.backtrack_factor < 1.0)) {
        throw Error("backtrack_factor must lie in (0, 1)");
    }
    if (!(config.initial_step > 0.0)) {
        throw Error("initial_step must be > 0");
    }
    if (!(config.init_background > 0.0) || !(config.init_other >= 0.0)) {
        throw Error("initial coefficients out of range");
    }
}

namespace {

constexpr int kMaxBacktracks = 80;
constexpr double kCurvatureFloor = 1e-12;

// Clamp to the feasible box: background >= floor, everything else >= 0.
void project(std::span<double> x, std::size_t dim) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lower = (i % dim == 0) ? kBackgroundFloor : 0.0;
        x[i] = std::max(x[i], lower);
    }
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

SubproblemFit fit_subproblem(const Subproblem& sub, const KernelSpec& kernel,
                             const SolverConfig& config) {
    validate(config);
    if (sub.cells.empty()) {
        throw Error("empty subproblem");
    }
    const SubproblemObjective objective(sub, kernel);
    const std::size_t n = objective.size();
    const std::size_t dim = kernel.dimension();

    std::vector<double> x(n, config.init_other);
    for (std::size_t b = 0; b < n; b += dim) {
        x[b] = std::max(config.init_background, kBackgroundFloor);
    }
    std::vector<double> grad(n);
    std::vector<double> curvature(n);
    double f = objective.value_gradient_curvature(x, grad, curvature);
    if (!std::isfinite(f) || !all_finite(grad)) {
        throw Error("numerical failure");
    }

    SubproblemFit result;
    std::vector<double> direction(n);
    std::vector<double> trial(n);

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        // Gradient in the metric of the Hessian diagonal. The RBF features
        // differ in scale by orders of magnitude; unscaled steps crawl.
        const double top = *std::max_element(curvature.begin(), curvature.end());
        const double floor = kCurvatureFloor * std::max(1.0, top);
        for (std::size_t i = 0; i < n; ++i) {
            direction[i] = -grad[i] / std::max(curvature[i], floor);
        }

        double alpha = config.initial_step;
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = x[i] + alpha * direction[i];
            }
            project(trial, dim);
            double predicted = 0.0;  // g . (trial - x), negative for a descent step
            for (std::size_t i = 0; i < n; ++i) {
                predicted += grad[i] * (trial[i] - x[i]);
            }
            if (predicted >= 0.0) {
                break;  // projected direction vanished: KKT point
            }
            const double f_trial = objective.value(trial);
            if (std::isfinite(f_trial) && f_trial <= f + config.armijo_c * predicted) {
                accepted = true;
                break;
            }
            alpha *= config.backtrack_factor;
        }
        if (!accepted) {
            result.converged = true;
            break;
        }

        const double f_new = objective.value_gradient_curvature(trial, grad, curvature);
        if (!std::isfinite(f_new) || !all_finite(grad)) {
            throw Error("numerical failure");
        }
        const double decrease = (f - f_new) / std::max(std::abs(f), 1.0);
        x.swap(trial);
        f = f_new;
        result.iterations = iter;
        if (config.record_trace) {
            result.trace.push_back(f);
        }
        if (decrease < config.tolerance) {
            result.converged = true;
            break;
        }
    }

    result.params = std::move(x);
    result.nll = f;
    return result;
}

FitResult fit(const ObservationSet& obs, const KernelSpec& kernel, const SolverConfig& config,
              int threads) {
    if (obs.empty()) {
        throw Error("no data");
    }
    validate(config);
    const auto subs = slice_subproblems(obs);
    std::vector<SubproblemFit> fits(subs.size());
    parallel_for(subs.size(), threads, [&](std::size_t i) {
        try {
            fits[i] = fit_subproblem(subs[i], kernel, config);
        } catch (const Error& e) {
            throw Error("target " + std::to_string(subs[i].target.value) + ": " + e.what());
        }
    });

    FitResult result{BetaMatrix(kernel, obs.entity_count()), 0.0, {}, {}, {}};
    const auto dim = kernel.dimension();
    for (std::size_t i = 0; i < subs.size(); ++i) {
        const auto& sub = subs[i];
        const auto& fitted = fits[i];
        for (std::size_t b = 0; b < sub.sources.size(); ++b) {
            const auto first = fitted.params.begin() + static_cast<std::ptrdiff_t>(b * dim);
            result.beta.set(sub.target, sub.sources[b],
                            std::vector<double>(first, first + static_cast<std::ptrdiff_t>(dim)));
        }
        result.final_nll += fitted.nll;
        result.nll[sub.target] = fitted.nll;
        result.iterations[sub.target] = fitted.iterations;
        result.converged[sub.target] = fitted.converged;
    }
    return result;
}

} // namespace interrate
