#include "interrate/likelihood.hpp"
#include "interrate/error.hpp"

#include <algorithm>
#include <cmath>

namespace interrate {

std::vector<Subproblem> slice_subproblems(const ObservationSet& obs) {
    std::vector<Subproblem> subs;
    const auto cells = obs.cells();
    std::size_t i = 0;
    while (i < cells.size()) {
        Subproblem sub;
        sub.target = cells[i].target;
        for (; i < cells.size() && cells[i].target == sub.target; ++i) {
            const auto& c = cells[i];
            // Cells are sorted by source within a target.
            if (sub.sources.empty() || sub.sources.back() != c.source) {
                sub.sources.push_back(c.source);
            }
            sub.cells.push_back({static_cast<std::uint32_t>(sub.sources.size() - 1), c.gap,
                                 c.contagions, c.total});
        }
        subs.push_back(std::move(sub));
    }
    return subs;
}

SubproblemObjective::SubproblemObjective(const Subproblem& sub, const KernelSpec& kernel)
    : sub_(&sub), kernel_(kernel), features_(kernel), size_(sub.parameter_count(kernel)) {
    for (const auto& c : sub.cells) {
        if (c.gap < 0 || c.gap > kernel.max_shift) {
            throw Error("cell gap outside the kernel window");
        }
    }
}

void SubproblemObjective::check(std::span<const double> params) const {
    if (params.size() != size_) {
        throw Error("infeasible point");
    }
    const auto dim = kernel_.dimension();
    for (std::size_t b = 0; b < sub_->sources.size(); ++b) {
        check_feasible(params.subspan(b * dim, dim), kernel_);
    }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double z = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        z += a[k] * b[k];
    }
    return z;
}

} // namespace

double SubproblemObjective::value(std::span<const double> params) const {
    check(params);
    const auto dim = kernel_.dimension();
    double nll = 0.0;
    for (const auto& c : sub_->cells) {
        const double z = dot(params.subspan(c.source_slot * dim, dim), features_.row(c.gap));
        const auto hits = static_cast<double>(c.contagions);
        const auto misses = static_cast<double>(c.total - c.contagions);
        // -log H = z; -log(1 - H) = -log(-expm1(-z)).
        nll += hits * z;
        if (misses > 0.0) {
            nll -= misses * std::log(-std::expm1(-z));
        }
    }
    return nll;
}

double SubproblemObjective::value_and_gradient(std::span<const double> params,
                                               std::span<double> grad) const {
    return value_gradient_curvature(params, grad, {});
}

double SubproblemObjective::value_gradient_curvature(std::span<const double> params,
                                                     std::span<double> grad,
                                                     std::span<double> curvature) const {
    check(params);
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(curvature.begin(), curvature.end(), 0.0);
    const bool want_curvature = !curvature.empty();
    const auto dim = kernel_.dimension();
    double nll = 0.0;
    for (const auto& c : sub_->cells) {
        const auto block = params.subspan(c.source_slot * dim, dim);
        const auto phi = features_.row(c.gap);
        const double z = dot(block, phi);
        const auto hits = static_cast<double>(c.contagions);
        const auto misses = static_cast<double>(c.total - c.contagions);
        // d/dz of the cell term: c - (n - c) H / (1 - H), with H / (1 - H) = 1 / expm1(z);
        // d2/dz2: (n - c) H / (1 - H)^2 = (n - c) (expm1(z) + 1) / expm1(z)^2.
        double slope = hits;
        double bend = 0.0;
        nll += hits * z;
        if (misses > 0.0) {
            const double em1 = std::expm1(z);
            nll -= misses * std::log(-std::expm1(-z));
            slope -= misses / em1;
            if (want_curvature) {
                bend = misses * ((1.0 + 1.0 / em1) / em1);
            }
        }
        auto g = grad.subspan(c.source_slot * dim, dim);
        for (std::size_t k = 0; k < dim; ++k) {
            g[k] += slope * phi[k];
        }
        if (want_curvature) {
            auto h = curvature.subspan(c.source_slot * dim, dim);
            for (std::size_t k = 0; k < dim; ++k) {
                h[k] += bend * phi[k] * phi[k];
            }
        }
    }
    return nll;
}

double neg_log_likelihood(const Subproblem& sub, std::span<const double> params,
                          const KernelSpec& kernel) {
    return SubproblemObjective(sub, kernel).value(params);
}

std::vector<double> gradient(const Subproblem& sub, std::span<const double> params,
                             const KernelSpec& kernel) {
    SubproblemObjective objective(sub, kernel);
    std::vector<double> grad(objective.size());
    objective.value_and_gradient(params, grad);
    return grad;
}

double neg_log_likelihood(const ObservationSet& obs, const BetaMatrix& beta) {
    double nll = 0.0;
    for (const auto& c : obs.cells()) {
        const double h = hazard(beta.at(c.target, c.source), beta.kernel(), c.gap);
        const auto hits = static_cast<double>(c.contagions);
        const auto misses = static_cast<double>(c.total - c.contagions);
        nll -= hits * std::log(h);
        if (misses > 0.0) {
            nll -= misses * std::log1p(-h);
        }
    }
    return nll;
}

} // namespace interrate
