#include "interrate/kernels.hpp"
#include "interrate/error.hpp"

#include <cmath>
#include <string>

namespace interrate {

std::string_view family_name(KernelFamily family) {
    return family == KernelFamily::Rbf ? "RBF" : "EXP";
}

KernelFamily parse_family(std::string_view name) {
    if (name == "RBF" || name == "rbf") {
        return KernelFamily::Rbf;
    }
    if (name == "EXP" || name == "exp") {
        return KernelFamily::Exp;
    }
    throw Error("unknown kernel family '" + std::string(name) + "'");
}

std::size_t KernelSpec::dimension() const {
    return family == KernelFamily::Rbf ? static_cast<std::size_t>(max_shift) + 2 : 2;
}

void feature_map_into(const KernelSpec& kernel, int gap, std::span<double> out) {
    if (gap < 0) {
        throw Error("negative gap");
    }
    const double d = gap;
    out[0] = 1.0;
    if (kernel.family == KernelFamily::Exp) {
        out[1] = d;
        return;
    }
    for (int s = 0; s <= kernel.max_shift; ++s) {
        const double offset = d - s;
        out[static_cast<std::size_t>(s) + 1] = 0.5 * offset * offset;
    }
}

std::vector<double> feature_map(const KernelSpec& kernel, int gap) {
    std::vector<double> phi(kernel.dimension());
    feature_map_into(kernel, gap, phi);
    return phi;
}

FeatureTable::FeatureTable(const KernelSpec& kernel)
    : dimension_(kernel.dimension()),
      values_(dimension_ * (static_cast<std::size_t>(kernel.max_shift) + 1)) {
    for (int gap = 0; gap <= kernel.max_shift; ++gap) {
        feature_map_into(kernel, gap,
                         std::span<double>(values_).subspan(static_cast<std::size_t>(gap) * dimension_,
                                                            dimension_));
    }
}

void check_feasible(std::span<const double> beta, const KernelSpec& kernel) {
    if (beta.size() != kernel.dimension()) {
        throw Error("infeasible point");
    }
    for (double b : beta) {
        if (!std::isfinite(b) || b < 0.0) {
            throw Error("infeasible point");
        }
    }
    if (beta[0] < kBackgroundFloor) {
        throw Error("infeasible point");
    }
}

double hazard(std::span<const double> beta, const KernelSpec& kernel, int gap) {
    if (beta.size() != kernel.dimension()) {
        throw Error("coefficient count does not match kernel dimension");
    }
    const auto phi = feature_map(kernel, gap);
    double z = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        z += beta[k] * phi[k];
    }
    return std::exp(-z);
}

BetaMatrix::BetaMatrix(KernelSpec kernel, std::size_t entity_count)
    : kernel_(kernel), entity_count_(entity_count) {}

void BetaMatrix::set(EntityId target, EntityId source, std::vector<double> beta) {
    if (target.value >= entity_count_ || source.value >= entity_count_) {
        throw Error("unknown entity");
    }
    check_feasible(beta, kernel_);
    entries_[{target, source}] = std::move(beta);
}

bool BetaMatrix::contains(EntityId target, EntityId source) const {
    return entries_.contains({target, source});
}

const std::vector<double>* BetaMatrix::find(EntityId target, EntityId source) const {
    auto it = entries_.find({target, source});
    return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<double>& BetaMatrix::at(EntityId target, EntityId source) const {
    if (const auto* beta = find(target, source)) {
        return *beta;
    }
    throw Error("pair not fitted");
}

std::vector<double> profile_intensity(const BetaMatrix& beta, EntityId target, EntityId source,
                                      int first_gap, int last_gap) {
    const auto& coefficients = beta.at(target, source);
    const double background = std::exp(-coefficients[0]);
    std::vector<double> out;
    for (int gap = first_gap; gap <= last_gap; ++gap) {
        out.push_back(hazard(coefficients, beta.kernel(), gap) - background);
    }
    return out;
}

} // namespace interrate
