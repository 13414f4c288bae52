#include "interrate/baselines.hpp"
#include "interrate/error.hpp"

#include <cmath>

namespace interrate {

NaivePredictor::NaivePredictor(const ObservationSet& obs) {
    std::uint64_t exposures = 0;
    std::uint64_t contagions = 0;
    rates_.assign(obs.entity_count(), -1.0);
    const auto tallies = obs.tallies();
    for (std::size_t x = 0; x < tallies.size(); ++x) {
        const auto& t = tallies[x];
        exposures += t.exposures;
        contagions += t.contagions;
        if (t.exposures > 0) {
            rates_[x] = static_cast<double>(t.contagions) / static_cast<double>(t.exposures);
        }
    }
    global_rate_ =
        exposures > 0 ? static_cast<double>(contagions) / static_cast<double>(exposures) : 0.0;
}

double NaivePredictor::rate(EntityId target) const {
    if (target.value < rates_.size() && rates_[target.value] >= 0.0) {
        return rates_[target.value];
    }
    return global_rate_;
}

double NaivePredictor::predict(EntityId target, EntityId, int) const {
    return rate(target);
}

NaivePredictor fit_naive(const ObservationSet& obs) {
    if (obs.empty()) {
        throw Error("no data");
    }
    return NaivePredictor(obs);
}

KernelPredictor::KernelPredictor(BetaMatrix beta, NaivePredictor fallback)
    : beta_(std::move(beta)), fallback_(std::move(fallback)) {}

double KernelPredictor::predict(EntityId target, EntityId source, int gap) const {
    if (const auto* coefficients = beta_.find(target, source)) {
        return hazard(*coefficients, beta_.kernel(), gap);
    }
    return fallback_.rate(target);
}

IcirPredictor::IcirPredictor(FitResult diagonal_fit, NaivePredictor fallback)
    : fit_(std::move(diagonal_fit)), fallback_(std::move(fallback)) {}

double IcirPredictor::predict(EntityId target, EntityId source, int gap) const {
    const auto* self = fit_.beta.find(target, target);
    if (self == nullptr) {
        return fallback_.rate(target);
    }
    if (source == target) {
        return hazard(*self, fit_.beta.kernel(), gap);
    }
    return std::exp(-(*self)[0]);
}

BetaMatrix IcirPredictor::implied_beta() const {
    const auto& diag = fit_.beta;
    BetaMatrix full(diag.kernel(), diag.entity_count());
    for (const auto& [key, coefficients] : diag.entries()) {
        const EntityId x = key.first;
        for (std::uint32_t y = 0; y < diag.entity_count(); ++y) {
            if (EntityId{y} == x) {
                full.set(x, x, coefficients);
            } else {
                std::vector<double> background(coefficients.size(), 0.0);
                background[0] = coefficients[0];
                full.set(x, EntityId{y}, std::move(background));
            }
        }
    }
    return full;
}

IcirPredictor fit_icir(const ObservationSet& obs, const KernelSpec& kernel,
                       const SolverConfig& config, int threads) {
    if (obs.empty()) {
        throw Error("no data");
    }
    const auto diagonal = obs.diagonal();
    if (diagonal.empty()) {
        throw Error("no self-pair observations for ICIR");
    }
    return IcirPredictor(fit(diagonal, kernel, config, threads), NaivePredictor(obs));
}

EmpiricalPredictor::EmpiricalPredictor(const ObservationSet& reference) : fallback_(reference) {
    for (const auto& c : reference.cells()) {
        frequencies_[{c.target.value, c.source.value, c.gap}] =
            static_cast<double>(c.contagions) / static_cast<double>(c.total);
    }
}

double EmpiricalPredictor::predict(EntityId target, EntityId source, int gap) const {
    if (auto it = frequencies_.find({target.value, source.value, gap}); it != frequencies_.end()) {
        return it->second;
    }
    return fallback_.rate(target);
}

} // namespace interrate
