#pragma once

#include "interrate/core.hpp"
#include "interrate/kernels.hpp"
#include "interrate/solver.hpp"

#include <map>
#include <memory>
#include <tuple>
#include <vector>

namespace interrate {

/// Common evaluation interface: a contagion probability for every
/// (target, source, gap) query.
class Predictor {
public:
    virtual ~Predictor() = default;
    [[nodiscard]] virtual double predict(EntityId target, EntityId source, int gap) const = 0;
};

/// Per-target contagion frequency over exposure events.
class NaivePredictor final : public Predictor {
public:
    explicit NaivePredictor(const ObservationSet& obs);

    [[nodiscard]] double predict(EntityId target, EntityId source, int gap) const override;
    /// Falls back to the global rate for targets never exposed.
    [[nodiscard]] double rate(EntityId target) const;
    [[nodiscard]] double global_rate() const { return global_rate_; }

private:
    std::vector<double> rates_;  // negative when the target was never exposed
    double global_rate_{0.0};
};

[[nodiscard]] NaivePredictor fit_naive(const ObservationSet& obs);

/// Predicts hazard(beta_xy, gap); pairs missing from the matrix get the
/// naive rate of the training data.
class KernelPredictor final : public Predictor {
public:
    KernelPredictor(BetaMatrix beta, NaivePredictor fallback);

    [[nodiscard]] double predict(EntityId target, EntityId source, int gap) const override;
    [[nodiscard]] const BetaMatrix& beta() const { return beta_; }

private:
    BetaMatrix beta_;
    NaivePredictor fallback_;
};

/// Non-interacting restriction: only self-pairs (x, x) carry kernels.
/// Off-diagonal queries use the target's own background exp(-beta_xx[0]).
class IcirPredictor final : public Predictor {
public:
    IcirPredictor(FitResult diagonal_fit, NaivePredictor fallback);

    [[nodiscard]] double predict(EntityId target, EntityId source, int gap) const override;
    [[nodiscard]] const FitResult& diagonal_fit() const { return fit_; }

    /// Full matrix implied by the predictions: beta_xx as fitted and, for every
    /// y != x, the background-only vector [beta_xx[0], 0, ..., 0]. The model's
    /// own parameters are diagonal_fit().beta, with every y != x pair null.
    [[nodiscard]] BetaMatrix implied_beta() const;

private:
    FitResult fit_;
    NaivePredictor fallback_;
};

[[nodiscard]] IcirPredictor fit_icir(const ObservationSet& obs, const KernelSpec& kernel,
                                     const SolverConfig& config, int threads = 1);

/// Replays the empirical frequency of each cell of a reference set. Sanity
/// hook for the metrics: evaluated on its own reference it is a perfect model.
class EmpiricalPredictor final : public Predictor {
public:
    explicit EmpiricalPredictor(const ObservationSet& reference);

    [[nodiscard]] double predict(EntityId target, EntityId source, int gap) const override;

private:
    std::map<std::tuple<std::uint32_t, std::uint32_t, int>, double> frequencies_;
    NaivePredictor fallback_;
};

} // namespace interrate
