#pragma once

#include "interrate/core.hpp"
#include "interrate/kernels.hpp"
#include "interrate/metrics.hpp"
#include "interrate/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace interrate {

struct FoldPlan {
    std::size_t fold_count{5};
    std::vector<std::size_t> assignment;  // sequence index -> fold id
    std::uint64_t seed{0};

    [[nodiscard]] std::vector<std::size_t> test_indices(std::size_t fold) const;
    [[nodiscard]] std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Seeded Fisher-Yates shuffle, then round-robin fold assignment.
/// fold_count == 1 is the in-sample mode: the single fold trains and tests on
/// every sequence.
[[nodiscard]] FoldPlan plan_folds(std::size_t sequence_count, std::size_t fold_count,
                                  std::uint64_t seed);

enum class ModelKind { IrRbf, IrExp, Icir, Naive, Empirical };

[[nodiscard]] ModelKind parse_model(std::string_view name);
[[nodiscard]] std::string_view model_name(ModelKind kind);

struct ExperimentConfig {
    std::vector<ModelKind> models{ModelKind::IrRbf, ModelKind::Icir, ModelKind::Naive};
    AssemblyOptions assembly{};
    SolverConfig solver{};
    std::optional<BetaMatrix> truth;  // enables MSE beta for matching kernels
    int threads{1};
};

struct ModelSummary {
    ModelKind kind{ModelKind::Naive};
    std::vector<EvalReport> folds;
    EvalReport mean;
    EvalReport stddev;  // sample (n - 1) standard deviation; 0 for one fold
};

struct ExperimentReport {
    std::vector<ModelSummary> models;

    [[nodiscard]] const ModelSummary& model(ModelKind kind) const;

    /// Flat `model.fold.metric=value` lines; fold is an index, "mean" or "std".
    [[nodiscard]] std::string to_key_value() const;
    /// Aligned table of fold means and standard deviations.
    [[nodiscard]] std::string to_table() const;
};

/// Cross-validated evaluation. For each fold: assemble train and test cells
/// from the sequence split, fit every model on train, score it on test.
/// Throws Error("degenerate fold") if a test fold has no cells.
[[nodiscard]] ExperimentReport run_experiment(std::span<const Sequence> sequences,
                                              std::size_t entity_count,
                                              const ExperimentConfig& config,
                                              const FoldPlan& plan);

} // namespace interrate
