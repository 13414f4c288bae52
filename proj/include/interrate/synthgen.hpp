#pragma once

#include "interrate/core.hpp"
#include "interrate/kernels.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace interrate {

enum class CombinationRule {
    // Every prior exposure in the window is an independent contagion attempt:
    // p = 1 - prod_j (1 - H_j).
    IndependentAttempts,
    // One prior exposure of the window, drawn uniformly, decides: p = H_j.
    SingleSource,
};

[[nodiscard]] CombinationRule parse_rule(std::string_view name);
[[nodiscard]] std::string_view rule_name(CombinationRule rule);

/// Shape of random ground-truth matrices.
///
/// Each pair of distinct entities is active with probability
/// min(1, interactions_per_target / (N - 1)); self pairs never are.
/// An active pair gets background U[0,1] + background_shift and `active_bumps`
/// interaction coefficients drawn U[0, amplitude] (RBF: at distinct uniformly
/// drawn centers, the rest 0; EXP: the single decay coefficient). An inactive
/// pair gets only a background, U[0,1] + quiet_shift, so it barely ever fires.
/// The defaults give sparse, smooth profiles.
struct TruthOptions {
    double interactions_per_target{1.0};
    double background_shift{0.0};
    double quiet_shift{8.0};
    int active_bumps{1};
    double amplitude{0.1};
};

/// Deterministic per seed (stream kTruthStream); covers all entity_count^2 pairs.
[[nodiscard]] BetaMatrix random_beta(std::size_t entity_count, const KernelSpec& kernel,
                                     std::uint64_t seed, const TruthOptions& options = {});

struct GenConfig {
    std::size_t entity_count{5};
    std::size_t sequence_count{20000};
    int max_length{50};
    int min_length{0};  // 0 means every sequence has max_length exposures
    std::uint64_t seed{0};
    CombinationRule rule{CombinationRule::IndependentAttempts};
};

/// Simulates sequences: each step draws an entity uniformly, computes its
/// contagion probability from the exposures at gaps 0..S (including itself)
/// under `config.rule`, and draws the outcome. Sequence k uses its own random
/// stream, so the corpus does not depend on `threads`.
[[nodiscard]] std::vector<Sequence> generate(const BetaMatrix& truth, const GenConfig& config,
                                             int threads = 1);

} // namespace interrate
