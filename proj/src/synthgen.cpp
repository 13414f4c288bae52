#include "interrate/synthgen.hpp"
#include "interrate/error.hpp"
#include "interrate/parallel.hpp"
#include "interrate/random.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace interrate {

CombinationRule parse_rule(std::string_view name) {
    if (name == "independent") {
        return CombinationRule::IndependentAttempts;
    }
    if (name == "single") {
        return CombinationRule::SingleSource;
    }
    throw Error("unknown combination rule '" + std::string(name) + "'");
}

std::string_view rule_name(CombinationRule rule) {
    return rule == CombinationRule::IndependentAttempts ? "independent" : "single";
}

BetaMatrix random_beta(std::size_t entity_count, const KernelSpec& kernel, std::uint64_t seed,
                       const TruthOptions& options) {
    if (entity_count < 1) {
        throw Error("entity count must be >= 1");
    }
    const int centers = kernel.family == KernelFamily::Rbf ? kernel.max_shift + 1 : 1;
    if (options.active_bumps < 0 || options.active_bumps > centers) {
        throw Error("active bump count out of range");
    }
    if (!(options.background_shift >= 0.0) || !(options.quiet_shift >= 0.0)) {
        throw Error("background shift must be >= 0");
    }
    if (!(options.amplitude >= 0.0)) {
        throw Error("amplitude must be >= 0");
    }
    if (!(options.interactions_per_target >= 0.0)) {
        throw Error("interactions per target must be >= 0");
    }
    const double density =
        entity_count < 2
            ? 0.0
            : std::min(1.0, options.interactions_per_target / static_cast<double>(entity_count - 1));

    // Draw order per pair (target-major): activity, background, then for each
    // active bump its center (RBF only) followed by its amplitude. Inactive
    // pairs draw nothing after their background.
    RandomStream rng(seed, kTruthStream);
    BetaMatrix beta(kernel, entity_count);
    std::vector<int> pool(static_cast<std::size_t>(centers));
    for (std::uint32_t x = 0; x < entity_count; ++x) {
        for (std::uint32_t y = 0; y < entity_count; ++y) {
            std::vector<double> coefficients(kernel.dimension(), 0.0);
            const bool active = rng.uniform() < density && x != y;
            const double shift = active ? options.background_shift : options.quiet_shift;
            coefficients[0] = std::max(kBackgroundFloor, shift + rng.uniform());
            std::iota(pool.begin(), pool.end(), 0);
            for (int k = 0; active && k < options.active_bumps; ++k) {
                // Partial Fisher-Yates: distinct centers.
                const auto remaining = static_cast<std::uint64_t>(centers - k);
                const auto pick = static_cast<std::size_t>(k) + rng.uniform_index(remaining);
                std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
                const auto slot = static_cast<std::size_t>(pool[static_cast<std::size_t>(k)]) + 1;
                coefficients[slot] = options.amplitude * rng.uniform();
            }
            beta.set(EntityId{x}, EntityId{y}, std::move(coefficients));
        }
    }
    return beta;
}

std::vector<Sequence> generate(const BetaMatrix& truth, const GenConfig& config, int threads) {
    const std::size_t n = config.entity_count;
    if (n < 1 || config.max_length < 1) {
        throw Error("entity count and max length must be >= 1");
    }
    if (config.min_length < 0 || config.min_length > config.max_length) {
        throw Error("min length must lie in [0, max length]");
    }
    if (truth.entity_count() != n) {
        throw Error("truth matrix entity count does not match");
    }

    const auto& kernel = truth.kernel();
    const auto window = static_cast<std::size_t>(kernel.max_shift) + 1;
    // hazards[(x * n + y) * window + gap]
    std::vector<double> hazards(n * n * window);
    for (std::uint32_t x = 0; x < n; ++x) {
        for (std::uint32_t y = 0; y < n; ++y) {
            const auto* beta = truth.find(EntityId{x}, EntityId{y});
            if (beta == nullptr) {
                throw Error("truth matrix does not cover every pair");
            }
            for (std::size_t gap = 0; gap < window; ++gap) {
                hazards[(x * n + y) * window + gap] =
                    hazard(*beta, kernel, static_cast<int>(gap));
            }
        }
    }

    // Draw order per step: entity, then (single source only) the deciding
    // prior exposure, then the outcome.
    std::vector<Sequence> sequences(config.sequence_count);
    parallel_for(config.sequence_count, threads, [&](std::size_t k) {
        RandomStream rng(config.seed, sequence_stream(k));
        std::size_t length = static_cast<std::size_t>(config.max_length);
        if (config.min_length > 0) {
            const auto spread = static_cast<std::uint64_t>(config.max_length - config.min_length) + 1;
            length = static_cast<std::size_t>(config.min_length) + rng.uniform_index(spread);
        }
        auto& events = sequences[k].events;
        events.reserve(length);
        for (std::size_t i = 0; i < length; ++i) {
            const auto x = static_cast<std::uint32_t>(rng.uniform_index(n));
            events.push_back({EntityId{x}, false});
            const std::size_t lo = i + 1 > window ? i + 1 - window : 0;
            const double* row = hazards.data() + static_cast<std::size_t>(x) * n * window;
            double p = 0.0;
            if (config.rule == CombinationRule::IndependentAttempts) {
                double survival = 1.0;
                for (std::size_t j = lo; j <= i; ++j) {
                    survival *= 1.0 - row[events[j].entity.value * window + (i - j)];
                }
                p = 1.0 - survival;
            } else {
                const std::size_t j = lo + rng.uniform_index(i - lo + 1);
                p = row[events[j].entity.value * window + (i - j)];
            }
            events.back().contagion = rng.bernoulli(p);
        }
    });
    return sequences;
}

} // namespace interrate
