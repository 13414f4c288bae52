#pragma once

#include "interrate/core.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace interrate {

/// Lower bound on every background coefficient. Keeps H <= exp(-1e-6) < 1 so
/// that log(1 - H) stays finite.
inline constexpr double kBackgroundFloor = 1e-6;

enum class KernelFamily { Rbf, Exp };

[[nodiscard]] std::string_view family_name(KernelFamily family);
[[nodiscard]] KernelFamily parse_family(std::string_view name);

/// Kernel family plus the largest gap S it is evaluated on.
///
/// RBF: phi(d) = [1, (d-0)^2/2, ..., (d-S)^2/2], dimension S + 2.
/// EXP: phi(d) = [1, d], dimension 2.
/// Coordinate 0 is always the time-independent background.
struct KernelSpec {
    KernelFamily family{KernelFamily::Rbf};
    int max_shift{20};

    [[nodiscard]] static KernelSpec rbf(int max_shift) { return {KernelFamily::Rbf, max_shift}; }
    [[nodiscard]] static KernelSpec exp(int max_shift) { return {KernelFamily::Exp, max_shift}; }

    [[nodiscard]] std::size_t dimension() const;

    bool operator==(const KernelSpec&) const = default;
};

[[nodiscard]] std::vector<double> feature_map(const KernelSpec& kernel, int gap);
void feature_map_into(const KernelSpec& kernel, int gap, std::span<double> out);

/// Feature vectors for gaps 0..max_shift, row-major.
class FeatureTable {
public:
    explicit FeatureTable(const KernelSpec& kernel);

    [[nodiscard]] std::span<const double> row(int gap) const {
        return {values_.data() + static_cast<std::size_t>(gap) * dimension_, dimension_};
    }
    [[nodiscard]] std::size_t dimension() const { return dimension_; }

private:
    std::size_t dimension_;
    std::vector<double> values_;
};

/// Throws Error("infeasible point") unless beta has the kernel's dimension,
/// is finite and nonnegative, and beta[0] >= kBackgroundFloor.
void check_feasible(std::span<const double> beta, const KernelSpec& kernel);

/// exp(-beta . phi(gap)).
[[nodiscard]] double hazard(std::span<const double> beta, const KernelSpec& kernel, int gap);

/// Coefficient vectors per ordered pair (target x, source y), all for one kernel.
class BetaMatrix {
public:
    using Key = std::pair<EntityId, EntityId>;

    BetaMatrix() = default;
    BetaMatrix(KernelSpec kernel, std::size_t entity_count);

    /// Stores beta for (target, source); enforces check_feasible and
    /// that both ids are < entity_count.
    void set(EntityId target, EntityId source, std::vector<double> beta);

    [[nodiscard]] bool contains(EntityId target, EntityId source) const;
    [[nodiscard]] const std::vector<double>* find(EntityId target, EntityId source) const;
    /// Throws Error("pair not fitted") for a missing pair.
    [[nodiscard]] const std::vector<double>& at(EntityId target, EntityId source) const;

    [[nodiscard]] const KernelSpec& kernel() const { return kernel_; }
    [[nodiscard]] std::size_t entity_count() const { return entity_count_; }
    [[nodiscard]] const std::map<Key, std::vector<double>>& entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

    bool operator==(const BetaMatrix&) const = default;

private:
    KernelSpec kernel_;
    std::size_t entity_count_{0};
    std::map<Key, std::vector<double>> entries_;
};

/// hazard(beta_xy, d) - exp(-beta_xy[0]) for d in [first_gap, last_gap].
/// Nonpositive by construction; zero where the pair is at its background.
[[nodiscard]] std::vector<double> profile_intensity(const BetaMatrix& beta, EntityId target,
                                                    EntityId source, int first_gap,
                                                    int last_gap);

} // namespace interrate
