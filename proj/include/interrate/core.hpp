#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace interrate {

/// Index of an entity (piece of information) in a Vocabulary.
struct EntityId {
    std::uint32_t value{0};

    auto operator<=>(const EntityId&) const = default;
};

/// Bidirectional map between entity labels and dense indices.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Labels "A".."Z", "AA", "AB", ... (spreadsheet column style).
    [[nodiscard]] static Vocabulary with_generated_labels(std::size_t count);
    [[nodiscard]] static std::string generated_label(std::size_t index);

    /// Returns the id of `label`, appending it if unseen.
    EntityId intern(std::string_view label);
    [[nodiscard]] std::optional<EntityId> find(std::string_view label) const;
    [[nodiscard]] const std::string& label(EntityId id) const;
    [[nodiscard]] std::size_t size() const { return labels_.size(); }
    [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

    bool operator==(const Vocabulary& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct ExposureEvent {
    EntityId entity;
    bool contagion{false};

    bool operator==(const ExposureEvent&) const = default;
};

/// Exposures in arrival order; position k is the integer time k.
struct Sequence {
    std::vector<ExposureEvent> events;

    bool operator==(const Sequence&) const = default;
};

/// Aggregated (target, source, gap) observations: `total` pairings of which
/// `contagions` had the target exposure followed by a contagion.
struct ObservationCell {
    EntityId target;
    EntityId source;
    int gap{0};
    std::uint64_t contagions{0};
    std::uint64_t total{0};

    bool operator==(const ObservationCell&) const = default;
};

/// Per-target counts of exposure events (not pairings).
struct TargetTally {
    std::uint64_t exposures{0};
    std::uint64_t contagions{0};

    bool operator==(const TargetTally&) const = default;
};

struct AssemblyOptions {
    int max_gap{20};
    int skip_prefix{10};
    int min_gap{0};
};

/// Training cells built from sequences, sorted by (target, source, gap).
class ObservationSet {
public:
    ObservationSet() = default;
    ObservationSet(std::vector<ObservationCell> cells, std::vector<TargetTally> tallies,
                   std::size_t entity_count, int max_gap);

    [[nodiscard]] std::span<const ObservationCell> cells() const { return cells_; }
    [[nodiscard]] std::span<const TargetTally> tallies() const { return tallies_; }
    [[nodiscard]] std::size_t entity_count() const { return entity_count_; }
    [[nodiscard]] int max_gap() const { return max_gap_; }
    [[nodiscard]] bool empty() const { return cells_.empty(); }

    [[nodiscard]] std::uint64_t total_observations() const;

    /// Cells whose target is x (the per-entity dataset of one subproblem).
    [[nodiscard]] std::span<const ObservationCell> cells_for_target(EntityId x) const;

    /// Copy keeping only cells with source == target.
    [[nodiscard]] ObservationSet diagonal() const;

    bool operator==(const ObservationSet&) const = default;

private:
    std::vector<ObservationCell> cells_;
    std::vector<TargetTally> tallies_;
    std::size_t entity_count_{0};
    int max_gap_{0};
};

/// Pairs every kept exposure i (i >= skip_prefix) with each exposure j such
/// that min_gap <= i - j <= max_gap, j included at i - j = 0, and counts the
/// outcome of i. Sequences are processed on `threads` workers; the result does
/// not depend on the worker count.
[[nodiscard]] ObservationSet assemble_observations(std::span<const Sequence> sequences,
                                                   std::size_t entity_count,
                                                   const AssemblyOptions& options,
                                                   int threads = 1);

} // namespace interrate
