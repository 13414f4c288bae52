#include "interrate/core.hpp"
#include "interrate/error.hpp"
#include "interrate/parallel.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

namespace interrate {

std::string Vocabulary::generated_label(std::size_t index) {
    std::string label;
    std::size_t n = index + 1;
    while (n > 0) {
        --n;
        label.insert(label.begin(), static_cast<char>('A' + n % 26));
        n /= 26;
    }
    return label;
}

Vocabulary Vocabulary::with_generated_labels(std::size_t count) {
    Vocabulary vocab;
    for (std::size_t i = 0; i < count; ++i) {
        vocab.intern(generated_label(i));
    }
    return vocab;
}

EntityId Vocabulary::intern(std::string_view label) {
    const std::string key(label);
    if (auto it = index_.find(key); it != index_.end()) {
        return EntityId{it->second};
    }
    const auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(key);
    index_.emplace(key, id);
    return EntityId{id};
}

std::optional<EntityId> Vocabulary::find(std::string_view label) const {
    if (auto it = index_.find(std::string(label)); it != index_.end()) {
        return EntityId{it->second};
    }
    return std::nullopt;
}

const std::string& Vocabulary::label(EntityId id) const {
    if (id.value >= labels_.size()) {
        throw Error("unknown entity");
    }
    return labels_[id.value];
}

ObservationSet::ObservationSet(std::vector<ObservationCell> cells, std::vector<TargetTally> tallies,
                               std::size_t entity_count, int max_gap)
    : cells_(std::move(cells)), tallies_(std::move(tallies)), entity_count_(entity_count),
      max_gap_(max_gap) {
    auto key = [](const ObservationCell& c) {
        return std::tie(c.target.value, c.source.value, c.gap);
    };
    std::sort(cells_.begin(), cells_.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    tallies_.resize(entity_count_);
}

std::uint64_t ObservationSet::total_observations() const {
    std::uint64_t total = 0;
    for (const auto& c : cells_) {
        total += c.total;
    }
    return total;
}

std::span<const ObservationCell> ObservationSet::cells_for_target(EntityId x) const {
    auto lo = std::lower_bound(cells_.begin(), cells_.end(), x,
                               [](const ObservationCell& c, EntityId t) { return c.target < t; });
    auto hi = std::upper_bound(lo, cells_.end(), x,
                               [](EntityId t, const ObservationCell& c) { return t < c.target; });
    return {lo, hi};
}

ObservationSet ObservationSet::diagonal() const {
    std::vector<ObservationCell> kept;
    for (const auto& c : cells_) {
        if (c.source == c.target) {
            kept.push_back(c);
        }
    }
    return ObservationSet(std::move(kept), tallies_, entity_count_, max_gap_);
}

namespace {

struct Counts {
    std::uint64_t contagions{0};
    std::uint64_t total{0};
};

struct PartialAssembly {
    std::unordered_map<std::uint64_t, Counts> cells;
    std::vector<TargetTally> tallies;
};

// Cells are keyed by ((target * N) + source) * (S + 1) + gap.
void assemble_into(const Sequence& seq, std::size_t entity_count, const AssemblyOptions& opt,
                   PartialAssembly& out) {
    const auto& events = seq.events;
    for (const auto& e : events) {
        if (e.entity.value >= entity_count) {
            throw Error("unknown entity");
        }
    }
    const auto span = static_cast<std::uint64_t>(opt.max_gap) + 1;
    for (std::size_t i = static_cast<std::size_t>(opt.skip_prefix); i < events.size(); ++i) {
        const auto target = events[i].entity.value;
        const bool hit = events[i].contagion;
        auto& tally = out.tallies[target];
        ++tally.exposures;
        tally.contagions += hit ? 1 : 0;

        const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
            0, static_cast<std::ptrdiff_t>(i) - opt.max_gap));
        const auto hi = static_cast<std::ptrdiff_t>(i) - opt.min_gap;
        for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(lo); j <= hi; ++j) {
            const auto gap = static_cast<std::uint64_t>(static_cast<std::ptrdiff_t>(i) - j);
            const auto source = events[static_cast<std::size_t>(j)].entity.value;
            const std::uint64_t key =
                (static_cast<std::uint64_t>(target) * entity_count + source) * span + gap;
            auto& counts = out.cells[key];
            ++counts.total;
            counts.contagions += hit ? 1 : 0;
        }
    }
}

} // namespace

ObservationSet assemble_observations(std::span<const Sequence> sequences, std::size_t entity_count,
                                     const AssemblyOptions& options, int threads) {
    if (sequences.empty()) {
        throw Error("no data");
    }
    if (options.max_gap < 0 || options.skip_prefix < 0 || options.min_gap < 0) {
        throw Error("assembly options must be nonnegative");
    }

    // Fixed chunking keeps the partial results identical whatever the worker
    // count; the merge below is a commutative sum.
    const std::size_t chunk_count = std::min<std::size_t>(sequences.size(), 64);
    std::vector<PartialAssembly> partials(chunk_count);
    parallel_for(chunk_count, threads, [&](std::size_t c) {
        auto& part = partials[c];
        part.tallies.resize(entity_count);
        const std::size_t begin = sequences.size() * c / chunk_count;
        const std::size_t end = sequences.size() * (c + 1) / chunk_count;
        for (std::size_t s = begin; s < end; ++s) {
            assemble_into(sequences[s], entity_count, options, part);
        }
    });

    std::unordered_map<std::uint64_t, Counts> merged;
    std::vector<TargetTally> tallies(entity_count);
    for (auto& part : partials) {
        for (const auto& [key, counts] : part.cells) {
            auto& m = merged[key];
            m.total += counts.total;
            m.contagions += counts.contagions;
        }
        for (std::size_t x = 0; x < entity_count; ++x) {
            tallies[x].exposures += part.tallies[x].exposures;
            tallies[x].contagions += part.tallies[x].contagions;
        }
    }

    const auto span = static_cast<std::uint64_t>(options.max_gap) + 1;
    std::vector<ObservationCell> cells;
    cells.reserve(merged.size());
    for (const auto& [key, counts] : merged) {
        const auto gap = static_cast<int>(key % span);
        const auto pair = key / span;
        cells.push_back({EntityId{static_cast<std::uint32_t>(pair / entity_count)},
                         EntityId{static_cast<std::uint32_t>(pair % entity_count)}, gap,
                         counts.contagions, counts.total});
    }
    return ObservationSet(std::move(cells), std::move(tallies), entity_count, options.max_gap);
}

} // namespace interrate
