#include "interrate/random.hpp"
#include "interrate/parallel.hpp"

#include <cstdlib>
#include <limits>
#include <string>

namespace interrate {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq words{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
        kLayoutVersion};
    engine_.seed(words);
}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t draw = engine_();
    while (draw >= limit) {
        draw = engine_();
    }
    return draw % n;
}

int resolve_threads(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("INTERRATE_THREADS")) {
        try {
            const int value = std::stoi(env);
            if (value > 0) {
                return value;
            }
        } catch (const std::exception&) {
            // fall through to the hardware count
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace interrate
