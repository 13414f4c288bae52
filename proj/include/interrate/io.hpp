#pragma once

#include "interrate/core.hpp"
#include "interrate/kernels.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace interrate {

/// A sequence corpus together with the vocabulary its ids refer to.
struct Corpus {
    Vocabulary vocabulary;
    std::vector<Sequence> sequences;

    bool operator==(const Corpus&) const = default;
};

/// 17 significant digits; parses back to the identical double.
[[nodiscard]] std::string format_double(double value);

// Sequence files: one sequence per line, `label:flag` tokens separated by
// commas, flag in {0,1}; `#` starts a comment line; blank lines are skipped.
// Parse errors name the 1-based line. With `strict` set, labels outside that
// vocabulary are rejected; otherwise labels are interned in order of first
// appearance.
[[nodiscard]] Corpus read_sequences(std::istream& in, const Vocabulary* strict = nullptr);
[[nodiscard]] Corpus load_sequences(const std::filesystem::path& path,
                                    const Vocabulary* strict = nullptr);
void write_sequences(std::ostream& out, const Corpus& corpus);
void save_sequences(const std::filesystem::path& path, const Corpus& corpus);

// Beta files: `kernel=<RBF|EXP> S=<int> entities=<int>` then one
// `x,y,coef0,coef1,...` line per pair, pairs in (target, source) id order.
struct BetaFile {
    Vocabulary vocabulary;
    BetaMatrix beta;
};

/// `vocabulary` seeds the label -> id map (new labels are appended); pass an
/// empty vocabulary to number labels by first appearance.
[[nodiscard]] BetaFile read_beta(std::istream& in, Vocabulary vocabulary = {});
[[nodiscard]] BetaFile load_beta(const std::filesystem::path& path, Vocabulary vocabulary = {});
void write_beta(std::ostream& out, const BetaMatrix& beta, const Vocabulary& vocabulary);
void save_beta(const std::filesystem::path& path, const BetaMatrix& beta,
               const Vocabulary& vocabulary);

/// CSV `target,source,gap,hazard,intensity`, one row per pair and gap 0..S,
/// ordered by (target, source, gap).
void write_profile(std::ostream& out, const BetaMatrix& beta, const Vocabulary& vocabulary);

} // namespace interrate
