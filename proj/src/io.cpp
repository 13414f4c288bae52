#include "interrate/io.hpp"
#include "interrate/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace interrate {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw Error("line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

bool skip_line(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

template <class T>
bool parse_number(std::string_view text, T& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

} // namespace

Corpus read_sequences(std::istream& in, const Vocabulary* strict) {
    Corpus corpus;
    if (strict != nullptr) {
        corpus.vocabulary = *strict;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) {
            continue;
        }
        Sequence seq;
        for (auto token : split(line, ',')) {
            const auto colon = token.rfind(':');
            if (colon == std::string_view::npos) {
                fail_at(line_no, "expected label:flag, got '" + std::string(token) + "'");
            }
            const auto label = trim(token.substr(0, colon));
            const auto flag = trim(token.substr(colon + 1));
            if (label.empty()) {
                fail_at(line_no, "empty entity label");
            }
            if (flag != "0" && flag != "1") {
                fail_at(line_no, "contagion flag must be 0 or 1, got '" + std::string(flag) + "'");
            }
            EntityId id;
            if (strict != nullptr) {
                const auto found = corpus.vocabulary.find(label);
                if (!found) {
                    fail_at(line_no, "unknown entity '" + std::string(label) + "'");
                }
                id = *found;
            } else {
                id = corpus.vocabulary.intern(label);
            }
            seq.events.push_back({id, flag == "1"});
        }
        corpus.sequences.push_back(std::move(seq));
    }
    return corpus;
}

Corpus load_sequences(const std::filesystem::path& path, const Vocabulary* strict) {
    auto in = open_in(path);
    return read_sequences(in, strict);
}

void write_sequences(std::ostream& out, const Corpus& corpus) {
    for (const auto& seq : corpus.sequences) {
        bool first = true;
        for (const auto& e : seq.events) {
            if (!first) {
                out << ',';
            }
            first = false;
            out << corpus.vocabulary.label(e.entity) << ':' << (e.contagion ? '1' : '0');
        }
        out << '\n';
    }
}

void save_sequences(const std::filesystem::path& path, const Corpus& corpus) {
    auto out = open_out(path);
    write_sequences(out, corpus);
    finish(out, path);
}

BetaFile read_beta(std::istream& in, Vocabulary vocabulary) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    KernelSpec kernel;
    std::size_t declared = 0;

    struct Row {
        std::size_t line;
        EntityId x;
        EntityId y;
        std::vector<double> beta;
    };
    std::vector<Row> rows;
    std::set<std::string> labels_seen;

    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) {
            continue;
        }
        if (!have_header) {
            std::istringstream fields{std::string(trim(line))};
            std::string kernel_field;
            std::string shift_field;
            std::string entities_field;
            std::string extra;
            fields >> kernel_field >> shift_field >> entities_field;
            if (kernel_field.rfind("kernel=", 0) != 0 || shift_field.rfind("S=", 0) != 0 ||
                entities_field.rfind("entities=", 0) != 0 || (fields >> extra)) {
                fail_at(line_no, "expected header 'kernel=<RBF|EXP> S=<int> entities=<int>'");
            }
            try {
                kernel.family = parse_family(kernel_field.substr(7));
            } catch (const Error& e) {
                fail_at(line_no, e.what());
            }
            if (!parse_number(std::string_view(shift_field).substr(2), kernel.max_shift) ||
                kernel.max_shift < 0) {
                fail_at(line_no, "bad S value");
            }
            if (!parse_number(std::string_view(entities_field).substr(9), declared)) {
                fail_at(line_no, "bad entities value");
            }
            have_header = true;
            continue;
        }

        const auto parts = split(line, ',');
        if (parts.size() != 2 + kernel.dimension()) {
            fail_at(line_no, "expected " + std::to_string(kernel.dimension()) +
                                 " coefficients after the pair");
        }
        if (parts[0].empty() || parts[1].empty()) {
            fail_at(line_no, "empty entity label");
        }
        Row row{line_no, vocabulary.intern(parts[0]), vocabulary.intern(parts[1]), {}};
        labels_seen.emplace(parts[0]);
        labels_seen.emplace(parts[1]);
        for (std::size_t k = 2; k < parts.size(); ++k) {
            double v = 0.0;
            if (!parse_number(parts[k], v) || !std::isfinite(v)) {
                fail_at(line_no, "bad coefficient '" + std::string(parts[k]) + "'");
            }
            row.beta.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw Error("line " + std::to_string(line_no + 1) + ": missing beta file header");
    }
    if (labels_seen.size() > declared) {
        throw Error("beta file names more entities than its header declares");
    }

    BetaMatrix beta(kernel, std::max(declared, vocabulary.size()));
    for (auto& row : rows) {
        if (beta.contains(row.x, row.y)) {
            fail_at(row.line, "duplicate pair");
        }
        try {
            beta.set(row.x, row.y, std::move(row.beta));
        } catch (const Error& e) {
            fail_at(row.line, e.what());
        }
    }
    return {std::move(vocabulary), std::move(beta)};
}

BetaFile load_beta(const std::filesystem::path& path, Vocabulary vocabulary) {
    auto in = open_in(path);
    return read_beta(in, std::move(vocabulary));
}

void write_beta(std::ostream& out, const BetaMatrix& beta, const Vocabulary& vocabulary) {
    out << "kernel=" << family_name(beta.kernel().family) << " S=" << beta.kernel().max_shift
        << " entities=" << beta.entity_count() << '\n';
    for (const auto& [key, coefficients] : beta.entries()) {
        out << vocabulary.label(key.first) << ',' << vocabulary.label(key.second);
        for (double c : coefficients) {
            out << ',' << format_double(c);
        }
        out << '\n';
    }
}

void save_beta(const std::filesystem::path& path, const BetaMatrix& beta,
               const Vocabulary& vocabulary) {
    auto out = open_out(path);
    write_beta(out, beta, vocabulary);
    finish(out, path);
}

void write_profile(std::ostream& out, const BetaMatrix& beta, const Vocabulary& vocabulary) {
    const int last = beta.kernel().max_shift;
    out << "target,source,gap,hazard,intensity\n";
    for (const auto& [key, coefficients] : beta.entries()) {
        const auto intensity = profile_intensity(beta, key.first, key.second, 0, last);
        const auto& target = vocabulary.label(key.first);
        const auto& source = vocabulary.label(key.second);
        for (int gap = 0; gap <= last; ++gap) {
            out << target << ',' << source << ',' << gap << ','
                << format_double(hazard(coefficients, beta.kernel(), gap)) << ','
                << format_double(intensity[static_cast<std::size_t>(gap)]) << '\n';
        }
    }
}

} // namespace interrate
