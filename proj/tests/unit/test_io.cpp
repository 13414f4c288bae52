#include "interrate/error.hpp"
#include "interrate/io.hpp"
#include "interrate/synthgen.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

using namespace interrate;

namespace {

const std::filesystem::path kFixtures = INTERRATE_FIXTURE_DIR;

Corpus parse(const std::string& text, const Vocabulary* strict = nullptr) {
    std::istringstream in(text);
    return read_sequences(in, strict);
}

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round trip through text") {
    std::mt19937_64 rng(81);
    for (int t = 0; t < 10000; ++t) {
        double v;
        const std::uint64_t bits = rng();
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("sequence fixture loads in order of first appearance") {
    const auto corpus = load_sequences(kFixtures / "toy_sequences.txt");
    CHECK(corpus.vocabulary.labels() == std::vector<std::string>{"tco", "bitly", "migre"});
    REQUIRE(corpus.sequences.size() == 4);
    CHECK(corpus.sequences[0].events.size() == 4);
    CHECK(corpus.sequences[1].events.size() == 1);
    CHECK(corpus.sequences[2].events[0] == ExposureEvent{EntityId{2}, true});
    CHECK(corpus.sequences[3].events[1] == ExposureEvent{EntityId{0}, false});
}

TEST_CASE("sequence files round trip exactly") {
    const auto corpus = load_sequences(kFixtures / "toy_sequences.txt");
    std::ostringstream out;
    write_sequences(out, corpus);
    CHECK(parse(out.str()) == corpus);

    GenConfig cfg;
    cfg.entity_count = 30;
    cfg.sequence_count = 50;
    cfg.seed = 3;
    const Corpus big{Vocabulary::with_generated_labels(30),
                     generate(random_beta(30, KernelSpec::rbf(20), 3), cfg)};
    std::ostringstream out2;
    write_sequences(out2, big);
    const auto back = parse(out2.str(), &big.vocabulary);
    CHECK(back == big);
    for (const auto& line : lines_of(out2.str())) {
        CHECK(std::count(line.begin(), line.end(), ',') + 1 <= 50);
    }
}

TEST_CASE("strict mode rejects labels outside the vocabulary") {
    Vocabulary v;
    v.intern("tco");
    v.intern("bitly");
    CHECK(error_of([&] { (void)parse("tco:0,bitly:1\n", &v); }).empty());
    CHECK(error_of([&] { (void)parse("tco:0\n# note\ntco:1,migre:0\n", &v); }) ==
          "line 3: unknown entity 'migre'");
    CHECK(error_of([&] { (void)load_sequences(kFixtures / "toy_sequences.txt", &v); })
              == "line 2: unknown entity 'migre'");
    // Strict mode keeps the given numbering even when labels appear out of order.
    const auto c = parse("bitly:1,tco:0\n", &v);
    CHECK(c.sequences[0].events[0].entity.value == 1);
    CHECK(c.vocabulary == v);
}

TEST_CASE("malformed sequence lines name their line") {
    CHECK(error_of([] { (void)load_sequences(kFixtures / "bad_flag.txt"); }) ==
          "line 2: contagion flag must be 0 or 1, got '2'");
    CHECK(error_of([] { (void)parse("a:1,b\n"); }).starts_with("line 1: expected label:flag"));
    CHECK(error_of([] { (void)parse("a:1\n:0\n"); }) == "line 2: empty entity label");
    CHECK(error_of([] { (void)load_sequences(kFixtures / "missing.txt"); }).starts_with("cannot open"));
    CHECK(parse("# only comments\n\n").sequences.empty());
}

TEST_CASE("beta fixture and round trip") {
    const auto file = load_beta(kFixtures / "toy_beta.txt");
    CHECK(file.vocabulary.labels() == std::vector<std::string>{"tco", "bitly"});
    CHECK(file.beta.kernel() == KernelSpec::exp(3));
    CHECK(file.beta.size() == 4);
    CHECK(file.beta.at(EntityId{1}, EntityId{0}) == std::vector<double>{0.1, 0.2});
    std::ostringstream out;
    write_beta(out, file.beta, file.vocabulary);
    std::istringstream in(out.str());
    const auto back = read_beta(in);
    CHECK(back.beta == file.beta);
    CHECK(back.vocabulary == file.vocabulary);
    CHECK(lines_of(out.str())[0] == "kernel=EXP S=3 entities=2");

    const auto truth = random_beta(6, KernelSpec::rbf(20), 4);
    const auto labels = Vocabulary::with_generated_labels(6);
    std::ostringstream out2;
    write_beta(out2, truth, labels);
    std::istringstream in2(out2.str());
    CHECK(read_beta(in2, labels).beta == truth);
}

TEST_CASE("malformed beta files name their line") {
    CHECK(error_of([] { (void)load_beta(kFixtures / "bad_beta.txt"); }) ==
          "line 3: expected 2 coefficients after the pair");
    auto read = [](const std::string& text) {
        return error_of([&] {
            std::istringstream in(text);
            (void)read_beta(in);
        });
    };
    CHECK(read("kernel=RBF S=x entities=2\n") == "line 1: bad S value");
    CHECK(read("a,a,1,0\n").starts_with("line 1: expected header"));
    CHECK(read("kernel=EXP S=2 entities=1\na,a,1,0\na,a,1,0\n") == "line 3: duplicate pair");
    CHECK(read("kernel=EXP S=2 entities=1\na,a,-1,0\n") == "line 2: infeasible point");
    CHECK(read("kernel=EXP S=2 entities=1\na,a,1,zz\n") == "line 2: bad coefficient 'zz'");
    CHECK(read("kernel=EXP S=2 entities=1\na,b,1,0\n") ==
          "beta file names more entities than its header declares");
    CHECK(read("").find("missing beta file header") != std::string::npos);
}

TEST_CASE("profile export") {
    const auto file = load_beta(kFixtures / "toy_beta.txt");
    std::ostringstream out;
    write_profile(out, file.beta, file.vocabulary);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 1 + 4 * 4);
    CHECK(lines[0] == "target,source,gap,hazard,intensity");
    CHECK(lines[1].starts_with("tco,tco,0,"));
    CHECK(lines[16].starts_with("bitly,bitly,3,"));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream row(lines[i]);
        std::string x, y, gap, h, intensity;
        std::getline(row, x, ',');
        std::getline(row, y, ',');
        std::getline(row, gap, ',');
        std::getline(row, h, ',');
        std::getline(row, intensity, ',');
        const auto& b = file.beta.at(*file.vocabulary.find(x), *file.vocabulary.find(y));
        const double hz = std::exp(-b[0] - b[1] * std::stod(gap));
        CHECK(std::stod(h) == doctest::Approx(hz).epsilon(1e-15));
        CHECK(std::abs(std::stod(intensity) - (std::stod(h) - std::exp(-b[0]))) <= 1e-12);
    }
    // Background-only pairs have zero intensity everywhere.
    CHECK(lines[5].ends_with(",0"));
    CHECK(lines[13].ends_with(",0"));
}

}
