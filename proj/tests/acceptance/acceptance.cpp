// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
// usage: acceptance <work-dir>

#include "interrate/baselines.hpp"
#include "interrate/error.hpp"
#include "interrate/evaluation.hpp"
#include "interrate/io.hpp"
#include "interrate/likelihood.hpp"
#include "interrate/metrics.hpp"
#include "interrate/solver.hpp"
#include "interrate/synthgen.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace interrate;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

std::vector<double> stack(const Subproblem& sub, const BetaMatrix& beta) {
    std::vector<double> out;
    for (auto y : sub.sources) {
        const auto& b = beta.at(sub.target, y);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

BetaMatrix random_matrix(std::mt19937_64& rng, const KernelSpec& k, std::uint32_t n, double hi) {
    BetaMatrix m(k, n);
    for (std::uint32_t x = 0; x < n; ++x) {
        for (std::uint32_t y = 0; y < n; ++y) {
            m.set(EntityId{x}, EntityId{y}, oracle::random_beta(rng, k, 0.0, hi));
        }
    }
    return m;
}

// 1. Analytic gradient against central differences.
Outcome gradient_check() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    int points = 0;
    for (int t = 0; t < 50; ++t) {
        const auto k = t % 2 == 0 ? KernelSpec::rbf(6) : KernelSpec::exp(6);
        const auto data = oracle::random_sequences(rng, 20, 3, 20);
        const auto obs = assemble_observations(data, 3, {6, 0, 0});
        const auto m = random_matrix(rng, k, 3, 0.3);
        const auto subs = slice_subproblems(obs);
        const auto& sub = subs[static_cast<std::size_t>(t) % subs.size()];
        const auto p = stack(sub, m);
        const auto g = gradient(sub, p, k);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double h = 1e-6 * (1 + std::abs(p[i]));
            auto up = p, down = p;
            up[i] += h;
            down[i] -= h;
            const double fd =
                (neg_log_likelihood(sub, up, k) - neg_log_likelihood(sub, down, k)) / (2 * h);
            worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
        }
        ++points;
    }
    return {worst <= 1e-5, fmt("%d points, max relative error %.2e (limit 1e-5)", points, worst)};
}

// 2. Midpoint convexity of the NLL and the hazard curvature conditions.
Outcome convexity_check() {
    std::mt19937_64 rng(7);
    double worst_gap = -INFINITY;
    for (int t = 0; t < 100; ++t) {
        const auto k = t % 2 == 0 ? KernelSpec::rbf(8) : KernelSpec::exp(8);
        const auto data = oracle::random_sequences(rng, 20, 3, 25);
        const auto obs = assemble_observations(data, 3, {8, 0, 0});
        const auto a = random_matrix(rng, k, 3, 1.5);
        const auto b = random_matrix(rng, k, 3, 1.5);
        BetaMatrix mid(k, 3);
        for (const auto& [key, va] : a.entries()) {
            const auto& vb = b.at(key.first, key.second);
            std::vector<double> v(va.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = 0.5 * (va[i] + vb[i]);
            }
            mid.set(key.first, key.second, v);
        }
        const double gap = neg_log_likelihood(obs, mid) -
                           0.5 * (neg_log_likelihood(obs, a) + neg_log_likelihood(obs, b));
        worst_gap = std::max(worst_gap, gap);
    }

    // Along coordinate k: H' = -phi_k H and H'' = phi_k^2 H. The closed forms
    // are cross-checked against finite differences of the library hazard.
    std::uniform_int_distribution<int> gap_pick(0, 20);
    int violations = 0;
    double worst_fd = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto k = t % 2 == 0 ? KernelSpec::rbf(20) : KernelSpec::exp(20);
        const auto beta = oracle::random_beta(rng, k, 0.0, 0.02);
        const int d = gap_pick(rng);
        const auto phi = feature_map(k, d);
        const double h = hazard(beta, k, d);
        const std::size_t c = static_cast<std::size_t>(t) % phi.size();
        const double h1 = -phi[c] * h;
        const double h2 = phi[c] * phi[c] * h;
        const double eps = 1e-4;
        auto up = beta, down = beta;
        up[c] += eps;
        down[c] = std::max(down[c] - eps, 0.0);
        const double step = up[c] - down[c];
        if (down[c] >= (c == 0 ? kBackgroundFloor : 0.0)) {
            const double fd1 = (hazard(up, k, d) - hazard(down, k, d)) / step;
            worst_fd = std::max(worst_fd, std::abs(fd1 - h1) / std::max(1.0, std::abs(h1)));
        }
        const bool first = h1 * h1 - h2 * h >= -1e-10 * std::max(1.0, h1 * h1);
        const bool second = h1 * h1 + h2 * (1.0 - h) >= -1e-10;
        const bool open = h > 0.0 && h < 1.0;
        violations += (first && second && open) ? 0 : 1;
    }
    const bool pass = worst_gap <= 1e-9 && violations == 0 && worst_fd < 1e-3;
    return {pass, fmt("100 midpoints, max slack %.2e (limit 1e-9); 1000 curvature points, "
                      "%d violations; derivative cross-check %.1e",
                      worst_gap, violations, worst_fd)};
}

// Exhaustive grid over one EXP block, b0 in (0, 5], b1 in [0, 5], step h.
// z = b0 + b1 * gap lands on the same grid, so log(1 - H) is tabulated.
double grid_block(const std::vector<SubproblemCell>& cells, int max_gap) {
    constexpr double h = 1e-3;
    constexpr int steps = 5000;
    const int top = steps * (1 + max_gap);
    std::vector<double> log_survival(static_cast<std::size_t>(top) + 1);
    for (int m = 1; m <= top; ++m) {
        log_survival[static_cast<std::size_t>(m)] = std::log(-std::expm1(-m * h));
    }
    double best = INFINITY;
    for (int i = 1; i <= steps; ++i) {
        for (int j = 0; j <= steps; ++j) {
            double v = 0.0;
            for (const auto& c : cells) {
                const int m = i + j * c.gap;
                v += double(c.contagions) * (m * h) -
                     double(c.total - c.contagions) * log_survival[static_cast<std::size_t>(m)];
            }
            best = std::min(best, v);
        }
    }
    return best;
}

// 3. Solver against the grid and the closed-form Bernoulli MLE.
Outcome solver_check() {
    std::mt19937_64 rng(99);
    const auto k = KernelSpec::exp(3);
    double worst = -INFINITY;
    int instances = 0;
    for (int t = 0; t < 20; ++t) {
        const std::uint32_t entities = t % 2 == 0 ? 1 : 2;
        const auto data = oracle::random_sequences(rng, 6, entities, 8, 0.5);
        const auto obs = assemble_observations(data, entities, {3, 0, 0});
        const auto fitted = fit(obs, k, SolverConfig{});
        double grid = 0.0;
        for (const auto& sub : slice_subproblems(obs)) {
            for (std::uint32_t slot = 0; slot < sub.sources.size(); ++slot) {
                std::vector<SubproblemCell> block;
                for (const auto& c : sub.cells) {
                    if (c.source_slot == slot) block.push_back(c);
                }
                grid += grid_block(block, 3);
            }
        }
        worst = std::max(worst, fitted.final_nll - grid);
        ++instances;
    }

    double worst_mle = 0.0;
    std::uniform_int_distribution<std::uint64_t> total(2, 500);
    for (int t = 0; t < 20; ++t) {
        const auto n = total(rng);
        std::uniform_int_distribution<std::uint64_t> pos(1, n - 1);
        const auto c = pos(rng);
        Subproblem sub;
        sub.target = EntityId{0};
        sub.sources = {EntityId{0}};
        sub.cells = {{0, 0, c, n}};
        const auto r = fit_subproblem(sub, KernelSpec::rbf(0), SolverConfig{});
        worst_mle = std::max(worst_mle, std::abs(r.params[0] + std::log(double(c) / double(n))));
    }
    const bool pass = worst <= 1e-6 && worst_mle <= 1e-5;
    return {pass, fmt("%d EXP instances, max (solver - grid) %.2e (limit 1e-6); 20 Bernoulli "
                      "MLEs, max |beta - beta*| %.2e (limit 1e-5)",
                      instances, worst, worst_mle)};
}

struct SynthRun {
    double rss_rbf{0}, rss_icir{0}, rss_naive{0};
    double mse_rbf{0}, mse_icir{0};
};

SynthRun synth_run(std::size_t entities, std::size_t sequences, std::uint64_t seed, bool icir) {
    const auto truth = random_beta(entities, KernelSpec::rbf(20), seed);
    GenConfig gen;
    gen.entity_count = entities;
    gen.sequence_count = sequences;
    gen.max_length = 50;
    gen.seed = seed;
    const auto data = generate(truth, gen);
    ExperimentConfig cfg;
    cfg.models = {ModelKind::IrRbf, ModelKind::Naive};
    if (icir) cfg.models.push_back(ModelKind::Icir);
    cfg.truth = truth;
    const auto report = run_experiment(data, entities, cfg, plan_folds(data.size(), 5, seed));
    SynthRun r;
    r.rss_rbf = report.model(ModelKind::IrRbf).mean.rss;
    r.rss_naive = report.model(ModelKind::Naive).mean.rss;
    r.mse_rbf = *report.model(ModelKind::IrRbf).mean.mse_beta;
    if (icir) {
        r.rss_icir = report.model(ModelKind::Icir).mean.rss;
        r.mse_icir = *report.model(ModelKind::Icir).mean.mse_beta;
    }
    return r;
}

// 4. Synth-5 orderings.
Outcome synth5_check() {
    bool pass = true;
    std::string detail = "independent rule;";
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto r = synth_run(5, 2000, seed, true);
        const bool ok = r.rss_rbf < r.rss_icir && r.rss_icir < 1.1 * r.rss_naive &&
                        r.mse_rbf < r.mse_icir;
        pass = pass && ok;
        detail += fmt(" seed %d: RSS rbf %.4g icir %.4g naive %.4g, MSE rbf %.4g icir %.4g%s;",
                      int(seed), r.rss_rbf, r.rss_icir, r.rss_naive, r.mse_rbf, r.mse_icir,
                      ok ? "" : " (FAIL)");
    }
    return {pass, detail};
}

// 5. Synth-20 factor.
Outcome synth20_check() {
    bool pass = true;
    std::string detail = "independent rule;";
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto r = synth_run(20, 5000, seed, false);
        const double ratio = r.rss_rbf / r.rss_naive;
        pass = pass && ratio < 0.5;
        detail += fmt(" seed %d: RSS rbf %.4g naive %.4g ratio %.3f;", int(seed), r.rss_rbf,
                      r.rss_naive, ratio);
    }
    return {pass, detail + " (limit 0.5)"};
}

// 6. Metric fixed points.
Outcome metric_check() {
    const auto truth = random_beta(5, KernelSpec::rbf(20), 4);
    GenConfig gen;
    gen.entity_count = 5;
    gen.sequence_count = 300;
    gen.seed = 4;
    const auto data = generate(truth, gen);
    const auto obs = assemble_observations(data, 5, {});
    const auto r = evaluate(EmpiricalPredictor(obs), obs);

    const ObservationSet one({{EntityId{0}, EntityId{0}, 0, 4, 10}}, std::vector<TargetTally>(1), 1,
                             20);
    class Fixed final : public Predictor {
    public:
        double predict(EntityId, EntityId, int) const override { return 0.6; }
    };
    const double f1 = bcf1(Fixed{}, one);
    const bool pass = std::abs(r.rss) <= 1e-12 && std::abs(r.js_divergence) <= 1e-12 &&
                      std::abs(r.bcf1 - 1.0) <= 1e-12 && std::abs(f1 - 0.8) <= 1e-12;
    return {pass, fmt("empirical predictor on %zu cells: RSS %.3g, JS %.3g, BCF1 %.17g; "
                      "N=10 f=0.4 p=0.6 BCF1 %.17g",
                      r.cell_count, r.rss, r.js_divergence, r.bcf1, f1)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run(const std::string& command) {
    return std::system(command.c_str());
}

std::string quote(const fs::path& p) {
    return "'" + p.string() + "'";
}

// 7. Byte-identical CLI outputs across runs and thread counts.
Outcome determinism_check(const fs::path& work) {
    const std::string cli = quote(INTERRATE_CLI);
    std::vector<std::string> mismatches;
    int commands = 0;
    auto compare = [&](const std::string& what, const std::vector<fs::path>& files) {
        const auto first = slurp(files.front());
        if (first.empty()) {
            mismatches.push_back(what + " (empty output)");
            return;
        }
        for (std::size_t i = 1; i < files.size(); ++i) {
            if (slurp(files[i]) != first) {
                mismatches.push_back(what);
                return;
            }
        }
    };
    std::vector<fs::path> gen_seq, gen_beta, fit_beta, fit_log, eval_report, eval_log;
    const std::vector<std::pair<std::string, int>> runs{{"a", 1}, {"b", 1}, {"c", 4}};
    for (const auto& [tag, threads] : runs) {
        const auto seq = work / ("det_" + tag + ".seq");
        const auto truth = work / ("det_" + tag + ".truth");
        const auto beta = work / ("det_" + tag + ".beta");
        const auto flog = work / ("det_" + tag + ".fit.txt");
        const auto report = work / ("det_" + tag + ".report");
        const auto elog = work / ("det_" + tag + ".eval.txt");
        const std::string t = " --threads " + std::to_string(threads);
        int status = run(cli + " generate --entities 5 --sequences 300 --seed 11 --out " +
                         quote(seq) + " --beta-out " + quote(truth) + t + " > /dev/null");
        status |= run(cli + " fit --data " + quote(seq) + " --out " + quote(beta) + t + " > " +
                      quote(flog));
        status |= run(cli + " eval --data " + quote(seq) + " --models rbf,exp,icir,naive --seed 3" +
                      " --truth-beta " + quote(truth) + " --report " + quote(report) + t + " > " +
                      quote(elog));
        commands += 3;
        if (status != 0) {
            return {false, "a CLI command failed (thread count " + std::to_string(threads) + ")"};
        }
        gen_seq.push_back(seq);
        gen_beta.push_back(truth);
        fit_beta.push_back(beta);
        fit_log.push_back(flog);
        eval_report.push_back(report);
        eval_log.push_back(elog);
    }
    compare("generate corpus", gen_seq);
    compare("generate truth", gen_beta);
    compare("fit beta", fit_beta);
    compare("fit summary", fit_log);
    compare("eval report", eval_report);
    compare("eval table", eval_log);
    std::string detail = fmt("%d CLI runs (threads 1, 1, 4), 6 outputs compared", commands);
    for (const auto& m : mismatches) {
        detail += "; differs: " + m;
    }
    return {mismatches.empty(), detail};
}

// 8. Planted bump recovered by fit + profile. The window is S = 4 so gap 2
// sits mid-window: other exposures of the same source lift every gap of the
// empirical profile, and with a long window that floor drags the fitted
// log-quadratic vertex toward the long side.
Outcome planted_check(const fs::path& work) {
    const std::string cli = quote(INTERRATE_CLI);
    const auto truth_path = work / "planted.truth";
    {
        const auto k = KernelSpec::rbf(4);
        BetaMatrix truth(k, 3);
        for (std::uint32_t x = 0; x < 3; ++x) {
            for (std::uint32_t y = 0; y < 3; ++y) {
                std::vector<double> b(k.dimension(), 0.0);
                b[0] = 6.0;
                truth.set(EntityId{x}, EntityId{y}, b);
            }
        }
        std::vector<double> bump(k.dimension(), 0.0);
        bump[0] = 0.3;
        bump[1 + 2] = 1.0;
        truth.set(EntityId{1}, EntityId{0}, bump);  // target B, source A
        save_beta(truth_path, truth, Vocabulary::with_generated_labels(3));
    }
    int hits = 0;
    std::string found;
    for (int seed = 1; seed <= 5; ++seed) {
        const auto seq = work / fmt("planted_%d.seq", seed);
        const auto beta = work / fmt("planted_%d.beta", seed);
        const auto csv = work / fmt("planted_%d.csv", seed);
        int status = run(cli + " generate --entities 3 --sequences 2000 --seed " +
                         std::to_string(seed) + " --beta-in " + quote(truth_path) + " --out " +
                         quote(seq) + " > /dev/null");
        status |= run(cli + " fit --max-shift 4 --data " + quote(seq) + " --out " + quote(beta) +
                      " > /dev/null");
        status |= run(cli + " profile --beta " + quote(beta) + " --out " + quote(csv));
        if (status != 0) {
            return {false, fmt("CLI failed for seed %d", seed)};
        }
        std::ifstream in(csv);
        std::string line;
        std::getline(in, line);
        int best_gap = -1;
        double best = -INFINITY;
        while (std::getline(in, line)) {
            if (!line.starts_with("B,A,")) continue;
            std::istringstream row(line.substr(4));
            std::string gap, h, intensity;
            std::getline(row, gap, ',');
            std::getline(row, h, ',');
            std::getline(row, intensity, ',');
            const double v = std::stod(intensity);
            if (v > best) {
                best = v;
                best_gap = std::stoi(gap);
            }
        }
        hits += best_gap == 2 ? 1 : 0;
        found += fmt(" %d", best_gap);
    }
    return {hits == 5, fmt("pair (B,A), planted center 2; extremal gap per seed:%s; %d/5",
                           found.c_str(), hits)};
}

// 9. Loader round trips and strict mode on the shipped fixtures.
Outcome loader_check(const fs::path& work) {
    const fs::path fixtures = INTERRATE_FIXTURE_DIR;
    std::vector<std::string> problems;
    const auto corpus = load_sequences(fixtures / "toy_sequences.txt");
    const auto copy = work / "roundtrip.seq";
    save_sequences(copy, corpus);
    if (!(load_sequences(copy) == corpus)) problems.push_back("sequence round trip");
    const auto copy2 = work / "roundtrip2.seq";
    save_sequences(copy2, load_sequences(copy));
    if (slurp(copy) != slurp(copy2)) problems.push_back("sequence text not stable");

    const auto beta = load_beta(fixtures / "toy_beta.txt");
    const auto beta_copy = work / "roundtrip.beta";
    save_beta(beta_copy, beta.beta, beta.vocabulary);
    if (!(load_beta(beta_copy).beta == beta.beta)) problems.push_back("beta round trip");

    if (!(load_sequences(fixtures / "toy_sequences.txt", &corpus.vocabulary) == corpus)) {
        problems.push_back("strict mode rejected its own vocabulary");
    }
    Vocabulary partial;
    partial.intern("tco");
    partial.intern("bitly");
    std::string message;
    try {
        (void)load_sequences(fixtures / "toy_sequences.txt", &partial);
    } catch (const Error& e) {
        message = e.what();
    }
    if (message != "line 2: unknown entity 'migre'") {
        problems.push_back("strict mode diagnostic was '" + message + "'");
    }
    for (const char* bad : {"bad_flag.txt"}) {
        try {
            (void)load_sequences(fixtures / bad);
            problems.push_back(std::string(bad) + " accepted");
        } catch (const Error&) {
        }
    }
    try {
        (void)load_beta(fixtures / "bad_beta.txt");
        problems.push_back("bad_beta.txt accepted");
    } catch (const Error&) {
    }
    std::string detail = "real corpora are external; toy fixtures round-trip and strict mode "
                         "rejects unknown labels";
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

} // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "interrate_acc";
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 gradient correctness", gradient_check},
        {"2 convexity probes", convexity_check},
        {"3 solver optimality oracle", solver_check},
        {"4 Synth-5 recovery ordering", synth5_check},
        {"5 Synth-20 scaling", synth20_check},
        {"6 metric fixed points", metric_check},
        {"7 determinism", [&] { return determinism_check(work); }},
        {"8 planted profile recovery", [&] { return planted_check(work); }},
        {"9 loaders on toy fixtures", [&] { return loader_check(work); }},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = check();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (out.pass ? "PASS" : "FAIL") << " [" << name << "] " << out.detail
                  << fmt(" (%.1f s)", secs) << std::endl;
        failed += out.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
