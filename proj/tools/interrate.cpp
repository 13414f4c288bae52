// interrate: generate synthetic corpora, fit interaction profiles, run
// cross-validated evaluations and export profiles.

#include "interrate/baselines.hpp"
#include "interrate/core.hpp"
#include "interrate/error.hpp"
#include "interrate/evaluation.hpp"
#include "interrate/io.hpp"
#include "interrate/kernels.hpp"
#include "interrate/parallel.hpp"
#include "interrate/solver.hpp"
#include "interrate/synthgen.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace ir = interrate;

namespace {

struct GenerateArgs {
    std::size_t entities{5};
    std::size_t sequences{20000};
    int max_length{50};
    int min_length{0};
    std::string kernel{"rbf"};
    int max_shift{20};
    std::uint64_t seed{0};
    std::string rule{"independent"};
    ir::TruthOptions truth;
    std::string beta_in;
    std::string out;
    std::string beta_out;
    int threads{0};
};

struct FitArgs {
    std::string data;
    std::string kernel{"rbf"};
    int max_shift{20};
    int skip_prefix{10};
    int min_gap{0};
    double tol{1e-9};
    int max_iter{5000};
    int threads{0};
    std::string out;
};

struct EvalArgs {
    std::string data;
    std::string models{"rbf,exp,icir,naive"};
    std::size_t folds{5};
    std::uint64_t seed{0};
    std::string truth_beta;
    std::string report;
    int max_shift{20};
    int skip_prefix{10};
    int min_gap{0};
    double tol{1e-9};
    int max_iter{5000};
    int threads{0};
};

struct ProfileArgs {
    std::string beta;
    std::string out;
};

void add_fit_options(CLI::App* cmd, int& max_shift, int& skip_prefix, int& min_gap, double& tol,
                     int& max_iter, int& threads) {
    cmd->add_option("--max-shift", max_shift, "Largest gap S (RBF centers 0..S)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--skip-prefix", skip_prefix, "Leading exposures not used as targets")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--min-gap", min_gap, "Smallest gap paired (1 drops the self pairing)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--tol", tol, "Relative NLL decrease that stops the solver")
        ->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "Solver iteration cap per target")
        ->capture_default_str();
    cmd->add_option("--threads", threads,
                    "Worker threads (0: INTERRATE_THREADS, else hardware count)")
        ->capture_default_str();
}

int run_generate(const GenerateArgs& args) {
    ir::BetaMatrix truth;
    ir::Vocabulary vocabulary;
    if (!args.beta_in.empty()) {
        auto file = ir::load_beta(args.beta_in, ir::Vocabulary::with_generated_labels(args.entities));
        truth = std::move(file.beta);
        vocabulary = std::move(file.vocabulary);
        if (vocabulary.size() != args.entities) {
            throw ir::Error("--beta-in labels do not match --entities");
        }
    } else {
        const auto kernel = ir::KernelSpec{ir::parse_family(args.kernel), args.max_shift};
        truth = ir::random_beta(args.entities, kernel, args.seed, args.truth);
        vocabulary = ir::Vocabulary::with_generated_labels(args.entities);
    }

    ir::GenConfig config;
    config.entity_count = args.entities;
    config.sequence_count = args.sequences;
    config.max_length = args.max_length;
    config.min_length = args.min_length;
    config.seed = args.seed;
    config.rule = ir::parse_rule(args.rule);
    const ir::Corpus corpus{vocabulary,
                            ir::generate(truth, config, ir::resolve_threads(args.threads))};

    ir::save_sequences(args.out, corpus);
    if (!args.beta_out.empty()) {
        ir::save_beta(args.beta_out, truth, vocabulary);
    }
    return 0;
}

int run_fit(const FitArgs& args) {
    const auto corpus = ir::load_sequences(args.data);
    const ir::AssemblyOptions assembly{args.max_shift, args.skip_prefix, args.min_gap};
    const int threads = ir::resolve_threads(args.threads);
    const auto obs = ir::assemble_observations(corpus.sequences, corpus.vocabulary.size(),
                                               assembly, threads);
    if (obs.empty()) {
        throw ir::Error("no data");
    }
    ir::SolverConfig solver;
    solver.tolerance = args.tol;
    solver.max_iterations = args.max_iter;
    const auto kernel = ir::KernelSpec{ir::parse_family(args.kernel), args.max_shift};
    const auto result = ir::fit(obs, kernel, solver, threads);

    ir::save_beta(args.out, result.beta, corpus.vocabulary);
    std::cout << "nll=" << ir::format_double(result.final_nll) << '\n';
    for (const auto& [target, nll] : result.nll) {
        std::cout << "target=" << corpus.vocabulary.label(target)
                  << " nll=" << ir::format_double(nll)
                  << " iterations=" << result.iterations.at(target)
                  << " converged=" << (result.converged.at(target) ? 1 : 0) << '\n';
    }
    return 0;
}

int run_eval(const EvalArgs& args) {
    const auto corpus = ir::load_sequences(args.data);
    if (corpus.sequences.empty()) {
        throw ir::Error("no data");
    }
    ir::ExperimentConfig config;
    config.models.clear();
    std::stringstream names(args.models);
    for (std::string name; std::getline(names, name, ',');) {
        if (!name.empty()) {
            config.models.push_back(ir::parse_model(name));
        }
    }
    config.assembly = {args.max_shift, args.skip_prefix, args.min_gap};
    config.solver.tolerance = args.tol;
    config.solver.max_iterations = args.max_iter;
    config.threads = ir::resolve_threads(args.threads);
    if (!args.truth_beta.empty()) {
        auto truth = ir::load_beta(args.truth_beta, corpus.vocabulary);
        if (truth.vocabulary.size() != corpus.vocabulary.size()) {
            throw ir::Error("truth beta names entities absent from the corpus");
        }
        config.truth = std::move(truth.beta);
    }

    const auto plan = ir::plan_folds(corpus.sequences.size(), args.folds, args.seed);
    const auto report = ir::run_experiment(corpus.sequences, corpus.vocabulary.size(), config, plan);
    if (!args.report.empty()) {
        std::ofstream out(args.report, std::ios::binary);
        out << report.to_key_value();
        if (!out.flush()) {
            throw ir::Error("cannot write report '" + args.report + "'");
        }
    }
    std::cout << report.to_table();
    return 0;
}

int run_profile(const ProfileArgs& args) {
    const auto file = ir::load_beta(args.beta);
    std::ofstream out(args.out, std::ios::binary);
    if (!out) {
        throw ir::Error("cannot open '" + args.out + "' for writing");
    }
    ir::write_profile(out, file.beta, file.vocabulary);
    if (!out.flush()) {
        throw ir::Error("failed writing '" + args.out + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal interaction profiles between entities of exposure sequences.\n"
                 "The default worker count can be set with INTERRATE_THREADS."};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Simulate a synthetic corpus");
    generate->add_option("--entities", gen.entities, "Number of entities")->required();
    generate->add_option("--sequences", gen.sequences, "Number of sequences")->capture_default_str();
    generate->add_option("--max-length", gen.max_length, "Exposures per sequence (upper bound)")
        ->capture_default_str();
    generate->add_option("--min-length", gen.min_length,
                         "Draw lengths uniformly in [min, max]; 0 fixes them at max")
        ->capture_default_str();
    generate->add_option("--kernel", gen.kernel, "Truth kernel family")
        ->capture_default_str()
        ->check(CLI::IsMember({"rbf", "exp"}));
    generate->add_option("--max-shift", gen.max_shift, "Largest gap S")->capture_default_str();
    generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    generate->add_option("--rule", gen.rule, "How prior exposures combine")
        ->capture_default_str()
        ->check(CLI::IsMember({"independent", "single"}));
    generate->add_option("--interactions", gen.truth.interactions_per_target,
                         "Expected interacting sources per target in a random truth")
        ->capture_default_str();
    generate->add_option("--background-shift", gen.truth.background_shift,
                         "Added to the U[0,1] background of interacting pairs")
        ->capture_default_str();
    generate->add_option("--quiet-shift", gen.truth.quiet_shift,
                         "Added to the U[0,1] background of other pairs")
        ->capture_default_str();
    generate->add_option("--active-bumps", gen.truth.active_bumps,
                         "Nonzero interaction coefficients per interacting pair")
        ->capture_default_str();
    generate->add_option("--amplitude", gen.truth.amplitude,
                         "Upper end of the uniform interaction coefficients")
        ->capture_default_str();
    generate->add_option("--beta-in", gen.beta_in, "Use this truth beta file instead of a random one");
    generate->add_option("--out", gen.out, "Sequence file to write")->required();
    generate->add_option("--beta-out", gen.beta_out, "Where to write the truth beta file");
    generate->add_option("--threads", gen.threads, "Worker threads")->capture_default_str();

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit per-pair kernels to a sequence file");
    fit->add_option("--data", fit_args.data, "Sequence file")->required();
    fit->add_option("--kernel", fit_args.kernel, "Kernel family")
        ->capture_default_str()
        ->check(CLI::IsMember({"rbf", "exp"}));
    add_fit_options(fit, fit_args.max_shift, fit_args.skip_prefix, fit_args.min_gap, fit_args.tol,
                    fit_args.max_iter, fit_args.threads);
    fit->add_option("--out", fit_args.out, "Beta file to write")->required();

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Cross-validated comparison of models");
    eval->add_option("--data", eval_args.data, "Sequence file")->required();
    eval->add_option("--models", eval_args.models,
                     "Comma-separated subset of rbf,exp,icir,naive,empirical")
        ->capture_default_str();
    eval->add_option("--folds", eval_args.folds, "Cross-validation folds (1: in-sample)")
        ->capture_default_str();
    eval->add_option("--seed", eval_args.seed, "Fold shuffling seed")->capture_default_str();
    eval->add_option("--truth-beta", eval_args.truth_beta, "Ground-truth beta file (adds MSE beta)");
    eval->add_option("--report", eval_args.report, "Key-value report to write");
    add_fit_options(eval, eval_args.max_shift, eval_args.skip_prefix, eval_args.min_gap,
                    eval_args.tol, eval_args.max_iter, eval_args.threads);

    ProfileArgs profile_args;
    auto* profile = app.add_subcommand("profile", "Export interaction profiles as CSV");
    profile->add_option("--beta", profile_args.beta, "Beta file")->required();
    profile->add_option("--out", profile_args.out, "CSV file to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) return run_generate(gen);
        if (*fit) return run_fit(fit_args);
        if (*eval) return run_eval(eval_args);
        if (*profile) return run_profile(profile_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
