#include "interrate/evaluation.hpp"
#include "interrate/baselines.hpp"
#include "interrate/error.hpp"
#include "interrate/io.hpp"
#include "interrate/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <sstream>

namespace interrate {

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (fold_count == 1 || assignment[i] != fold) {
            out.push_back(i);
        }
    }
    return out;
}

FoldPlan plan_folds(std::size_t sequence_count, std::size_t fold_count, std::uint64_t seed) {
    if (fold_count < 1) {
        throw Error("foldCount must be >= 1");
    }
    if (sequence_count < fold_count) {
        throw Error("sequenceCount < foldCount");
    }
    std::vector<std::size_t> order(sequence_count);
    std::iota(order.begin(), order.end(), 0);
    RandomStream rng(seed, kFoldStream);
    for (std::size_t i = sequence_count; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_index(i));
        std::swap(order[i - 1], order[j]);
    }
    FoldPlan plan{fold_count, std::vector<std::size_t>(sequence_count), seed};
    for (std::size_t k = 0; k < sequence_count; ++k) {
        plan.assignment[order[k]] = k % fold_count;
    }
    return plan;
}

ModelKind parse_model(std::string_view name) {
    if (name == "rbf") return ModelKind::IrRbf;
    if (name == "exp") return ModelKind::IrExp;
    if (name == "icir") return ModelKind::Icir;
    if (name == "naive") return ModelKind::Naive;
    if (name == "empirical") return ModelKind::Empirical;
    throw Error("unknown model '" + std::string(name) + "'");
}

std::string_view model_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::IrRbf: return "rbf";
    case ModelKind::IrExp: return "exp";
    case ModelKind::Icir: return "icir";
    case ModelKind::Naive: return "naive";
    case ModelKind::Empirical: return "empirical";
    }
    return "?";
}

const ModelSummary& ExperimentReport::model(ModelKind kind) const {
    for (const auto& m : models) {
        if (m.kind == kind) {
            return m;
        }
    }
    throw Error("model not in report");
}

namespace {

std::vector<Sequence> select(std::span<const Sequence> sequences,
                             const std::vector<std::size_t>& indices) {
    std::vector<Sequence> out;
    out.reserve(indices.size());
    for (auto i : indices) {
        out.push_back(sequences[i]);
    }
    return out;
}

EvalReport fit_and_score(ModelKind kind, const ObservationSet& train, const ObservationSet& test,
                         const ExperimentConfig& config) {
    const int max_shift = config.assembly.max_gap;
    const auto& truth = config.truth;
    EvalReport report;
    switch (kind) {
    case ModelKind::IrRbf:
    case ModelKind::IrExp: {
        const auto kernel = kind == ModelKind::IrRbf ? KernelSpec::rbf(max_shift)
                                                     : KernelSpec::exp(max_shift);
        auto fitted = fit(train, kernel, config.solver, config.threads);
        const KernelPredictor predictor(std::move(fitted.beta), NaivePredictor(train));
        report = evaluate(predictor, test);
        if (truth && truth->kernel() == kernel) {
            report.mse_beta = mse_beta(predictor.beta(), *truth);
        }
        break;
    }
    case ModelKind::Icir: {
        const auto kernel = KernelSpec::rbf(max_shift);
        const auto predictor = fit_icir(train, kernel, config.solver, config.threads);
        report = evaluate(predictor, test);
        if (truth && truth->kernel() == kernel) {
            // Off-diagonal coefficients are constrained to zero in this model.
            report.mse_beta =
                mse_beta(predictor.diagonal_fit().beta, *truth, MissingPairs::Null);
        }
        break;
    }
    case ModelKind::Naive:
        report = evaluate(fit_naive(train), test);
        break;
    case ModelKind::Empirical:
        report = evaluate(EmpiricalPredictor(test), test);
        break;
    }
    return report;
}

struct Moments {
    double mean{0.0};
    double stddev{0.0};
};

Moments moments(const std::vector<double>& values) {
    Moments m;
    const auto n = static_cast<double>(values.size());
    for (double v : values) {
        m.mean += v;
    }
    m.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - m.mean) * (v - m.mean);
        }
        m.stddev = std::sqrt(ss / (n - 1.0));
    }
    return m;
}

void summarize(ModelSummary& summary) {
    const auto& folds = summary.folds;
    auto collect = [&](auto field) {
        std::vector<double> v;
        for (const auto& r : folds) {
            v.push_back(field(r));
        }
        return moments(v);
    };
    const auto rss_m = collect([](const EvalReport& r) { return r.rss; });
    const auto js_m = collect([](const EvalReport& r) { return r.js_divergence; });
    const auto f1_m = collect([](const EvalReport& r) { return r.bcf1; });
    const auto cells_m = collect([](const EvalReport& r) { return static_cast<double>(r.cell_count); });
    summary.mean = {rss_m.mean, js_m.mean, f1_m.mean, std::nullopt,
                    static_cast<std::size_t>(std::llround(cells_m.mean))};
    summary.stddev = {rss_m.stddev, js_m.stddev, f1_m.stddev, std::nullopt, 0};
    const bool has_mse = std::all_of(folds.begin(), folds.end(),
                                     [](const EvalReport& r) { return r.mse_beta.has_value(); });
    if (has_mse && !folds.empty()) {
        const auto mse_m = collect([](const EvalReport& r) { return *r.mse_beta; });
        summary.mean.mse_beta = mse_m.mean;
        summary.stddev.mse_beta = mse_m.stddev;
    }
}

} // namespace

ExperimentReport run_experiment(std::span<const Sequence> sequences, std::size_t entity_count,
                                const ExperimentConfig& config, const FoldPlan& plan) {
    if (sequences.empty()) {
        throw Error("no data");
    }
    if (plan.assignment.size() != sequences.size()) {
        throw Error("fold plan does not match the corpus");
    }
    if (config.models.empty()) {
        throw Error("no models requested");
    }

    ExperimentReport report;
    for (auto kind : config.models) {
        report.models.push_back({kind, {}, {}, {}});
    }
    for (std::size_t fold = 0; fold < plan.fold_count; ++fold) {
        const auto train_seqs = select(sequences, plan.train_indices(fold));
        const auto test_seqs = select(sequences, plan.test_indices(fold));
        if (train_seqs.empty() || test_seqs.empty()) {
            throw Error("degenerate fold");
        }
        const auto train = assemble_observations(train_seqs, entity_count, config.assembly,
                                                 config.threads);
        const auto test = assemble_observations(test_seqs, entity_count, config.assembly,
                                                config.threads);
        if (train.empty() || test.empty()) {
            throw Error("degenerate fold");
        }
        for (auto& summary : report.models) {
            summary.folds.push_back(fit_and_score(summary.kind, train, test, config));
        }
    }
    for (auto& summary : report.models) {
        summarize(summary);
    }
    return report;
}

namespace {

void emit(std::ostringstream& out, std::string_view model, const std::string& fold,
          const EvalReport& r, bool with_cells) {
    const std::string prefix = std::string(model) + "." + fold + ".";
    out << prefix << "rss=" << format_double(r.rss) << '\n';
    out << prefix << "js=" << format_double(r.js_divergence) << '\n';
    out << prefix << "bcf1=" << format_double(r.bcf1) << '\n';
    if (r.mse_beta) {
        out << prefix << "mse_beta=" << format_double(*r.mse_beta) << '\n';
    }
    if (with_cells) {
        out << prefix << "cells=" << r.cell_count << '\n';
    }
}

} // namespace

std::string ExperimentReport::to_key_value() const {
    std::ostringstream out;
    out << "# js: natural log, cell-count weighted; std: sample (n-1) over folds\n";
    for (const auto& m : models) {
        for (std::size_t f = 0; f < m.folds.size(); ++f) {
            emit(out, model_name(m.kind), std::to_string(f), m.folds[f], true);
        }
        emit(out, model_name(m.kind), "mean", m.mean, false);
        emit(out, model_name(m.kind), "std", m.stddev, false);
    }
    return out.str();
}

std::string ExperimentReport::to_table() const {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %22s %24s %20s %22s\n", "model", "RSS", "JS div.",
                  "BCF1", "MSE beta");
    out << line;
    for (const auto& m : models) {
        char mse[64] = "-";
        if (m.mean.mse_beta) {
            std::snprintf(mse, sizeof mse, "%.5g +- %.2g", *m.mean.mse_beta, *m.stddev.mse_beta);
        }
        char rss_s[64];
        char js_s[64];
        char f1_s[64];
        std::snprintf(rss_s, sizeof rss_s, "%.5g +- %.2g", m.mean.rss, m.stddev.rss);
        std::snprintf(js_s, sizeof js_s, "%.5g +- %.2g", m.mean.js_divergence, m.stddev.js_divergence);
        std::snprintf(f1_s, sizeof f1_s, "%.5g +- %.2g", m.mean.bcf1, m.stddev.bcf1);
        std::snprintf(line, sizeof line, "%-10s %22s %24s %20s %22s\n",
                      std::string(model_name(m.kind)).c_str(), rss_s, js_s, f1_s, mse);
        out << line;
    }
    return out.str();
}

} // namespace interrate
