#include "interrate/baselines.hpp"
#include "interrate/core.hpp"
#include "interrate/error.hpp"
#include "interrate/evaluation.hpp"
#include "interrate/io.hpp"
#include "interrate/kernels.hpp"
#include "interrate/likelihood.hpp"
#include "interrate/metrics.hpp"
#include "interrate/solver.hpp"
#include "interrate/synthgen.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

namespace py = pybind11;
namespace ir = interrate;

namespace {

// Sequences cross the boundary as lists of (entity id, contagion) tuples.
using PySequence = std::vector<std::pair<std::uint32_t, bool>>;

std::vector<ir::Sequence> to_sequences(const std::vector<PySequence>& in) {
    std::vector<ir::Sequence> out;
    out.reserve(in.size());
    for (const auto& seq : in) {
        ir::Sequence s;
        for (const auto& [id, hit] : seq) {
            s.events.push_back({ir::EntityId{id}, hit});
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<PySequence> from_sequences(const std::vector<ir::Sequence>& in) {
    std::vector<PySequence> out;
    out.reserve(in.size());
    for (const auto& seq : in) {
        PySequence s;
        for (const auto& e : seq.events) {
            s.emplace_back(e.entity.value, e.contagion);
        }
        out.push_back(std::move(s));
    }
    return out;
}

using PyBeta = std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<double>>;

PyBeta beta_to_dict(const ir::BetaMatrix& beta) {
    PyBeta out;
    for (const auto& [key, coefficients] : beta.entries()) {
        out[{key.first.value, key.second.value}] = coefficients;
    }
    return out;
}

ir::BetaMatrix beta_from_dict(const PyBeta& entries, const ir::KernelSpec& kernel,
                              std::size_t entity_count) {
    ir::BetaMatrix beta(kernel, entity_count);
    for (const auto& [key, coefficients] : entries) {
        beta.set(ir::EntityId{key.first}, ir::EntityId{key.second}, coefficients);
    }
    return beta;
}

ir::KernelSpec make_kernel(const std::string& family, int max_shift) {
    return {ir::parse_family(family), max_shift};
}

ir::SolverConfig make_solver(double tolerance, int max_iterations) {
    ir::SolverConfig config;
    config.tolerance = tolerance;
    config.max_iterations = max_iterations;
    return config;
}

py::dict report_to_dict(const ir::EvalReport& r) {
    py::dict d;
    d["rss"] = r.rss;
    d["js"] = r.js_divergence;
    d["bcf1"] = r.bcf1;
    d["mse_beta"] = r.mse_beta ? py::cast(*r.mse_beta) : py::none();
    d["cells"] = r.cell_count;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Temporal interaction profiles between entities of exposure sequences.";

    py::register_exception<ir::Error>(m, "InterrateError", PyExc_ValueError);

    m.attr("BACKGROUND_FLOOR") = ir::kBackgroundFloor;

    py::class_<ir::KernelSpec>(m, "KernelSpec")
        .def(py::init(&make_kernel), py::arg("family") = "rbf", py::arg("max_shift") = 20)
        .def_property_readonly("family",
                               [](const ir::KernelSpec& k) { return std::string(ir::family_name(k.family)); })
        .def_readonly("max_shift", &ir::KernelSpec::max_shift)
        .def_property_readonly("dimension", &ir::KernelSpec::dimension)
        .def("__repr__", [](const ir::KernelSpec& k) {
            return "KernelSpec('" + std::string(ir::family_name(k.family)) + "', " +
                   std::to_string(k.max_shift) + ")";
        });

    m.def("feature_map", &ir::feature_map, py::arg("kernel"), py::arg("gap"));
    m.def("hazard",
          [](const std::vector<double>& beta, const ir::KernelSpec& kernel, int gap) {
              return ir::hazard(beta, kernel, gap);
          },
          py::arg("beta"), py::arg("kernel"), py::arg("gap"));

    py::class_<ir::ObservationSet>(m, "ObservationSet")
        .def_property_readonly("entity_count", &ir::ObservationSet::entity_count)
        .def_property_readonly("max_gap", &ir::ObservationSet::max_gap)
        .def("total_observations", &ir::ObservationSet::total_observations)
        .def("__len__", [](const ir::ObservationSet& o) { return o.cells().size(); })
        .def("cells",
             [](const ir::ObservationSet& o) {
                 std::vector<std::tuple<std::uint32_t, std::uint32_t, int, std::uint64_t, std::uint64_t>> out;
                 for (const auto& c : o.cells()) {
                     out.emplace_back(c.target.value, c.source.value, c.gap, c.contagions, c.total);
                 }
                 return out;
             },
             "List of (target, source, gap, contagions, total).");

    m.def("assemble_observations",
          [](const std::vector<PySequence>& sequences, std::size_t entity_count, int max_gap,
             int skip_prefix, int min_gap, int threads) {
              const auto seqs = to_sequences(sequences);
              return ir::assemble_observations(seqs, entity_count, {max_gap, skip_prefix, min_gap},
                                               threads);
          },
          py::arg("sequences"), py::arg("entity_count"), py::arg("max_gap") = 20,
          py::arg("skip_prefix") = 10, py::arg("min_gap") = 0, py::arg("threads") = 1);

    py::class_<ir::FitResult>(m, "FitResult")
        .def_property_readonly("beta", [](const ir::FitResult& r) { return beta_to_dict(r.beta); })
        .def_readonly("final_nll", &ir::FitResult::final_nll)
        .def_property_readonly("iterations", [](const ir::FitResult& r) {
            std::map<std::uint32_t, int> out;
            for (const auto& [k, v] : r.iterations) out[k.value] = v;
            return out;
        })
        .def_property_readonly("converged", [](const ir::FitResult& r) {
            std::map<std::uint32_t, bool> out;
            for (const auto& [k, v] : r.converged) out[k.value] = v;
            return out;
        });

    m.def("fit",
          [](const ir::ObservationSet& obs, const ir::KernelSpec& kernel, double tolerance,
             int max_iterations, int threads) {
              py::gil_scoped_release release;
              return ir::fit(obs, kernel, make_solver(tolerance, max_iterations), threads);
          },
          py::arg("obs"), py::arg("kernel"), py::arg("tolerance") = 1e-9,
          py::arg("max_iterations") = 5000, py::arg("threads") = 1);

    m.def("neg_log_likelihood",
          [](const ir::ObservationSet& obs, const PyBeta& beta, const ir::KernelSpec& kernel) {
              return ir::neg_log_likelihood(obs, beta_from_dict(beta, kernel, obs.entity_count()));
          },
          py::arg("obs"), py::arg("beta"), py::arg("kernel"));

    m.def("random_beta",
          [](std::size_t entity_count, const ir::KernelSpec& kernel, std::uint64_t seed,
             double interactions, double background_shift, double quiet_shift, int active_bumps,
             double amplitude) {
              return beta_to_dict(ir::random_beta(
                  entity_count, kernel, seed,
                  {interactions, background_shift, quiet_shift, active_bumps, amplitude}));
          },
          py::arg("entity_count"), py::arg("kernel"), py::arg("seed"),
          py::arg("interactions_per_target") = ir::TruthOptions{}.interactions_per_target,
          py::arg("background_shift") = ir::TruthOptions{}.background_shift,
          py::arg("quiet_shift") = ir::TruthOptions{}.quiet_shift,
          py::arg("active_bumps") = ir::TruthOptions{}.active_bumps,
          py::arg("amplitude") = ir::TruthOptions{}.amplitude);

    m.def("generate",
          [](const PyBeta& truth, const ir::KernelSpec& kernel, std::size_t entity_count,
             std::size_t sequence_count, int max_length, std::uint64_t seed,
             const std::string& rule, int threads) {
              ir::GenConfig config;
              config.entity_count = entity_count;
              config.sequence_count = sequence_count;
              config.max_length = max_length;
              config.seed = seed;
              config.rule = ir::parse_rule(rule);
              const auto beta = beta_from_dict(truth, kernel, entity_count);
              return from_sequences(ir::generate(beta, config, threads));
          },
          py::arg("truth"), py::arg("kernel"), py::arg("entity_count"),
          py::arg("sequence_count"), py::arg("max_length") = 50, py::arg("seed") = 0,
          py::arg("rule") = "independent", py::arg("threads") = 1);

    py::class_<ir::Predictor>(m, "Predictor")
        .def("predict", [](const ir::Predictor& p, std::uint32_t target, std::uint32_t source,
                           int gap) { return p.predict(ir::EntityId{target}, ir::EntityId{source}, gap); },
             py::arg("target"), py::arg("source"), py::arg("gap"));
    py::class_<ir::NaivePredictor, ir::Predictor>(m, "NaivePredictor");
    py::class_<ir::KernelPredictor, ir::Predictor>(m, "KernelPredictor");
    py::class_<ir::IcirPredictor, ir::Predictor>(m, "IcirPredictor")
        .def_property_readonly("implied_beta",
                               [](const ir::IcirPredictor& p) { return beta_to_dict(p.implied_beta()); });
    py::class_<ir::EmpiricalPredictor, ir::Predictor>(m, "EmpiricalPredictor")
        .def(py::init<const ir::ObservationSet&>(), py::arg("reference"));

    m.def("fit_naive", &ir::fit_naive, py::arg("obs"));
    m.def("fit_kernel_predictor",
          [](const ir::ObservationSet& obs, const ir::KernelSpec& kernel, double tolerance,
             int max_iterations, int threads) {
              auto fitted = ir::fit(obs, kernel, make_solver(tolerance, max_iterations), threads);
              return ir::KernelPredictor(std::move(fitted.beta), ir::NaivePredictor(obs));
          },
          py::arg("obs"), py::arg("kernel"), py::arg("tolerance") = 1e-9,
          py::arg("max_iterations") = 5000, py::arg("threads") = 1);
    m.def("fit_icir",
          [](const ir::ObservationSet& obs, const ir::KernelSpec& kernel, double tolerance,
             int max_iterations, int threads) {
              return ir::fit_icir(obs, kernel, make_solver(tolerance, max_iterations), threads);
          },
          py::arg("obs"), py::arg("kernel"), py::arg("tolerance") = 1e-9,
          py::arg("max_iterations") = 5000, py::arg("threads") = 1);

    m.def("rss", &ir::rss, py::arg("predictor"), py::arg("obs"));
    m.def("js_divergence", &ir::js_divergence, py::arg("predictor"), py::arg("obs"));
    m.def("bcf1", &ir::bcf1, py::arg("predictor"), py::arg("obs"));
    m.def("mse_beta",
          [](const PyBeta& fitted, const PyBeta& truth, const ir::KernelSpec& kernel,
             std::size_t entity_count, bool missing_as_null) {
              return ir::mse_beta(beta_from_dict(fitted, kernel, entity_count),
                                  beta_from_dict(truth, kernel, entity_count),
                                  missing_as_null ? ir::MissingPairs::Null
                                                  : ir::MissingPairs::Reject);
          },
          py::arg("fitted"), py::arg("truth"), py::arg("kernel"), py::arg("entity_count"),
          py::arg("missing_as_null") = false);

    m.def("plan_folds",
          [](std::size_t sequence_count, std::size_t fold_count, std::uint64_t seed) {
              return ir::plan_folds(sequence_count, fold_count, seed).assignment;
          },
          py::arg("sequence_count"), py::arg("fold_count") = 5, py::arg("seed") = 0);

    m.def("run_experiment",
          [](const std::vector<PySequence>& sequences, std::size_t entity_count,
             const std::vector<std::string>& models, std::size_t folds, std::uint64_t seed,
             int max_shift, int skip_prefix, int min_gap, double tolerance, int max_iterations,
             std::optional<PyBeta> truth, int threads) {
              const auto seqs = to_sequences(sequences);
              ir::ExperimentConfig config;
              config.models.clear();
              for (const auto& name : models) {
                  config.models.push_back(ir::parse_model(name));
              }
              config.assembly = {max_shift, skip_prefix, min_gap};
              config.solver = make_solver(tolerance, max_iterations);
              config.threads = threads;
              if (truth) {
                  config.truth = beta_from_dict(*truth, ir::KernelSpec::rbf(max_shift), entity_count);
              }
              const auto plan = ir::plan_folds(seqs.size(), folds, seed);
              ir::ExperimentReport report;
              {
                  py::gil_scoped_release release;
                  report = ir::run_experiment(seqs, entity_count, config, plan);
              }
              py::dict out;
              for (const auto& summary : report.models) {
                  py::dict entry;
                  py::list per_fold;
                  for (const auto& r : summary.folds) {
                      per_fold.append(report_to_dict(r));
                  }
                  entry["folds"] = per_fold;
                  entry["mean"] = report_to_dict(summary.mean);
                  entry["std"] = report_to_dict(summary.stddev);
                  out[py::str(std::string(ir::model_name(summary.kind)))] = entry;
              }
              return out;
          },
          py::arg("sequences"), py::arg("entity_count"),
          py::arg("models") = std::vector<std::string>{"rbf", "icir", "naive"},
          py::arg("folds") = 5, py::arg("seed") = 0, py::arg("max_shift") = 20,
          py::arg("skip_prefix") = 10, py::arg("min_gap") = 0, py::arg("tolerance") = 1e-9,
          py::arg("max_iterations") = 5000, py::arg("truth") = py::none(), py::arg("threads") = 1);

    m.def("load_sequences",
          [](const std::string& path) {
              auto corpus = ir::load_sequences(path);
              return py::make_tuple(corpus.vocabulary.labels(), from_sequences(corpus.sequences));
          },
          py::arg("path"), "Returns (labels, sequences).");
    m.def("save_sequences",
          [](const std::string& path, const std::vector<std::string>& labels,
             const std::vector<PySequence>& sequences) {
              ir::Corpus corpus;
              for (const auto& label : labels) {
                  corpus.vocabulary.intern(label);
              }
              corpus.sequences = to_sequences(sequences);
              ir::save_sequences(path, corpus);
          },
          py::arg("path"), py::arg("labels"), py::arg("sequences"));
    m.def("load_beta",
          [](const std::string& path) {
              auto file = ir::load_beta(path);
              return py::make_tuple(file.vocabulary.labels(), file.beta.kernel(),
                                    beta_to_dict(file.beta));
          },
          py::arg("path"), "Returns (labels, kernel, beta).");
    m.def("profile_csv",
          [](const std::vector<std::string>& labels, const ir::KernelSpec& kernel,
             const PyBeta& beta) {
              ir::Vocabulary vocabulary;
              for (const auto& label : labels) {
                  vocabulary.intern(label);
              }
              std::ostringstream out;
              ir::write_profile(out, beta_from_dict(beta, kernel, labels.size()), vocabulary);
              return out.str();
          },
          py::arg("labels"), py::arg("kernel"), py::arg("beta"));
}
