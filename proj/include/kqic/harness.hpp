#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kqic/baselines.hpp"
#include "kqic/data_model.hpp"
#include "kqic/kernels.hpp"
#include "kqic/selection.hpp"
#include "kqic/simgen.hpp"

namespace kqic {

enum class Method { KQIC_Gauss, KQIC_IMQ, KQIC_Const, WLR, WLR_SC, MB, MinP1, MinP2 };

std::string to_string(Method m);
Method method_from_string(const std::string& name);  // throws ConfigError

struct SelectionSettings {
    double split_fraction = 0.2;
    double lambda = 0.01;
};

// Everything a single test run needs besides the data.
struct MethodSettings {
    double alpha = 0.05;
    std::size_t bootstrap_draws = 500;
    std::size_t permutations = kDefaultPermutations;
    std::size_t min_events = kDefaultMinEvents;
    std::optional<SelectionSettings> selection;  // KQIC only; median heuristic otherwise
    PermutationScheme permutation_scheme = PermutationScheme::Sequential;
};

struct MethodResult {
    Method method = Method::KQIC_Gauss;
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    std::uint64_t seed = 0;
    std::optional<KernelPair> kernels;  // KQIC only
    bool selection_fallback = false;
    std::string diagnostic;
};

MethodResult run_method(const Dataset& dataset, Method method, const MethodSettings& settings,
                        std::uint64_t seed);

struct ExperimentConfig {
    GeneratorModel model;  // model.dependence is overridden by each parameter value
    std::vector<std::size_t> n_values;
    std::vector<double> parameter_values;
    std::size_t trials = 200;
    std::vector<Method> methods;
    MethodSettings settings;
    std::uint64_t master_seed = 0;
    std::size_t threads = 0;  // 0: hardware concurrency
};

void validate(const ExperimentConfig& config);  // throws ConfigError

struct CellResult {
    Method method = Method::KQIC_Gauss;
    double param = 0.0;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    double mean_runtime_s = 0.0;
    std::vector<std::uint64_t> seeds;  // dataset seed of each trial
    std::vector<unsigned char> rejects;
    bool aborted = false;
    std::string diagnostic;
};

struct RejectionReport {
    ExperimentConfig config;
    std::vector<CellResult> cells;  // parameter-major, then n, then method
};

/// Dataset seed of trial t in cell (param index, n index). Every method in
/// the cell sees the same dataset; each method tests with
/// derive_seed(dataset_seed, {method enum value}).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t param_index,
                         std::size_t n_index, std::size_t trial);

RejectionReport run_benchmark(const ExperimentConfig& config);

enum class ReportFormat { Json, Csv };

void emit_report(const RejectionReport& report, ReportFormat format, std::ostream& out,
                 bool include_runtime = true);
std::string emit_report(const RejectionReport& report, ReportFormat format,
                        bool include_runtime = true);

ExperimentConfig config_from_json(const std::string& text);  // throws ConfigError
std::string config_to_json(const ExperimentConfig& config);
RejectionReport report_from_json(const std::string& text);

struct RealDataRow {
    std::string group;  // "combined" or a group label
    std::size_t n = 0;
    std::size_t events = 0;
    std::vector<MethodResult> results;
    std::string warning;
};

/// One row per group (in order of first appearance) followed by the
/// combined data; a single "combined" row when there are no groups.
std::vector<RealDataRow> run_realdata(const Dataset& dataset, const std::vector<Method>& methods,
                                      const MethodSettings& settings, std::uint64_t seed);

}  // namespace kqic
