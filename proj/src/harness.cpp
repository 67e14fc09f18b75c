#include "kqic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kqic/bootstrap.hpp"
#include "kqic/errors.hpp"
#include "kqic/rng.hpp"

namespace kqic {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr Method kAllMethods[] = {Method::KQIC_Gauss, Method::KQIC_IMQ, Method::KQIC_Const,
                                  Method::WLR,        Method::WLR_SC,   Method::MB,
                                  Method::MinP1,      Method::MinP2};

KernelFamily family_of(Method m) {
    switch (m) {
        case Method::KQIC_Gauss: return KernelFamily::Gaussian;
        case Method::KQIC_IMQ: return KernelFamily::IMQ;
        default: return KernelFamily::Constant;
    }
}

bool is_kqic(Method m) {
    return m == Method::KQIC_Gauss || m == Method::KQIC_IMQ || m == Method::KQIC_Const;
}

MethodResult from_baseline(Method m, const BaselineOutcome& o) {
    MethodResult r;
    r.method = m;
    r.statistic = o.statistic;
    r.p_value = o.p_value;
    r.reject = o.reject;
    r.seed = o.seed;
    r.diagnostic = o.diagnostic;
    return r;
}

std::string fixed6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::KQIC_Gauss: return "KQIC_Gauss";
        case Method::KQIC_IMQ: return "KQIC_IMQ";
        case Method::KQIC_Const: return "KQIC_Const";
        case Method::WLR: return "WLR";
        case Method::WLR_SC: return "WLR_SC";
        case Method::MB: return "MB";
        case Method::MinP1: return "MinP1";
        case Method::MinP2: return "MinP2";
    }
    return "KQIC_Gauss";
}

Method method_from_string(const std::string& name) {
    for (auto m : kAllMethods) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown method '" + name + "'");
}

MethodResult run_method(const Dataset& d, Method method, const MethodSettings& s,
                        std::uint64_t seed) {
    if (is_kqic(method)) {
        const KernelFamily family = family_of(method);
        Dataset test_data = d;
        KernelPair kernels;
        bool fallback = false;
        if (s.selection && family != KernelFamily::Constant) {
            SelectionConfig sc;
            sc.family = family;
            sc.split_fraction = s.selection->split_fraction;
            sc.lambda = s.selection->lambda;
            sc.seed = derive_seed(seed, {1});
            auto sel = select_or_fallback(d, sc);
            kernels = sel.chosen;
            fallback = sel.fallback;
            test_data = std::move(sel.test_subset);
        } else {
            kernels = median_kernels(d, family);
        }
        const auto out = run_test(test_data, kernels.first, kernels.second, s.bootstrap_draws,
                                  s.alpha, seed);
        MethodResult r;
        r.method = method;
        r.statistic = out.statistic;
        r.p_value = out.p_value;
        r.reject = out.reject;
        r.seed = seed;
        r.kernels = kernels;
        r.selection_fallback = fallback;
        if (fallback) r.diagnostic = "selection split degenerate; median heuristic on full data";
        return r;
    }
    switch (method) {
        case Method::WLR:
            return from_baseline(method, wlr_test(d, WlrVariant::RiskWeight, s.bootstrap_draws,
                                                  s.alpha, seed));
        case Method::WLR_SC:
            return from_baseline(method, wlr_test(d, WlrVariant::ScWeight, s.bootstrap_draws,
                                                  s.alpha, seed));
        case Method::MB:
            return from_baseline(method, mb_test(d, s.alpha, seed, s.bootstrap_draws));
        case Method::MinP1:
            return from_baseline(method, minp_test(d, MinpVariant::MinP1, s.min_events,
                                                   s.permutations, s.alpha, seed,
                                                   s.permutation_scheme));
        case Method::MinP2:
            return from_baseline(method, minp_test(d, MinpVariant::MinP2, s.min_events,
                                                   s.permutations, s.alpha, seed,
                                                   s.permutation_scheme));
        default:
            break;
    }
    throw ConfigError("unsupported method");
}

void validate(const ExperimentConfig& c) {
    if (c.trials == 0) throw ConfigError("trials must be >= 1");
    if (c.methods.empty()) throw ConfigError("methods must be nonempty");
    if (c.n_values.empty()) throw ConfigError("n_values must be nonempty");
    if (c.parameter_values.empty()) throw ConfigError("parameter_values must be nonempty");
    for (auto n : c.n_values) {
        if (n < 2) throw ConfigError("every n must be >= 2");
    }
    if (!(c.settings.alpha > 0.0 && c.settings.alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    if (c.settings.bootstrap_draws == 0) throw ConfigError("bootstrap_draws must be >= 1");
    if (c.settings.permutations == 0) throw ConfigError("permutations must be >= 1");
    if (c.settings.min_events == 0) throw ConfigError("min_events must be >= 1");
    if (c.settings.selection) {
        const auto& sel = *c.settings.selection;
        if (!(sel.split_fraction > 0.0 && sel.split_fraction < 1.0)) {
            throw ConfigError("selection.split_fraction must lie in (0, 1)");
        }
        if (!(sel.lambda > 0.0)) throw ConfigError("selection.lambda must be positive");
    }
    for (double p : c.parameter_values) {
        GeneratorModel m = c.model;
        m.dependence = p;
        validate(m);
    }
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t p, std::size_t j, std::size_t t) {
    return derive_seed(master, {p, j, t});
}

RejectionReport run_benchmark(const ExperimentConfig& config) {
    validate(config);
    const std::size_t P = config.parameter_values.size();
    const std::size_t N = config.n_values.size();
    const std::size_t M = config.methods.size();
    const std::size_t T = config.trials;

    // One censoring rate per parameter value.
    std::vector<GeneratorModel> models(P);
    for (std::size_t p = 0; p < P; ++p) {
        GeneratorModel m = config.model;
        m.dependence = config.parameter_values[p];
        models[p] = resolve_censoring(m);
    }

    struct Slot {
        bool reject = false;
        double runtime = 0.0;
        bool failed = false;
        std::string error;
    };
    std::vector<Slot> slots(P * N * T * M);
    auto slot = [&](std::size_t p, std::size_t j, std::size_t t, std::size_t k) -> Slot& {
        return slots[((p * N + j) * T + t) * M + k];
    };

    const std::size_t jobs = P * N * T;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) return;
            const std::size_t t = job % T;
            const std::size_t j = (job / T) % N;
            const std::size_t p = job / (T * N);
            const std::uint64_t dseed = trial_seed(config.master_seed, p, j, t);
            Dataset data;
            std::string gen_error;
            try {
                data = gen_dataset(models[p], config.n_values[j], dseed);
            } catch (const std::exception& e) {
                gen_error = e.what();
            }
            for (std::size_t k = 0; k < M; ++k) {
                Slot& s = slot(p, j, t, k);
                if (!gen_error.empty()) {
                    s.failed = true;
                    s.error = gen_error;
                    continue;
                }
                const auto start = std::chrono::steady_clock::now();
                try {
                    s.reject = run_method(data, config.methods[k], config.settings,
                                          derive_seed(dseed, {static_cast<std::uint64_t>(config.methods[k])}))
                                   .reject;
                } catch (const std::exception& e) {
                    s.failed = true;
                    s.error = e.what();
                }
                s.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                          start)
                                .count();
            }
        }
    };

    std::size_t threads = config.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RejectionReport report;
    report.config = config;
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t j = 0; j < N; ++j) {
            for (std::size_t k = 0; k < M; ++k) {
                CellResult c;
                c.method = config.methods[k];
                c.param = config.parameter_values[p];
                c.n = config.n_values[j];
                double runtime = 0.0;
                for (std::size_t t = 0; t < T; ++t) {
                    const Slot& s = slot(p, j, t, k);
                    c.seeds.push_back(trial_seed(config.master_seed, p, j, t));
                    if (s.failed) {
                        c.aborted = true;
                        c.diagnostic = "trial " + std::to_string(t) + ": " + s.error;
                        break;
                    }
                    c.rejects.push_back(s.reject ? 1 : 0);
                    c.rejections += s.reject ? 1 : 0;
                    runtime += s.runtime;
                }
                if (c.aborted) {
                    c.trials = 0;
                    c.rejections = 0;
                    c.rejects.clear();
                    c.rejection_rate = std::nan("");
                    c.mean_runtime_s = std::nan("");
                } else {
                    c.trials = T;
                    c.rejection_rate =
                        static_cast<double>(c.rejections) / static_cast<double>(T);
                    c.mean_runtime_s = runtime / static_cast<double>(T);
                }
                report.cells.push_back(std::move(c));
            }
        }
    }
    return report;
}

namespace {

json model_json(const GeneratorModel& m) {
    return {{"kind", to_string(m.kind)},
            {"dependence", m.dependence},
            {"censor_target", m.censor_target},
            {"censor_rate", m.censor_rate},
            {"exp_convention", m.exp_convention == ExpConvention::Rate ? "rate" : "scale"}};
}

json config_json(const ExperimentConfig& c) {
    json methods = json::array();
    for (auto m : c.methods) methods.push_back(to_string(m));
    json j = {{"model", model_json(c.model)},
              {"n_values", c.n_values},
              {"parameter_values", c.parameter_values},
              {"trials", c.trials},
              {"alpha", c.settings.alpha},
              {"methods", methods},
              {"bootstrap_draws", c.settings.bootstrap_draws},
              {"permutations", c.settings.permutations},
              {"min_events", c.settings.min_events},
              {"permutation_scheme", c.settings.permutation_scheme ==
                                             PermutationScheme::Sequential
                                         ? "sequential"
                                         : "rejection"},
              {"master_seed", c.master_seed},
              {"threads", c.threads}};
    if (c.settings.selection) {
        j["selection"] = {{"split_fraction", c.settings.selection->split_fraction},
                          {"lambda", c.settings.selection->lambda}};
    } else {
        j["selection"] = nullptr;
    }
    return j;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

ExperimentConfig config_from(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    if (!j.contains("model")) throw ConfigError("config.model is required");
    const json& m = j.at("model");
    c.model.kind = model_kind_from_string(m.at("kind").get<std::string>());
    c.model.dependence = get_or(m, "dependence", 0.0);
    c.model.censor_target = get_or(m, "censor_target", 0.0);
    c.model.censor_rate = get_or(m, "censor_rate", -1.0);
    const auto conv = get_or<std::string>(m, "exp_convention", "rate");
    if (conv == "rate") {
        c.model.exp_convention = ExpConvention::Rate;
    } else if (conv == "scale") {
        c.model.exp_convention = ExpConvention::Scale;
    } else {
        throw ConfigError("exp_convention must be 'rate' or 'scale'");
    }
    c.n_values = j.at("n_values").get<std::vector<std::size_t>>();
    c.parameter_values = j.at("parameter_values").get<std::vector<double>>();
    c.trials = get_or<std::size_t>(j, "trials", 200);
    c.settings.alpha = get_or(j, "alpha", 0.05);
    for (const auto& name : j.at("methods")) c.methods.push_back(method_from_string(name));
    c.settings.bootstrap_draws = get_or<std::size_t>(j, "bootstrap_draws", 500);
    c.settings.permutations = get_or<std::size_t>(j, "permutations", kDefaultPermutations);
    c.settings.min_events = get_or<std::size_t>(j, "min_events", kDefaultMinEvents);
    const auto scheme = get_or<std::string>(j, "permutation_scheme", "sequential");
    if (scheme == "sequential") {
        c.settings.permutation_scheme = PermutationScheme::Sequential;
    } else if (scheme == "rejection") {
        c.settings.permutation_scheme = PermutationScheme::Rejection;
    } else {
        throw ConfigError("permutation_scheme must be 'sequential' or 'rejection'");
    }
    if (j.contains("selection") && !j.at("selection").is_null()) {
        const json& s = j.at("selection");
        SelectionSettings sel;
        sel.split_fraction = get_or(s, "split_fraction", 0.2);
        sel.lambda = get_or(s, "lambda", 0.01);
        c.settings.selection = sel;
    }
    c.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
    c.threads = get_or<std::size_t>(j, "threads", 0);
    return c;
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

std::string config_to_json(const ExperimentConfig& c) { return config_json(c).dump(2); }

ExperimentConfig config_from_json(const std::string& text) {
    try {
        auto c = config_from(json::parse(text));
        validate(c);
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

void emit_report(const RejectionReport& r, ReportFormat format, std::ostream& out,
                 bool include_runtime) {
    if (format == ReportFormat::Csv) {
        out << "method,param,n,trials,rejection_rate,mean_runtime_s\n";
        for (const auto& c : r.cells) {
            out << to_string(c.method) << ',' << fixed6(c.param) << ',' << c.n << ','
                << c.trials << ',' << fixed6(c.rejection_rate) << ','
                << (include_runtime ? fixed6(c.mean_runtime_s) : std::string("0.000000"))
                << '\n';
        }
        return;
    }
    json cells = json::array();
    for (const auto& c : r.cells) {
        json jc = {{"method", to_string(c.method)},
                   {"param", c.param},
                   {"n", c.n},
                   {"trials", c.trials},
                   {"rejections", c.rejections},
                   {"rejection_rate", number_or_null(c.rejection_rate)},
                   {"mean_runtime_s",
                    include_runtime ? number_or_null(c.mean_runtime_s) : json(nullptr)},
                   {"seeds", c.seeds},
                   {"rejects", c.rejects},
                   {"aborted", c.aborted},
                   {"diagnostic", c.diagnostic}};
        cells.push_back(std::move(jc));
    }
    const json doc = {{"schema_version", kSchemaVersion},
                      {"config", config_json(r.config)},
                      {"cells", cells}};
    out << doc.dump(2) << '\n';
}

std::string emit_report(const RejectionReport& r, ReportFormat format, bool include_runtime) {
    std::ostringstream os;
    emit_report(r, format, os, include_runtime);
    return os.str();
}

RejectionReport report_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("schema_version").get<int>() != kSchemaVersion) {
            throw ConfigError("unsupported report schema_version");
        }
        RejectionReport r;
        r.config = config_from(doc.at("config"));
        for (const auto& jc : doc.at("cells")) {
            CellResult c;
            c.method = method_from_string(jc.at("method").get<std::string>());
            c.param = jc.at("param").get<double>();
            c.n = jc.at("n").get<std::size_t>();
            c.trials = jc.at("trials").get<std::size_t>();
            c.rejections = jc.at("rejections").get<std::size_t>();
            c.rejection_rate = get_or(jc, "rejection_rate", std::nan(""));
            c.mean_runtime_s = get_or(jc, "mean_runtime_s", std::nan(""));
            c.seeds = jc.at("seeds").get<std::vector<std::uint64_t>>();
            c.rejects = jc.at("rejects").get<std::vector<unsigned char>>();
            c.aborted = jc.at("aborted").get<bool>();
            c.diagnostic = jc.at("diagnostic").get<std::string>();
            r.cells.push_back(std::move(c));
        }
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid report: ") + e.what());
    }
}

std::vector<RealDataRow> run_realdata(const Dataset& d, const std::vector<Method>& methods,
                                      const MethodSettings& settings, std::uint64_t seed) {
    if (methods.empty()) throw ConfigError("method list must be nonempty");
    std::vector<std::pair<std::string, Dataset>> parts;
    if (d.has_groups()) parts = d.split_by_group();
    parts.emplace_back("combined", d);

    std::vector<RealDataRow> rows;
    for (std::size_t g = 0; g < parts.size(); ++g) {
        const auto& [name, data] = parts[g];
        RealDataRow row;
        row.group = name;
        row.n = data.size();
        row.events = data.event_count();
        if (row.n < 10) row.warning = "group has fewer than 10 samples";
        for (std::size_t k = 0; k < methods.size(); ++k) {
            row.results.push_back(run_method(data, methods[k], settings, derive_seed(seed, {static_cast<std::uint64_t>(methods[k])})));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace kqic
