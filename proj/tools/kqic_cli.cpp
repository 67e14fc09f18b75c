// Command-line front end; talks to the library only through the C API.
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kqic.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFeasibility = 3;

int exit_code(kqic_status s) {
    switch (s) {
        case KQIC_OK: return kExitOk;
        case KQIC_ERR_DATA: return kExitData;
        case KQIC_ERR_CONFIG:
        case KQIC_ERR_ARGUMENT: return kExitConfig;
        case KQIC_ERR_FEASIBILITY: return kExitFeasibility;
        case KQIC_ERR_INTERNAL: return kExitData;
    }
    return kExitData;
}

int report_failure(kqic_status s) {
    std::cerr << "kqic: " << kqic_last_error() << '\n';
    return exit_code(s);
}

struct DatasetHandle {
    kqic_dataset* ptr = nullptr;
    ~DatasetHandle() { kqic_dataset_free(ptr); }
};

struct TestArgs {
    std::string input;
    std::string method = "kqic";
    std::string kernel = "gauss";
    std::string bandwidth = "median";
    std::size_t bootstrap = 500;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string output = "json";
    std::size_t permutations = 500;
    std::size_t min_events = 5;
    bool by_group = false;
};

std::string resolve_method(const TestArgs& a) {
    if (a.method != "kqic" && a.method != "KQIC") return a.method;
    if (a.kernel == "gauss" || a.kernel == "gaussian") return "KQIC_Gauss";
    if (a.kernel == "imq") return "KQIC_IMQ";
    if (a.kernel == "const" || a.kernel == "constant") return "KQIC_Const";
    throw CLI::ValidationError("--kernel", "must be gauss, imq or const");
}

// Shortest round-trip representation.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int run_test_command(const TestArgs& a) {
    kqic_test_options opt;
    kqic_test_options_default(&opt);
    opt.alpha = a.alpha;
    opt.bootstrap_draws = a.bootstrap;
    opt.seed = a.seed;
    opt.permutations = a.permutations;
    opt.min_events = a.min_events;
    if (a.bandwidth == "auto") {
        opt.bandwidth_mode = KQIC_BANDWIDTH_SELECT;
    } else if (a.bandwidth == "median") {
        opt.bandwidth_mode = KQIC_BANDWIDTH_MEDIAN;
    } else {
        double scale = 0.0;
        try {
            std::size_t used = 0;
            scale = std::stod(a.bandwidth, &used);
            if (used != a.bandwidth.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            std::cerr << "kqic: --bandwidth must be auto, median or a positive number\n";
            return kExitConfig;
        }
        opt.bandwidth_mode = KQIC_BANDWIDTH_FIXED;
        opt.entry_scale = scale;
        opt.time_scale = scale;
    }
    const std::string method = resolve_method(a);

    DatasetHandle data;
    if (auto s = kqic_dataset_load_csv(a.input.c_str(), &data.ptr); s != KQIC_OK) {
        return report_failure(s);
    }

    if (a.by_group) {
        char* out = nullptr;
        if (auto s = kqic_realdata_run(data.ptr, method.c_str(), &opt, &out); s != KQIC_OK) {
            return report_failure(s);
        }
        const auto rows = nlohmann::json::parse(out);
        kqic_string_free(out);
        if (a.output == "csv") {
            std::cout << "group,n,events,method,statistic,p_value,reject\n";
            for (const auto& row : rows) {
                for (const auto& r : row["results"]) {
                    std::cout << row["group"].get<std::string>() << ',' << row["n"] << ','
                              << row["events"] << ',' << r["method"].get<std::string>() << ','
                              << fmt(r["statistic"]) << ',' << fmt(r["p_value"]) << ','
                              << (r["reject"].get<bool>() ? 1 : 0) << '\n';
                }
                if (!row["warning"].get<std::string>().empty()) {
                    std::cerr << "kqic: warning: group " << row["group"].get<std::string>()
                              << ": " << row["warning"].get<std::string>() << '\n';
                }
            }
        } else {
            std::cout << rows.dump(2) << '\n';
        }
        return kExitOk;
    }

    kqic_result r;
    if (auto s = kqic_run_method(data.ptr, method.c_str(), &opt, &r); s != KQIC_OK) {
        return report_failure(s);
    }
    const std::size_t n = kqic_dataset_size(data.ptr);
    const std::size_t events = kqic_dataset_event_count(data.ptr);
    if (a.output == "csv") {
        std::cout << "method,n,events,statistic,p_value,reject,alpha,seed,entry_scale,time_scale\n"
                  << method << ',' << n << ',' << events << ',' << fmt(r.statistic) << ','
                  << fmt(r.p_value) << ',' << r.reject << ',' << fmt(a.alpha) << ',' << r.seed
                  << ',' << fmt(r.entry_scale) << ',' << fmt(r.time_scale) << '\n';
    } else {
        const nlohmann::json j = {{"method", method},
                                  {"n", n},
                                  {"events", events},
                                  {"statistic", r.statistic},
                                  {"p_value", r.p_value},
                                  {"reject", r.reject != 0},
                                  {"alpha", a.alpha},
                                  {"seed", r.seed},
                                  {"bootstrap_draws", a.bootstrap},
                                  {"entry_scale", r.entry_scale},
                                  {"time_scale", r.time_scale},
                                  {"selection_fallback", r.selection_fallback != 0}};
        std::cout << j.dump(2) << '\n';
    }
    return kExitOk;
}

int run_simulate_command(const std::string& model, double param, std::size_t n,
                         double censoring, std::uint64_t seed, const std::string& out_path) {
    DatasetHandle data;
    if (auto s = kqic_simulate(model.c_str(), param, n, censoring, seed, &data.ptr);
        s != KQIC_OK) {
        return report_failure(s);
    }
    if (!out_path.empty()) {
        if (auto s = kqic_dataset_write_csv(data.ptr, out_path.c_str()); s != KQIC_OK) {
            return report_failure(s);
        }
        return kExitOk;
    }
    std::cout << "entry,time,event\n";
    for (std::size_t i = 0; i < kqic_dataset_size(data.ptr); ++i) {
        double x = 0.0, t = 0.0;
        int e = 0;
        kqic_dataset_get(data.ptr, i, &x, &t, &e);
        std::cout << fmt(x) << ',' << fmt(t) << ',' << e << '\n';
    }
    return kExitOk;
}

int run_benchmark_command(const std::string& config_path, const std::string& format,
                          bool no_timing, const std::string& out_path) {
    std::ifstream f(config_path);
    if (!f) {
        std::cerr << "kqic: cannot read config " << config_path << '\n';
        return kExitConfig;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    char* out = nullptr;
    const auto fmt_code = format == "csv" ? KQIC_FORMAT_CSV : KQIC_FORMAT_JSON;
    if (auto s = kqic_benchmark_run(buf.str().c_str(), fmt_code, no_timing ? 0 : 1, &out);
        s != KQIC_OK) {
        return report_failure(s);
    }
    if (out_path.empty()) {
        std::cout << out;
    } else {
        std::ofstream o(out_path, std::ios::binary);
        o << out;
        if (!o) {
            kqic_string_free(out);
            std::cerr << "kqic: cannot write " << out_path << '\n';
            return kExitData;
        }
    }
    kqic_string_free(out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel quasi-independence test for truncated, censored data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kqic_version());

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Test quasi-independence on a CSV dataset");
    test->add_option("--input", ta.input, "CSV with entry,time,event[,group] columns")
        ->required();
    test->add_option("--method", ta.method,
                     "kqic, WLR, WLR_SC, MB, MinP1, MinP2 (or KQIC_Gauss, KQIC_IMQ, KQIC_Const)")
        ->capture_default_str();
    test->add_option("--kernel", ta.kernel, "Kernel family for kqic: gauss, imq, const")
        ->check(CLI::IsMember({"gauss", "gaussian", "imq", "const", "constant"}))
        ->capture_default_str();
    test->add_option("--bandwidth", ta.bandwidth, "auto (selection), median, or a scale")
        ->capture_default_str();
    test->add_option("--bootstrap", ta.bootstrap, "Bootstrap draws")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    test->add_option("--alpha", ta.alpha, "Test level")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    test->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
    test->add_option("--output", ta.output, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    test->add_option("--permutations", ta.permutations, "Permutations for MinP1/MinP2")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    test->add_option("--min-events", ta.min_events, "Minimum events per group for MinP1/MinP2")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    test->add_flag("--by-group", ta.by_group, "Analyse each group and the combined data");

    std::string model, sim_out;
    double param = 0.0, censoring = 0.0;
    std::size_t n = 100;
    std::uint64_t sim_seed = 0;
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset as CSV");
    sim->add_option("--model", model, "monotone, vshape, periodic, depcens, null")
        ->required()
        ->check(CLI::IsMember({"monotone", "vshape", "periodic", "depcens", "null"}));
    sim->add_option("--param", param, "rho, beta or gamma")->capture_default_str();
    sim->add_option("--n", n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--censoring", censoring, "Target censoring fraction")
        ->capture_default_str();
    sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
    sim->add_option("--out", sim_out, "Write CSV here instead of stdout");

    std::string config, bench_format = "json", bench_out;
    bool no_timing = false;
    auto* bench = app.add_subcommand("benchmark", "Run a rejection-rate experiment");
    bench->add_option("--config", config, "JSON experiment config")->required();
    bench->add_option("--output", bench_format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    bench->add_flag("--no-timing", no_timing, "Omit runtimes for reproducible reports");
    bench->add_option("--out", bench_out, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*test) return run_test_command(ta);
        if (*sim) return run_simulate_command(model, param, n, censoring, sim_seed, sim_out);
        if (*bench) return run_benchmark_command(config, bench_format, no_timing, bench_out);
    } catch (const CLI::Error& e) {
        std::cerr << "kqic: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
