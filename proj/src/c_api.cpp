#include "kqic.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "json.hpp"
#include "kqic/bootstrap.hpp"
#include "kqic/errors.hpp"
#include "kqic/harness.hpp"
#include "kqic/selection.hpp"
#include "kqic/simgen.hpp"
#include "kqic/statistic.hpp"

struct kqic_dataset {
    kqic::Dataset data;
};

namespace {

thread_local std::string last_error;

kqic_status fail(kqic_status code, const char* what) {
    last_error = what;
    return code;
}

template <typename F>
kqic_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return KQIC_OK;
    } catch (const kqic::Error& e) {
        switch (e.category()) {
            case kqic::ErrorCategory::Data: return fail(KQIC_ERR_DATA, e.what());
            case kqic::ErrorCategory::Config: return fail(KQIC_ERR_CONFIG, e.what());
            case kqic::ErrorCategory::Feasibility: return fail(KQIC_ERR_FEASIBILITY, e.what());
            case kqic::ErrorCategory::Argument: return fail(KQIC_ERR_ARGUMENT, e.what());
        }
        return fail(KQIC_ERR_INTERNAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(KQIC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(KQIC_ERR_INTERNAL, e.what());
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw kqic::ArgumentError(what);
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

kqic::KernelSpec make_kernel(kqic_kernel_family family, double scale) {
    switch (family) {
        case KQIC_KERNEL_GAUSSIAN: return kqic::KernelSpec::gaussian(scale);
        case KQIC_KERNEL_IMQ: return kqic::KernelSpec::imq(scale);
        case KQIC_KERNEL_CONSTANT: return kqic::KernelSpec::constant();
    }
    throw kqic::ArgumentError("unknown kernel family");
}

kqic::MethodSettings settings_from(const kqic_test_options& o) {
    kqic::MethodSettings s;
    s.alpha = o.alpha;
    s.bootstrap_draws = o.bootstrap_draws;
    s.permutations = o.permutations;
    s.min_events = o.min_events;
    if (o.bandwidth_mode == KQIC_BANDWIDTH_SELECT) s.selection = kqic::SelectionSettings{};
    return s;
}

void fill(kqic_result* out, const kqic::MethodResult& r) {
    out->statistic = r.statistic;
    out->p_value = r.p_value;
    out->reject = r.reject ? 1 : 0;
    out->seed = r.seed;
    out->entry_scale = r.kernels ? r.kernels->first.scale : 0.0;
    out->time_scale = r.kernels ? r.kernels->second.scale : 0.0;
    out->selection_fallback = r.selection_fallback ? 1 : 0;
}

std::vector<kqic::Method> parse_methods(const char* list) {
    std::vector<kqic::Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(kqic::method_from_string(item));
    }
    return out;
}

}  // namespace

extern "C" {

KQIC_API const char* kqic_version(void) { return "1.0.0"; }

KQIC_API const char* kqic_last_error(void) { return last_error.c_str(); }

KQIC_API void kqic_test_options_default(kqic_test_options* o) {
    if (!o) return;
    o->alpha = 0.05;
    o->bootstrap_draws = kqic::kDefaultBootstrapDraws;
    o->seed = 0;
    o->bandwidth_mode = KQIC_BANDWIDTH_MEDIAN;
    o->entry_scale = 1.0;
    o->time_scale = 1.0;
    o->permutations = kqic::kDefaultPermutations;
    o->min_events = kqic::kDefaultMinEvents;
}

KQIC_API kqic_status kqic_dataset_create(const double* entry, const double* observed,
                                         const int* event, size_t n, kqic_dataset** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        require(n == 0 || (entry && observed && event), "input arrays must not be null");
        std::vector<kqic::RawTriple> raw(n);
        for (size_t i = 0; i < n; ++i) raw[i] = {entry[i], observed[i], double(event[i])};
        *out = new kqic_dataset{kqic::Dataset::validate(raw)};
    });
}

KQIC_API kqic_status kqic_dataset_load_csv(const char* path, kqic_dataset** out) {
    return guarded([&] {
        require(path && out, "path and out must not be null");
        *out = new kqic_dataset{kqic::load_csv_file(path)};
    });
}

KQIC_API kqic_status kqic_dataset_write_csv(const kqic_dataset* d, const char* path) {
    return guarded([&] {
        require(d && path, "dataset and path must not be null");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw kqic::DataError(std::string("cannot open ") + path + " for writing");
        kqic::write_csv(d->data, f);
        if (!f) throw kqic::DataError(std::string("write failed: ") + path);
    });
}

KQIC_API void kqic_dataset_free(kqic_dataset* d) { delete d; }

KQIC_API size_t kqic_dataset_size(const kqic_dataset* d) { return d ? d->data.size() : 0; }

KQIC_API size_t kqic_dataset_event_count(const kqic_dataset* d) {
    return d ? d->data.event_count() : 0;
}

KQIC_API kqic_status kqic_dataset_get(const kqic_dataset* d, size_t i, double* entry,
                                      double* observed, int* event) {
    return guarded([&] {
        require(d != nullptr, "dataset must not be null");
        require(i < d->data.size(), "index out of range");
        if (entry) *entry = d->data.entry(i);
        if (observed) *observed = d->data.observed(i);
        if (event) *event = d->data.event(i) ? 1 : 0;
    });
}

KQIC_API kqic_status kqic_median_scales(const kqic_dataset* d, double* sx, double* sy) {
    return guarded([&] {
        require(d && sx && sy, "arguments must not be null");
        *sx = kqic::median_heuristic(d->data.entries());
        *sy = kqic::median_heuristic(d->data.observed_times());
    });
}

KQIC_API kqic_status kqic_statistic(const kqic_dataset* d, kqic_kernel_family family, double sx,
                                    double sy, double* out) {
    return guarded([&] {
        require(d && out, "arguments must not be null");
        *out = kqic::kqic_statistic(d->data, make_kernel(family, sx), make_kernel(family, sy));
    });
}

KQIC_API kqic_status kqic_run_method(const kqic_dataset* d, const char* method,
                                     const kqic_test_options* options, kqic_result* out) {
    return guarded([&] {
        require(d && method && out, "arguments must not be null");
        kqic_test_options o;
        kqic_test_options_default(&o);
        if (options) o = *options;
        const kqic::Method m = kqic::method_from_string(method);
        const bool kernel_method = m == kqic::Method::KQIC_Gauss || m == kqic::Method::KQIC_IMQ;
        if (kernel_method && o.bandwidth_mode == KQIC_BANDWIDTH_FIXED) {
            const auto family = m == kqic::Method::KQIC_Gauss ? KQIC_KERNEL_GAUSSIAN
                                                               : KQIC_KERNEL_IMQ;
            const auto kx = make_kernel(family, o.entry_scale);
            const auto ky = make_kernel(family, o.time_scale);
            const auto r = kqic::run_test(d->data, kx, ky, o.bootstrap_draws, o.alpha, o.seed);
            kqic::MethodResult mr;
            mr.method = m;
            mr.statistic = r.statistic;
            mr.p_value = r.p_value;
            mr.reject = r.reject;
            mr.seed = o.seed;
            mr.kernels = kqic::KernelPair{kx, ky};
            fill(out, mr);
            return;
        }
        fill(out, kqic::run_method(d->data, m, settings_from(o), o.seed));
    });
}

KQIC_API kqic_status kqic_simulate(const char* model, double param, size_t n, double censoring,
                                   uint64_t seed, kqic_dataset** out) {
    return guarded([&] {
        require(model && out, "arguments must not be null");
        kqic::GeneratorModel g;
        g.kind = kqic::model_kind_from_string(model);
        g.dependence = param;
        g.censor_target = censoring;
        *out = new kqic_dataset{kqic::gen_dataset(g, n, seed)};
    });
}

KQIC_API kqic_status kqic_benchmark_run(const char* config_json, kqic_format format,
                                        int include_runtime, char** out) {
    return guarded([&] {
        require(config_json && out, "arguments must not be null");
        const auto cfg = kqic::config_from_json(config_json);
        const auto report = kqic::run_benchmark(cfg);
        *out = copy_string(kqic::emit_report(
            report, format == KQIC_FORMAT_CSV ? kqic::ReportFormat::Csv : kqic::ReportFormat::Json,
            include_runtime != 0));
    });
}

KQIC_API kqic_status kqic_realdata_run(const kqic_dataset* d, const char* methods,
                                       const kqic_test_options* options, char** out) {
    return guarded([&] {
        require(d && methods && out, "arguments must not be null");
        kqic_test_options o;
        kqic_test_options_default(&o);
        if (options) o = *options;
        const auto rows = kqic::run_realdata(d->data, parse_methods(methods), settings_from(o),
                                             o.seed);
        nlohmann::json doc = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json results = nlohmann::json::array();
            for (const auto& r : row.results) {
                results.push_back({{"method", kqic::to_string(r.method)},
                                   {"statistic", r.statistic},
                                   {"p_value", r.p_value},
                                   {"reject", r.reject},
                                   {"seed", r.seed},
                                   {"diagnostic", r.diagnostic}});
            }
            doc.push_back({{"group", row.group},
                           {"n", row.n},
                           {"events", row.events},
                           {"warning", row.warning},
                           {"results", results}});
        }
        *out = copy_string(doc.dump(2));
    });
}

KQIC_API void kqic_string_free(char* s) { std::free(s); }

}  // extern "C"
