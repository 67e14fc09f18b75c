// Acceptance suite: prints one PASS/FAIL/SKIP line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "kqic/baselines.hpp"
#include "kqic/bootstrap.hpp"
#include "kqic/harness.hpp"
#include "kqic/rng.hpp"
#include "kqic/selection.hpp"
#include "kqic/simgen.hpp"
#include "kqic/statistic.hpp"

using namespace kqic;

namespace {

int failures = 0;

void report(int id, const char* status, const std::string& title, const std::string& detail) {
    std::printf("%-4s criterion %2d: %s (%s)\n", status, id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (std::string(status) == "FAIL") ++failures;
}

void verdict(int id, bool ok, const std::string& title, const std::string& detail) {
    report(id, ok ? "PASS" : "FAIL", title, detail);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Dataset random_censored(Stream& s, std::size_t n) {
    std::vector<Sample> v(n);
    for (auto& x : v) {
        x.entry = 2.0 * s.uniform();
        x.observed = x.entry + -std::log(s.uniform());
        x.event = s.uniform() < 0.7;
    }
    return Dataset(v);
}

Dataset random_uncensored(Stream& s, std::size_t n) {
    std::vector<Sample> v(n);
    for (auto& x : v) {
        x.entry = 2.0 * s.uniform();
        x.observed = x.entry + -std::log(s.uniform());
        x.event = true;
    }
    return Dataset(v);
}

std::vector<KernelPair> kernel_triplet(const Dataset& d) {
    const double sx = median_heuristic(d.entries());
    const double sy = median_heuristic(d.observed_times());
    return {{KernelSpec::gaussian(sx), KernelSpec::gaussian(sy)},
            {KernelSpec::imq(sx), KernelSpec::imq(sy)},
            {KernelSpec::constant(), KernelSpec::constant()}};
}

ExperimentConfig experiment(ModelKind kind, double param, std::size_t n, double censoring,
                            std::size_t trials, std::vector<Method> methods,
                            std::uint64_t seed) {
    ExperimentConfig c;
    c.model.kind = kind;
    c.model.censor_target = censoring;
    c.parameter_values = {param};
    c.n_values = {n};
    c.trials = trials;
    c.methods = std::move(methods);
    c.master_seed = seed;
    return c;
}

double rate_of(const RejectionReport& r, Method m) {
    for (const auto& c : r.cells) {
        if (c.method == m) return c.rejection_rate;
    }
    return std::nan("");
}

std::string rates(const RejectionReport& r) {
    std::string s;
    for (const auto& c : r.cells) {
        if (!s.empty()) s += ", ";
        s += to_string(c.method) + "=" + fmt("%.3f", c.rejection_rate);
        if (c.aborted) s += " [aborted: " + c.diagnostic + "]";
    }
    return s;
}

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    Stream s(101, 0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Dataset d = random_censored(s, 3 + s.below(48));
        for (const auto& [kx, ky] : kernel_triplet(d)) {
            worst = std::max(worst, std::abs(kqic_statistic(d, kx, ky) -
                                             kqic_statistic_oracle(d, kx, ky)));
        }
    }
    const double secs = seconds_since(t0);
    verdict(1, worst <= 1e-10 && secs < 60.0, "oracle equivalence",
            "max |diff| = " + fmt("%.3g", worst) + ", " + fmt("%.2f s", secs));
}

std::vector<Dataset> uncensored_sets() {
    Stream s(202, 0);
    std::vector<Dataset> out;
    for (int k = 0; k < 100; ++k) out.push_back(random_uncensored(s, 3 + s.below(48)));
    return out;
}

void criterion2() {
    bool ok = true;
    double worst = 0.0;
    for (const auto& d : uncensored_sets()) {
        const double n = static_cast<double>(d.size());
        const double ka = static_cast<double>(kendall_ka(d));
        const double psi = constant_contrast_scaled(d);
        if (std::llround(psi) != -static_cast<long long>(ka) ||
            std::abs(psi - std::round(psi)) > 1e-9) {
            ok = false;
        }
        const double stat = kqic_statistic(d, KernelSpec::constant(), KernelSpec::constant());
        const double expect = ka * ka / (n * n * n * n);
        worst = std::max(worst, std::abs(stat - expect));
    }
    ok = ok && worst <= 1e-12;
    verdict(2, ok, "Kendall identity", "n^2 Psi_n = -K_a on all sets; max |stat - K_a^2/n^4| = " +
                                           fmt("%.3g", worst));
}

void criterion3() {
    double worst = 0.0;
    std::vector<Dataset> sets = uncensored_sets();
    Stream s(303, 0);
    for (int k = 0; k < 100; ++k) sets.push_back(random_censored(s, 3 + s.below(48)));
    for (const auto& d : sets) {
        const double nn = static_cast<double>(d.size() * d.size());
        const double lw = wlr_statistic(d, risk_weight(d)) / nn;
        const double stat = kqic_statistic(d, KernelSpec::constant(), KernelSpec::constant());
        worst = std::max(worst, std::abs(lw * lw - stat));
    }
    verdict(3, worst <= 1e-10, "WLR bridge",
            "max |(L_W/n^2)^2 - Psi_const| = " + fmt("%.3g", worst) + " over 200 sets");
}

void criterion4() {
    Stream s(404, 0);
    bool ones = true, sign = true, repro = true;
    for (int k = 0; k < 20; ++k) {
        const Dataset d = random_censored(s, 5 + s.below(60));
        const auto kp = kernel_triplet(d)[0];
        const auto M = build_M(d, kp.first, kp.second);
        const std::vector<double> one(d.size(), 1.0);
        ones = ones && bootstrap_replicate(M, one) == M.total() &&
               M.total() == kqic_statistic(d, kp.first, kp.second);
        const auto w = rademacher_weights(9, static_cast<std::uint64_t>(k), d.size());
        std::vector<double> neg(w.size());
        std::transform(w.begin(), w.end(), neg.begin(), [](double x) { return -x; });
        sign = sign && bootstrap_replicate(M, w) == bootstrap_replicate(M, neg);
        repro = repro && bootstrap_distribution(M, 200, 77) == bootstrap_distribution(M, 200, 77);
    }
    verdict(4, ones && sign && repro, "wild-bootstrap identities",
            std::string("ones=") + (ones ? "exact" : "mismatch") + ", W/-W=" +
                (sign ? "equal" : "differ") + ", reseed=" + (repro ? "bitwise" : "differ"));
}

void criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_benchmark(
        experiment(ModelKind::Monotone, 0.0, 100, 0.5, 200, {Method::KQIC_Gauss}, 505));
    const double rate = rate_of(r, Method::KQIC_Gauss);
    const double secs = seconds_since(t0);
    verdict(5, rate >= 0.01 && rate <= 0.11 && secs < 300.0, "Type-I, monotone rho=0",
            rates(r) + ", " + fmt("%.1f s", secs));
}

void criterion6() {
    const auto up = run_benchmark(
        experiment(ModelKind::Monotone, 0.4, 200, 0.5, 200, {Method::KQIC_Gauss}, 606));
    const auto down = run_benchmark(
        experiment(ModelKind::Monotone, -0.4, 200, 0.5, 200, {Method::KQIC_Gauss}, 607));
    const double a = rate_of(up, Method::KQIC_Gauss), b = rate_of(down, Method::KQIC_Gauss);
    verdict(6, a >= 0.90 && b >= 0.90, "power, monotone n=200",
            "rho=0.4: " + fmt("%.3f", a) + ", rho=-0.4: " + fmt("%.3f", b));
}

void criterion7() {
    const auto r = run_benchmark(experiment(ModelKind::Periodic, 0.0, 500, 0.25, 200,
                                            {Method::KQIC_Gauss, Method::KQIC_IMQ}, 707));
    const double a = rate_of(r, Method::KQIC_Gauss), b = rate_of(r, Method::KQIC_IMQ);
    verdict(7, a >= 0.01 && a <= 0.11 && b >= 0.01 && b <= 0.11, "periodic null, n=500",
            rates(r));
}

void criterion8() {
    auto cfg = experiment(ModelKind::Periodic, 5.0, 800, 0.4, 100,
                          {Method::KQIC_Gauss, Method::WLR}, 808);
    cfg.settings.selection = SelectionSettings{};
    const auto r = run_benchmark(cfg);
    const double k = rate_of(r, Method::KQIC_Gauss), w = rate_of(r, Method::WLR);
    verdict(8, k >= 0.5 && k > w, "periodic power with selection, beta=5", rates(r));
}

void criterion9() {
    const auto r = run_benchmark(experiment(ModelKind::DependentCensoring, 1.2, 500, 0.0, 100,
                                            {Method::KQIC_Gauss}, 909));
    const double a = rate_of(r, Method::KQIC_Gauss);
    verdict(9, a >= 0.0 && a <= 0.11, "dependent-censoring null, gamma=1.2", rates(r));
}

void criterion10() {
    const auto null = run_benchmark(experiment(ModelKind::Monotone, 0.0, 100, 0.5, 200,
                                               {Method::MinP1, Method::MinP2, Method::MB}, 1010));
    const auto alt = run_benchmark(
        experiment(ModelKind::Monotone, 0.4, 100, 0.5, 200, {Method::MinP1}, 1011));
    const double p1 = rate_of(null, Method::MinP1), p2 = rate_of(null, Method::MinP2),
                 mb = rate_of(null, Method::MB), pw = rate_of(alt, Method::MinP1);
    verdict(10, p1 <= 0.12 && p2 <= 0.12 && mb <= 0.12 && pw >= 0.45, "baseline sanity",
            "null: " + rates(null) + "; MinP1 power rho=0.4: " + fmt("%.3f", pw));
}

double time_test(std::size_t n) {
    GeneratorModel m;
    m.kind = ModelKind::Monotone;
    m.dependence = 0.2;
    m.censor_target = 0.5;
    const Dataset d = gen_dataset(m, n, 1100 + n);
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto [kx, ky] = median_kernels(d, KernelFamily::Gaussian);
        (void)run_test(d, kx, ky, 500, 0.05, 11);
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void criterion11() {
    const double t500 = time_test(500);
    const std::vector<std::size_t> ns = {100, 300, 500, 700, 900};
    std::vector<double> lx, ly;
    for (auto n : ns) {
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(n == 500 ? t500 : time_test(n)));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    verdict(11, t500 < 2.0 && slope <= 3.2, "performance",
            "n=500, B=500: " + fmt("%.3f s", t500) + "; log-log slope 100..900: " +
                fmt("%.2f", slope));
}

void criterion12() {
    const char* dir = std::getenv("KQIC_REALDATA_DIR");
    namespace fs = std::filesystem;
    struct Case {
        const char* file;
        const char* group;
        bool reject;
    };
    const Case cases[] = {{"channing.csv", "combined", false},
                          {"aids.csv", "combined", true},
                          {"abortion.csv", "treatment", true}};
    if (!dir) {
        report(12, "SKIP", "real-data decisions",
               "KQIC_REALDATA_DIR not set; Channing House, AIDS and abortion data unavailable");
        return;
    }
    for (const auto& c : cases) {
        if (!fs::exists(fs::path(dir) / c.file)) {
            report(12, "SKIP", "real-data decisions",
                   std::string("missing ") + c.file + " in " + dir);
            return;
        }
    }
    bool ok = true;
    std::string detail;
    MethodSettings settings;
    for (const auto& c : cases) {
        const Dataset d = load_csv_file((fs::path(dir) / c.file).string());
        const auto rows = run_realdata(d, {Method::KQIC_Gauss}, settings, 1212);
        bool found = false;
        for (const auto& row : rows) {
            if (row.group != c.group) continue;
            found = true;
            const auto& r = row.results.front();
            ok = ok && r.reject == c.reject;
            detail += std::string(c.file) + "/" + c.group + " p=" + fmt("%.3f", r.p_value) + " ";
        }
        if (!found) {
            ok = false;
            detail += std::string(c.file) + ": no group '" + c.group + "' ";
        }
    }
    verdict(12, ok, "real-data decisions", detail);
}

void criterion13() {
    Stream s(1313, 0);
    double worst = 0.0;
    bool nonneg = true;
    for (int k = 0; k < 100; ++k) {
        const Dataset d = random_censored(s, 3 + s.below(48));
        for (const auto& [kx, ky] : kernel_triplet(d)) {
            const Matrix J = jn_matrix(d, kx, ky);
            const double n2 = static_cast<double>(d.size() * d.size());
            worst = std::max(worst, std::abs(J.sum() / n2 - kqic_statistic(d, kx, ky)));
            nonneg = nonneg && variance_h1(J) >= 0.0;
        }
    }
    verdict(13, worst <= 1e-10 && nonneg, "selection recombination",
            "max |sum J / n^2 - Psi| = " + fmt("%.3g", worst) +
                (nonneg ? ", variance >= 0" : ", negative variance"));
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::function<void()>> all = {criterion1,  criterion2,  criterion3, criterion4,
                                              criterion5,  criterion6,  criterion7, criterion8,
                                              criterion9,  criterion10, criterion11, criterion12,
                                              criterion13};
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) {
            const int id = std::atoi(argv[i]);
            if (id >= 1 && id <= static_cast<int>(all.size())) all[id - 1]();
        }
    } else {
        for (auto& f : all) f();
    }
    return failures == 0 ? 0 : 1;
}
