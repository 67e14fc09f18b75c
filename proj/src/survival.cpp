#include <algorithm>
#include <cmath>
#include <numeric>

#include "kqic/baselines.hpp"
#include "kqic/errors.hpp"

namespace kqic {

namespace {

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

void accumulate(LogrankResult& r, double d_a, double d, double n_a, double n) {
    if (n <= 0.0 || d <= 0.0) return;
    r.U += d_a - d * n_a / n;
    if (n > 1.0) r.V += d * (n_a / n) * (1.0 - n_a / n) * (n - d) / (n - 1.0);
}

void finish(LogrankResult& r) {
    if (r.V > 0.0) {
        r.Z = r.U / std::sqrt(r.V);
        r.p_value = two_sided_normal_p(r.Z);
    } else {
        r.Z = 0.0;
        r.p_value = 1.0;
    }
}

}  // namespace

double StepSurvivalFunction::at(double t) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return 1.0;
    return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double StepSurvivalFunction::left_limit(double t) const {
    const auto it = std::lower_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return 1.0;
    return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

StepSurvivalFunction kaplan_meier(std::span<const double> times,
                                  std::span<const unsigned char> events) {
    if (times.empty()) throw ArgumentError("Kaplan-Meier needs at least one observation");
    if (times.size() != events.size()) throw ArgumentError("times/events length mismatch");

    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });

    StepSurvivalFunction s;
    double surv = 1.0;
    std::size_t at_risk = times.size();
    for (std::size_t p = 0; p < order.size();) {
        const double t = times[order[p]];
        std::size_t d = 0, tied = 0;
        for (; p < order.size() && times[order[p]] == t; ++p, ++tied) d += events[order[p]] ? 1 : 0;
        // Censorings tied with events are still at risk at t.
        if (d > 0) {
            surv *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
            s.jump_times.push_back(t);
            s.values.push_back(surv);
        }
        at_risk -= tied;
    }
    return s;
}

LogrankResult two_sample_logrank(const Dataset& a, const Dataset& b) {
    if (a.empty() || b.empty()) throw ArgumentError("log-rank groups must be nonempty");
    std::vector<double> times;
    for (const Dataset* g : {&a, &b}) {
        for (std::size_t i = 0; i < g->size(); ++i) {
            if (g->event(i)) times.push_back(g->observed(i));
        }
    }
    if (times.empty()) throw ArgumentError("log-rank needs at least one event");
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    auto count = [](const Dataset& g, double t, double& at_risk, double& deaths) {
        at_risk = 0.0;
        deaths = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.entry(i) <= t && t <= g.observed(i)) at_risk += 1.0;
            if (g.event(i) && g.observed(i) == t) deaths += 1.0;
        }
    };

    LogrankResult r;
    for (double t : times) {
        double na, da, nb, db;
        count(a, t, na, da);
        count(b, t, nb, db);
        accumulate(r, da, da + db, na, na + nb);
    }
    finish(r);
    return r;
}

SplitLogrank::SplitLogrank(const Dataset& d) : n_(d.size()) {
    for (std::size_t i = 0; i < n_; ++i) {
        if (d.event(i)) event_times_.push_back(d.observed(i));
    }
    std::sort(event_times_.begin(), event_times_.end());
    event_times_.erase(std::unique(event_times_.begin(), event_times_.end()), event_times_.end());
    const std::size_t D = event_times_.size();

    at_risk_.assign(D, 0);
    deaths_.assign(D, 0);
    first_.resize(n_);
    last_.resize(n_);
    event_index_.assign(n_, -1);
    std::vector<long> diff(D + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto lo = std::lower_bound(event_times_.begin(), event_times_.end(), d.entry(i));
        const auto hi = std::upper_bound(event_times_.begin(), event_times_.end(), d.observed(i));
        first_[i] = static_cast<std::size_t>(lo - event_times_.begin());
        const auto hi_idx = static_cast<std::size_t>(hi - event_times_.begin());
        // last_ < first_ encodes "never at risk at an event time".
        last_[i] = hi_idx == 0 ? 0 : hi_idx - 1;
        if (hi_idx == 0 || first_[i] > last_[i]) {
            first_[i] = 1;
            last_[i] = 0;
        } else {
            ++diff[first_[i]];
            --diff[last_[i] + 1];
        }
        if (d.event(i)) {
            event_index_[i] = static_cast<long>(hi_idx - 1);
            ++deaths_[hi_idx - 1];
        }
    }
    long running = 0;
    for (std::size_t j = 0; j < D; ++j) {
        running += diff[j];
        at_risk_[j] = running;
    }
    diff_.assign(2 * (D + 1), 0);
}

LogrankResult SplitLogrank::compare(std::span<const unsigned char> in_a) const {
    const std::size_t D = event_times_.size();
    std::fill(diff_.begin(), diff_.end(), 0);
    long* risk = diff_.data();
    long* dead = diff_.data() + (D + 1);
    for (std::size_t i = 0; i < n_; ++i) {
        if (!in_a[i]) continue;
        if (first_[i] <= last_[i]) {
            ++risk[first_[i]];
            --risk[last_[i] + 1];
        }
        if (event_index_[i] >= 0) ++dead[event_index_[i]];
    }
    LogrankResult r;
    long n_a = 0;
    for (std::size_t j = 0; j < D; ++j) {
        n_a += risk[j];
        accumulate(r, static_cast<double>(dead[j]), static_cast<double>(deaths_[j]),
                   static_cast<double>(n_a), static_cast<double>(at_risk_[j]));
    }
    finish(r);
    return r;
}

}  // namespace kqic
