#include <cmath>

#include "kqic/baselines.hpp"
#include "kqic/bootstrap.hpp"
#include "kqic/errors.hpp"
#include "kqic/rng.hpp"

namespace kqic {

namespace {

inline bool chain(double xk, double xi, double tk, double ti) {
    return xk <= xi && xi < tk && tk <= ti;
}

double risk_count(const Dataset& d, double x, double y) {
    std::size_t c = 0;
    for (std::size_t m = 0; m < d.size(); ++m) {
        if (d.entry(m) <= x && d.observed(m) >= y) ++c;
    }
    return static_cast<double>(c);
}

}  // namespace

WeightFunction risk_weight(const Dataset& dataset) {
    return [d = dataset](double x, double y) { return risk_count(d, x, y); };
}

ScWeight::ScWeight(const Dataset& d)
    : entry_(d.entries().begin(), d.entries().end()),
      observed_(d.observed_times().begin(), d.observed_times().end()),
      skipped_(std::make_shared<std::size_t>(0)) {
    std::vector<double> residual(d.size());
    std::vector<unsigned char> censored(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        residual[i] = d.observed(i) - d.entry(i);
        censored[i] = d.event(i) ? 0 : 1;
    }
    km_ = kaplan_meier(residual, censored);
}

double ScWeight::operator()(double x, double y) const {
    double acc = 0.0;
    for (std::size_t m = 0; m < entry_.size(); ++m) {
        if (!(entry_[m] <= x && observed_[m] >= y)) continue;
        const double s = km_.left_limit(y - entry_[m]);
        if (s <= 0.0) {
            ++*skipped_;
            continue;
        }
        acc += 1.0 / s;
    }
    return acc / static_cast<double>(entry_.size());
}

std::vector<double> wlr_residuals(const Dataset& d, const WeightFunction& w) {
    const std::size_t n = d.size();
    std::vector<double> res(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double r = d.event(i) ? w(d.entry(i), d.observed(i)) : 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!d.event(k) || !chain(d.entry(k), d.entry(i), d.observed(k), d.observed(i))) {
                continue;
            }
            const double R = risk_count(d, d.entry(i), d.observed(k));
            // i itself is in the risk set whenever the chain holds.
            if (R <= 0.0) throw std::logic_error("empty risk set under chain indicator");
            r -= w(d.entry(i), d.observed(k)) / R;
        }
        res[i] = r;
    }
    return res;
}

double wlr_statistic(const Dataset& d, const WeightFunction& w) {
    double total = 0.0;
    for (double r : wlr_residuals(d, w)) total += r;
    return total;
}

BaselineOutcome wlr_test(const Dataset& d, WlrVariant variant, std::size_t draws, double alpha,
                         std::uint64_t seed) {
    if (d.size() < 2) throw ArgumentError("test needs at least two samples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    BaselineOutcome out;
    out.seed = seed;

    if (variant == WlrVariant::RiskWeight) {
        out.method = BaselineMethod::WLR;
        out.calibration = Calibration::KqicEquivalent;
        const double nn = static_cast<double>(d.size()) * static_cast<double>(d.size());
        const double lw = wlr_statistic(d, risk_weight(d));
        out.statistic = (lw / nn) * (lw / nn);
        const auto kq = run_test(d, KernelSpec::constant(), KernelSpec::constant(), draws, alpha,
                                 seed);
        out.p_value = kq.p_value;
        out.reject = kq.reject;
        return out;
    }

    out.method = BaselineMethod::WLR_SC;
    out.calibration = Calibration::WildMultiplier;
    if (draws == 0) throw ArgumentError("bootstrap draws must be >= 1");
    const ScWeight weight(d);
    const auto res = wlr_residuals(d, std::cref(weight));
    double observed = 0.0;
    for (double r : res) observed += r;
    out.statistic = observed;

    std::size_t exceed = 0;
    for (std::size_t b = 0; b < draws; ++b) {
        const auto w = rademacher_weights(seed, b, res.size());
        double rep = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i) rep += w[i] * res[i];
        if (std::abs(rep) >= std::abs(observed)) ++exceed;
    }
    out.p_value = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(draws) + 1.0);
    out.reject = out.p_value <= alpha;
    if (weight.skipped_terms() > 0) {
        out.diagnostic = std::to_string(weight.skipped_terms()) +
                         " weight term(s) skipped: censoring survival left limit is zero";
    }
    return out;
}

MbStatistic mb_statistic(const Dataset& d) {
    MbStatistic s;
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            if (std::max(d.entry(i), d.entry(j)) > std::min(d.observed(i), d.observed(j))) continue;
            const bool both = d.event(i) && d.event(j);
            const bool i_first = d.observed(i) < d.observed(j) && d.event(i);
            const bool j_first = d.observed(j) < d.observed(i) && d.event(j);
            if (!(both || i_first || j_first)) continue;
            const double p = (d.entry(i) - d.entry(j)) * (d.observed(i) - d.observed(j));
            s.tau_sum += (p > 0.0) - (p < 0.0);
            ++s.comparable_pairs;
        }
    }
    return s;
}

BaselineOutcome mb_test(const Dataset& d, double alpha, std::uint64_t seed, std::size_t draws) {
    (void)draws;
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    BaselineOutcome out;
    out.method = BaselineMethod::MB;
    out.calibration = Calibration::NormalJackknife;
    out.seed = seed;

    const std::size_t n = d.size();
    std::vector<double> sign_sum(n, 0.0);
    std::vector<double> pair_count(n, 0.0);
    double S = 0.0, N = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::max(d.entry(i), d.entry(j)) > std::min(d.observed(i), d.observed(j))) continue;
            const bool both = d.event(i) && d.event(j);
            const bool i_first = d.observed(i) < d.observed(j) && d.event(i);
            const bool j_first = d.observed(j) < d.observed(i) && d.event(j);
            if (!(both || i_first || j_first)) continue;
            const double p = (d.entry(i) - d.entry(j)) * (d.observed(i) - d.observed(j));
            const double s = (p > 0.0) - (p < 0.0);
            S += s;
            N += 1.0;
            sign_sum[i] += s;
            sign_sum[j] += s;
            pair_count[i] += 1.0;
            pair_count[j] += 1.0;
        }
    }
    out.statistic = S;
    if (N == 0.0) {
        out.p_value = 1.0;
        out.diagnostic = "no comparable pairs";
        return out;
    }

    const double tau = S / N;
    std::vector<double> loo;
    loo.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rest = N - pair_count[i];
        if (rest > 0.0) loo.push_back((S - sign_sum[i]) / rest);
    }
    double var = 0.0;
    if (loo.size() >= 2) {
        double mean = 0.0;
        for (double v : loo) mean += v;
        mean /= static_cast<double>(loo.size());
        for (double v : loo) var += (v - mean) * (v - mean);
        var *= static_cast<double>(loo.size() - 1) / static_cast<double>(loo.size());
    }
    if (!(var > 0.0)) {
        out.p_value = 1.0;
        out.diagnostic = "degenerate jackknife variance";
        return out;
    }
    const double z = tau / std::sqrt(var);
    out.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    out.reject = out.p_value <= alpha;
    return out;
}

std::string to_string(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::WLR: return "WLR";
        case BaselineMethod::WLR_SC: return "WLR_SC";
        case BaselineMethod::MB: return "MB";
        case BaselineMethod::MinP1: return "MinP1";
        case BaselineMethod::MinP2: return "MinP2";
    }
    return "WLR";
}

std::string to_string(Calibration c) {
    switch (c) {
        case Calibration::WildMultiplier: return "wild_multiplier";
        case Calibration::Permutation: return "permutation";
        case Calibration::KqicEquivalent: return "kqic_equivalent";
        case Calibration::NormalJackknife: return "normal_jackknife";
    }
    return "kqic_equivalent";
}

}  // namespace kqic
