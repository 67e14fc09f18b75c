#include "kqic/simgen.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "kqic/errors.hpp"

namespace kqic {

namespace {

constexpr std::size_t kAcceptanceWindow = 1000000;
constexpr double kMinAcceptance = 1e-4;

// Inverse CDFs written on the upper tail q = 1 - u to keep precision.
double exp_from_upper(double q, double theta, ExpConvention c) {
    const double e = -std::log(q);
    return c == ExpConvention::Rate ? e / theta : e * theta;
}

double weibull_from_upper(double q, double shape, double scale) {
    return scale * std::pow(-std::log(q), 1.0 / shape);
}

double exp_draw(Stream& s, double theta, ExpConvention c) {
    return exp_from_upper(s.uniform(), theta, c);
}

struct Proposal {
    double x = 0.0;
    double y = 0.0;
    double c_unit = 0.0;  // unit exponential, scaled by the censoring rate
    double c_fixed = std::numeric_limits<double>::quiet_NaN();  // model-defined censoring
};

// Upper-tail uniforms from a correlated normal pair.
std::pair<double, double> copula_tails(double rho, Stream& s) {
    const double z1 = s.normal();
    const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * s.normal();
    auto clamp = [](double q) {
        return std::min(std::max(q, std::numeric_limits<double>::min()),
                        std::nextafter(1.0, 0.0));
    };
    return {clamp(standard_normal_cdf(-z1)), clamp(standard_normal_cdf(-z2))};
}

Proposal propose(const GeneratorModel& m, Stream& s) {
    Proposal p;
    const auto conv = m.exp_convention;
    switch (m.kind) {
        case ModelKind::Monotone: {
            const auto [qx, qy] = copula_tails(m.dependence, s);
            p.x = exp_from_upper(qx, 5.0, conv);
            p.y = weibull_from_upper(qy, 3.0, 8.5);
            break;
        }
        case ModelKind::VShape: {
            const auto [qx, qy] = copula_tails(m.dependence, s);
            p.x = weibull_from_upper(qx, 0.5, 4.0);
            const double half = 0.5 * (1.0 - qy);
            p.y = s.coin() ? 0.5 + half : 0.5 - half;
            break;
        }
        case ModelKind::Periodic:
            p.x = exp_draw(s, 1.0, conv);
            p.y = exp_draw(s, std::exp(std::cos(2.0 * std::numbers::pi * m.dependence * p.x)),
                           conv);
            break;
        case ModelKind::DependentCensoring:
            p.x = exp_draw(s, 1.0, conv);
            p.y = exp_draw(s, 1.0, conv);
            p.c_fixed = exp_draw(
                s, std::exp(std::cos(2.0 * std::numbers::pi * m.dependence * p.x)), conv);
            return p;
        case ModelKind::NullIndependent:
            p.x = exp_draw(s, 1.0, conv);
            p.y = exp_draw(s, 1.0, conv);
            break;
    }
    p.c_unit = -std::log(s.uniform());
    return p;
}

double censoring_time(const Proposal& p, double rate) {
    if (!std::isnan(p.c_fixed)) return p.c_fixed;
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return p.c_unit / rate;
}

// Censoring fraction among accepted proposals; -1 if none accepted.
double censoring_fraction(const std::vector<Proposal>& props, double rate) {
    std::size_t acc = 0, cens = 0;
    for (const auto& p : props) {
        const double c = censoring_time(p, rate);
        const double t = std::min(p.y, c);
        if (!(p.x < t)) continue;
        ++acc;
        if (!(p.y <= c)) ++cens;
    }
    return acc == 0 ? -1.0 : static_cast<double>(cens) / static_cast<double>(acc);
}

}  // namespace

void validate(const GeneratorModel& m) {
    if (!std::isfinite(m.dependence)) throw ConfigError("dependence parameter must be finite");
    switch (m.kind) {
        case ModelKind::Monotone:
        case ModelKind::VShape:
            if (!(std::abs(m.dependence) < 1.0)) throw ConfigError("copula rho must satisfy |rho| < 1");
            break;
        case ModelKind::Periodic:
        case ModelKind::DependentCensoring:
            if (m.dependence < 0.0) throw ConfigError("beta/gamma must be >= 0");
            break;
        case ModelKind::NullIndependent:
            break;
    }
    if (!(m.censor_target >= 0.0 && m.censor_target < 1.0)) {
        throw ConfigError("censoring target must lie in [0, 1)");
    }
    if (std::isnan(m.censor_rate)) throw ConfigError("censoring rate must not be NaN");
}

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Monotone: return "monotone";
        case ModelKind::VShape: return "vshape";
        case ModelKind::Periodic: return "periodic";
        case ModelKind::DependentCensoring: return "depcens";
        case ModelKind::NullIndependent: return "null";
    }
    return "null";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (auto k : {ModelKind::Monotone, ModelKind::VShape, ModelKind::Periodic,
                   ModelKind::DependentCensoring, ModelKind::NullIndependent}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown model '" + name + "'");
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::pair<double, double> gaussian_copula_pair(double rho,
                                               const std::function<double(double)>& inv_u,
                                               const std::function<double(double)>& inv_v,
                                               Stream& s) {
    if (!(std::abs(rho) < 1.0)) throw ArgumentError("copula rho must satisfy |rho| < 1");
    const double z1 = s.normal();
    const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * s.normal();
    return {inv_u(standard_normal_cdf(z1)), inv_v(standard_normal_cdf(z2))};
}

double tune_censoring_rate(const GeneratorModel& model, double target, std::uint64_t seed,
                           std::size_t mc_size) {
    validate(model);
    if (!(target >= 0.0 && target < 1.0)) throw ConfigError("censoring target must lie in [0, 1)");
    if (target == 0.0) return 0.0;
    if (mc_size == 0) throw ArgumentError("mc_size must be >= 1");

    Stream s(seed, 0);
    std::vector<Proposal> props(mc_size);
    for (auto& p : props) p = propose(model, s);

    double lo = std::log(1e-6), hi = std::log(1e6);
    const double f_lo = censoring_fraction(props, std::exp(lo));
    double f_hi = censoring_fraction(props, std::exp(hi));
    if (f_hi < 0.0) f_hi = 1.0;  // nothing accepted: the censoring dominates
    if (f_lo > target + 0.01 || f_hi < target - 0.01) {
        throw FeasibilityError("censoring target unreachable for rates in [1e-6, 1e6]");
    }
    double best = std::exp(lo), best_err = std::abs(f_lo - target);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = censoring_fraction(props, std::exp(mid));
        if (f >= 0.0 && std::abs(f - target) < best_err) {
            best = std::exp(mid);
            best_err = std::abs(f - target);
        }
        if (best_err <= 0.001) break;
        // Too few accepted samples at high rates reads as over-censored.
        if (f < 0.0 || f > target) hi = mid; else lo = mid;
    }
    if (best_err > 0.01) throw FeasibilityError("censoring rate tuning did not converge");
    return best;
}

GeneratorModel resolve_censoring(const GeneratorModel& model) {
    validate(model);
    GeneratorModel m = model;
    if (m.kind == ModelKind::DependentCensoring) {
        m.censor_rate = 0.0;
    } else if (m.censor_rate < 0.0) {
        m.censor_rate = tune_censoring_rate(m, m.censor_target);
    }
    return m;
}

Dataset gen_dataset(const GeneratorModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ArgumentError("n must be >= 1");
    const GeneratorModel m = resolve_censoring(model);
    Stream s(seed, 0);
    std::vector<Sample> out;
    out.reserve(n);
    std::size_t proposals = 0;
    while (out.size() < n) {
        const Proposal p = propose(m, s);
        ++proposals;
        const double c = censoring_time(p, m.censor_rate);
        const double t = std::min(p.y, c);
        if (p.x < t && p.x >= 0.0) out.push_back({p.x, t, p.y <= c});
        if (proposals == kAcceptanceWindow &&
            static_cast<double>(out.size()) < kMinAcceptance * static_cast<double>(proposals)) {
            throw FeasibilityError("acceptance probability below 1e-4; truncation too severe");
        }
    }
    return Dataset(out);
}

}  // namespace kqic
