#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "kqic/data_model.hpp"
#include "kqic/rng.hpp"

namespace kqic {

enum class ModelKind { Monotone, VShape, Periodic, DependentCensoring, NullIndependent };

// How Exp(theta) is read: theta is the rate (mean 1/theta) or the mean.
enum class ExpConvention { Rate, Scale };

/// Monotone:           X ~ Exp(5), Y ~ Weibull(shape 3, scale 8.5), Gaussian copula rho.
/// VShape:             X ~ Weibull(0.5, 4), |Y - 0.5| ~ U[0, 0.5], copula rho, random sign.
/// Periodic:           X ~ Exp(1), Y | X ~ Exp(exp(cos(2 pi beta X))).
/// DependentCensoring: X, Y ~ Exp(1) independent, C | X ~ Exp(exp(cos(2 pi gamma X))).
/// NullIndependent:    X, Y ~ Exp(1) independent.
/// Censoring is C ~ Exp(censor_rate) independent of (X, Y) except for
/// DependentCensoring, which ignores censor_target and censor_rate.
struct GeneratorModel {
    ModelKind kind = ModelKind::NullIndependent;
    double dependence = 0.0;
    double censor_target = 0.0;
    // Negative: tune from censor_target on first use. Zero: no censoring.
    double censor_rate = -1.0;
    ExpConvention exp_convention = ExpConvention::Rate;
};

inline constexpr std::size_t kDefaultTuningSize = 100000;
inline constexpr std::uint64_t kTuningSeed = 0x7475'6e65ULL;

void validate(const GeneratorModel& model);

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);  // throws ConfigError

double standard_normal_cdf(double z);

/// (inv_u(Phi(Z1)), inv_v(Phi(Z2))) with corr(Z1, Z2) = rho.
std::pair<double, double> gaussian_copula_pair(double rho,
                                               const std::function<double(double)>& inv_u,
                                               const std::function<double(double)>& inv_v,
                                               Stream& stream);

/// Exponential censoring rate whose censoring fraction among accepted
/// samples is within 0.01 of target, by bisection on log(rate) over
/// [1e-6, 1e6] with common random numbers. Returns 0 for target 0.
/// Throws FeasibilityError when the target is out of reach.
double tune_censoring_rate(const GeneratorModel& model, double target,
                           std::uint64_t seed = kTuningSeed,
                           std::size_t mc_size = kDefaultTuningSize);

/// Model with censor_rate filled in (tuned if negative).
GeneratorModel resolve_censoring(const GeneratorModel& model);

/// n accepted samples (entry < observed), deterministic in seed. Throws
/// FeasibilityError if acceptance is below 1e-4 after 1e6 proposals.
Dataset gen_dataset(const GeneratorModel& model, std::size_t n, std::uint64_t seed);

}  // namespace kqic
