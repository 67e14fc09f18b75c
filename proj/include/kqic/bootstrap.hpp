#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kqic/data_model.hpp"
#include "kqic/kernels.hpp"
#include "kqic/statistic.hpp"

namespace kqic {

inline constexpr std::size_t kDefaultBootstrapDraws = 500;

struct TestOutcome {
    double statistic = 0.0;
    std::vector<double> replicates;
    double p_value = 1.0;
    double threshold = 0.0;  // empirical (1 - alpha) quantile of the replicates
    bool reject = false;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    KernelSpec kx;
    KernelSpec ky;
};

/// W^T M W for a given weight vector.
double bootstrap_replicate(const BootstrapMatrix& M, std::span<const double> weights);

/// Replicate b uses Rademacher weights from stream (seed, b).
std::vector<double> bootstrap_distribution(const BootstrapMatrix& M, std::size_t draws,
                                           std::uint64_t seed);

/// Ascending order statistic at position ceil((1 - alpha) * B), 1-based.
double upper_quantile(std::span<const double> replicates, double alpha);

/// (1 + #{replicates >= statistic}) / (B + 1).
double bootstrap_p_value(std::span<const double> replicates, double statistic);

/// Wild-bootstrap KQIC test. Requires n >= 2 and 0 < alpha < 1.
TestOutcome run_test(const Dataset& dataset, const KernelSpec& kx, const KernelSpec& ky,
                     std::size_t draws, double alpha, std::uint64_t seed);

/// Calibration step alone, for callers that already hold M.
TestOutcome calibrate(const BootstrapMatrix& M, std::size_t draws, double alpha,
                      std::uint64_t seed);

}  // namespace kqic
