#include "kqic/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "kqic/errors.hpp"
#include "kqic/rng.hpp"

namespace kqic {

double bootstrap_replicate(const BootstrapMatrix& M, std::span<const double> weights) {
    const auto n = M.M.rows();
    if (static_cast<Eigen::Index>(weights.size()) != n) {
        throw ArgumentError("weight vector length does not match M");
    }
    const Eigen::Map<const Vector> w(weights.data(), n);
    return w.dot(M.M * w);
}

std::vector<double> bootstrap_distribution(const BootstrapMatrix& M, std::size_t draws,
                                           std::uint64_t seed) {
    if (draws == 0) throw ArgumentError("bootstrap draws must be >= 1");
    const auto n = M.M.rows();
    std::vector<double> out(draws);

    // Replicates are evaluated in column blocks as one matrix product; each
    // column still comes from its own stream so the result matches the
    // one-at-a-time evaluation order-for-order.
    constexpr std::size_t kBlock = 64;
    Matrix W(n, static_cast<Eigen::Index>(std::min(kBlock, draws)));
    for (std::size_t start = 0; start < draws; start += kBlock) {
        const std::size_t count = std::min(kBlock, draws - start);
        W.resize(n, static_cast<Eigen::Index>(count));
        for (std::size_t c = 0; c < count; ++c) {
            const auto w = rademacher_weights(seed, start + c, static_cast<std::size_t>(n));
            W.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Vector>(w.data(), n);
        }
        const Matrix MW = M.M * W;
        for (std::size_t c = 0; c < count; ++c) {
            const auto col = static_cast<Eigen::Index>(c);
            out[start + c] = W.col(col).dot(MW.col(col));
        }
    }
    return out;
}

double upper_quantile(std::span<const double> replicates, double alpha) {
    if (replicates.empty()) throw ArgumentError("no replicates");
    std::vector<double> sorted(replicates.begin(), replicates.end());
    std::sort(sorted.begin(), sorted.end());
    const double B = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * B - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

double bootstrap_p_value(std::span<const double> replicates, double statistic) {
    const auto exceed = std::count_if(replicates.begin(), replicates.end(),
                                      [&](double r) { return r >= statistic; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates.size()) + 1.0);
}

TestOutcome calibrate(const BootstrapMatrix& M, std::size_t draws, double alpha,
                      std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    TestOutcome out;
    out.statistic = M.total();
    out.replicates = bootstrap_distribution(M, draws, seed);
    out.threshold = upper_quantile(out.replicates, alpha);
    out.p_value = bootstrap_p_value(out.replicates, out.statistic);
    out.reject = out.statistic > out.threshold;
    out.alpha = alpha;
    out.seed = seed;
    return out;
}

TestOutcome run_test(const Dataset& dataset, const KernelSpec& kx, const KernelSpec& ky,
                     std::size_t draws, double alpha, std::uint64_t seed) {
    if (dataset.size() < 2) throw ArgumentError("test needs at least two samples");
    auto out = calibrate(build_M(dataset, kx, ky), draws, alpha, seed);
    out.kx = kx;
    out.ky = ky;
    return out;
}

}  // namespace kqic
