#include "kqic/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kqic/errors.hpp"
#include "kqic/rng.hpp"
#include "kqic/statistic.hpp"

namespace kqic {

namespace {

KernelSpec scaled(KernelFamily family, double scale) {
    if (family == KernelFamily::Constant) return KernelSpec::constant();
    return {family, scale};
}

// The entry-kernel-dependent factor of J, shared by every time kernel.
Matrix g_matrix(const Matrix& K, const Matrix& B, const Vector& pi) {
    Matrix KB = K * B;
    Matrix g = B.transpose() * KB;
    g -= 2.0 * pi.asDiagonal() * KB;
    g += K.cwiseProduct(pi * pi.transpose());
    return g;
}

Matrix event_masked_gram(const Dataset& d, const KernelSpec& ky) {
    Matrix L = gram_matrix(ky, d.observed_times());
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        if (!d.event(static_cast<std::size_t>(i))) {
            L.row(i).setZero();
            L.col(i).setZero();
        }
    }
    return L;
}

}  // namespace

Matrix jn_matrix(const Dataset& d, const KernelSpec& kx, const KernelSpec& ky) {
    if (d.empty()) throw ArgumentError("dataset is empty");
    const Matrix g = g_matrix(gram_matrix(kx, d.entries()), risk_chain_matrix(d),
                              pi_hat_diagonal(d));
    return event_masked_gram(d, ky).cwiseProduct(g);
}

double variance_h1(const Matrix& jn) {
    if (jn.rows() != jn.cols() || jn.rows() == 0) throw ArgumentError("J must be square");
    const double n = static_cast<double>(jn.rows());
    const Vector row_means = jn.rowwise().sum() / n;
    const double grand = jn.sum() / (n * n);
    const double v = row_means.squaredNorm() / n - grand * grand;
    return v > 0.0 ? v : 0.0;
}

KernelPair median_kernels(const Dataset& d, KernelFamily family) {
    if (family == KernelFamily::Constant) return {KernelSpec::constant(), KernelSpec::constant()};
    return {scaled(family, median_heuristic(d.entries())),
            scaled(family, median_heuristic(d.observed_times()))};
}

std::vector<KernelPair> default_grid(const Dataset& d, KernelFamily family) {
    if (family == KernelFamily::Constant) return {{KernelSpec::constant(), KernelSpec::constant()}};
    const auto [mx, my] = median_kernels(d, family);
    std::vector<KernelPair> grid;
    for (int a = -3; a <= 3; ++a) {
        for (int b = -3; b <= 3; ++b) {
            grid.push_back({scaled(family, mx.scale * std::ldexp(1.0, a)),
                            scaled(family, my.scale * std::ldexp(1.0, b))});
        }
    }
    return grid;
}

SelectionResult select_bandwidths(const Dataset& d, const SelectionConfig& cfg) {
    if (!(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0)) {
        throw ConfigError("split_fraction must lie in (0, 1)");
    }
    if (!(cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");

    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Stream stream(cfg.seed, 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[stream.below(i)]);

    const auto n_sel = static_cast<std::size_t>(
        std::llround(cfg.split_fraction * static_cast<double>(n)));
    std::vector<std::size_t> sel(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(
                                                                    std::min(n_sel, n)));
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(std::min(n_sel, n)),
                                  order.end());
    std::sort(sel.begin(), sel.end());
    std::sort(rest.begin(), rest.end());

    SelectionResult r;
    r.selection_subset = d.subset(sel);
    r.test_subset = d.subset(rest);
    r.selection_events = r.selection_subset.event_count();
    r.test_events = r.test_subset.event_count();
    if (r.selection_subset.size() < 2) throw FeasibilityError("selection split has < 2 samples");
    if (r.selection_events == 0) throw FeasibilityError("selection split has no events");
    if (r.test_subset.size() < 2) throw FeasibilityError("held-out split has < 2 samples");

    const Dataset& s = r.selection_subset;
    r.grid = cfg.grid.empty() ? default_grid(s, cfg.family) : cfg.grid;

    const double ns = static_cast<double>(s.size());
    const Matrix B = risk_chain_matrix(s);
    const Vector pi = pi_hat_diagonal(s);

    // g depends on the entry kernel only; reuse it across time kernels.
    std::vector<std::pair<KernelSpec, Matrix>> g_cache;
    r.proxy_values.reserve(r.grid.size());
    for (const auto& [kx, ky] : r.grid) {
        auto it = std::find_if(g_cache.begin(), g_cache.end(),
                               [&](const auto& e) { return e.first == kx; });
        if (it == g_cache.end()) {
            g_cache.emplace_back(kx, g_matrix(gram_matrix(kx, s.entries()), B, pi));
            it = std::prev(g_cache.end());
        }
        const Matrix J = event_masked_gram(s, ky).cwiseProduct(it->second);
        const double psi2 = J.sum() / (ns * ns);
        r.proxy_values.push_back(psi2 / (std::sqrt(variance_h1(J)) + cfg.lambda));
    }

    r.chosen_index = 0;
    for (std::size_t c = 1; c < r.proxy_values.size(); ++c) {
        if (r.proxy_values[c] > r.proxy_values[r.chosen_index]) r.chosen_index = c;
    }
    r.chosen = r.grid[r.chosen_index];
    return r;
}

SelectionResult select_or_fallback(const Dataset& d, const SelectionConfig& cfg) {
    try {
        return select_bandwidths(d, cfg);
    } catch (const FeasibilityError&) {
        SelectionResult r;
        r.fallback = true;
        r.chosen = median_kernels(d, cfg.family);
        r.grid = {r.chosen};
        r.test_subset = d;
        r.test_events = d.event_count();
        return r;
    }
}

}  // namespace kqic
