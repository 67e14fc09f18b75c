#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kqic/data_model.hpp"
#include "kqic/kernels.hpp"

namespace kqic {

using KernelPair = std::pair<KernelSpec, KernelSpec>;

// Bandwidth selection by maximising stat / (sd_H1 + lambda) on a random
// split of the data. An empty grid means "default grid for `family`",
// built from the selection split only.
struct SelectionConfig {
    std::vector<KernelPair> grid;
    KernelFamily family = KernelFamily::Gaussian;
    double split_fraction = 0.2;
    double lambda = 0.01;
    std::uint64_t seed = 0;
};

struct SelectionResult {
    KernelPair chosen;
    std::size_t chosen_index = 0;
    std::vector<KernelPair> grid;
    std::vector<double> proxy_values;
    Dataset selection_subset;
    Dataset test_subset;
    std::size_t selection_events = 0;
    std::size_t test_events = 0;
    // Set when the split was degenerate and the median heuristic on the full
    // dataset was used instead; test_subset is then the full dataset.
    bool fallback = false;
};

/// J(i, j) = event_i event_j L(T_i, T_j) g(i, j); (1/n^2) sum J is the statistic.
Matrix jn_matrix(const Dataset& dataset, const KernelSpec& kx, const KernelSpec& ky);

/// Plug-in variance of the statistic under the alternative from a J matrix;
/// clamped at zero.
double variance_h1(const Matrix& jn);

/// Median heuristic times 2^k, k = -3..3, for the entry and time kernels
/// independently (49 pairs, entry kernel varying slowest).
std::vector<KernelPair> default_grid(const Dataset& dataset, KernelFamily family);

/// Throws FeasibilityError when the selection split has fewer than two
/// samples or no events, or when the held-out part has fewer than two.
SelectionResult select_bandwidths(const Dataset& dataset, const SelectionConfig& config);

/// select_bandwidths, falling back to median-heuristic kernels on the full
/// dataset when the split is degenerate.
SelectionResult select_or_fallback(const Dataset& dataset, const SelectionConfig& config);

/// Median-heuristic kernels of the given family (entry and time kernels).
KernelPair median_kernels(const Dataset& dataset, KernelFamily family);

}  // namespace kqic
