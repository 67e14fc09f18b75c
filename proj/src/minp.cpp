#include <algorithm>
#include <cmath>
#include <numeric>

#include "kqic/baselines.hpp"
#include "kqic/errors.hpp"
#include "kqic/rng.hpp"

namespace kqic {

namespace {

Dataset sequential_permutation(const Dataset& d, Stream& stream) {
    const std::size_t n = d.size();
    std::vector<std::size_t> by_time(n);
    std::iota(by_time.begin(), by_time.end(), std::size_t{0});
    std::stable_sort(by_time.begin(), by_time.end(),
                     [&](auto a, auto b) { return d.observed(a) < d.observed(b); });
    std::vector<double> xs(d.entries().begin(), d.entries().end());
    std::sort(xs.begin(), xs.end());

    std::vector<double> pool;
    pool.reserve(n);
    std::vector<double> assigned(n);
    std::size_t next = 0;
    for (std::size_t j : by_time) {
        while (next < n && xs[next] < d.observed(j)) pool.push_back(xs[next++]);
        if (pool.empty()) throw FeasibilityError("no valid entry time left for permutation");
        const std::size_t pick = static_cast<std::size_t>(stream.below(pool.size()));
        assigned[j] = pool[pick];
        pool[pick] = pool.back();
        pool.pop_back();
    }
    return d.with_entries(assigned);
}

Dataset rejection_permutation(const Dataset& d, Stream& stream) {
    const std::size_t n = d.size();
    std::vector<double> xs(d.entries().begin(), d.entries().end());
    for (std::size_t attempt = 0; attempt < kMaxPermutationRejections; ++attempt) {
        for (std::size_t i = n; i > 1; --i) std::swap(xs[i - 1], xs[stream.below(i)]);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = xs[i] < d.observed(i);
        if (ok) return d.with_entries(xs);
    }
    throw FeasibilityError(
        "10000 consecutive permutations violated entry < observed; truncation is too severe "
        "for permutation calibration");
}

// Each split is a group-A membership mask; inadmissible splits are dropped.
std::vector<std::vector<unsigned char>> minp1_splits(const Dataset& d, std::size_t E) {
    const std::size_t n = d.size();
    std::vector<double> cuts(d.entries().begin(), d.entries().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const std::size_t total = d.event_count();
    std::vector<std::vector<unsigned char>> out;
    for (double c : cuts) {
        std::vector<unsigned char> mask(n);
        std::size_t ev = 0;
        for (std::size_t i = 0; i < n; ++i) {
            mask[i] = d.entry(i) <= c ? 1 : 0;
            ev += (mask[i] && d.event(i)) ? 1 : 0;
        }
        // At least E events on each side of the cut.
        if (ev < E || total - ev < E) continue;
        out.push_back(std::move(mask));
    }
    return out;
}

std::vector<std::vector<unsigned char>> minp2_splits(const Dataset& d, std::size_t E) {
    const std::size_t n = d.size();
    double eps = 0.0;
    bool any = false;
    std::vector<double> dist(n);
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(d.entry(i) - d.entry(m));
        std::sort(dist.begin(), dist.end());
        if (E == 0 || E > n) continue;
        // Smallest observed distance v with #{dist < v} >= E.
        const double sE = dist[E - 1];
        const auto it = std::upper_bound(dist.begin(), dist.end(), sE);
        if (it == dist.end()) continue;
        const auto inside = static_cast<std::size_t>(it - dist.begin());
        if (n - inside < E) continue;
        eps = std::max(eps, *it);
        any = true;
    }
    std::vector<std::vector<unsigned char>> out;
    if (!any) return out;
    for (std::size_t m = 0; m < n; ++m) {
        std::size_t ev = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ev += (d.event(i) && std::abs(d.observed(i) - d.observed(m)) < eps) ? 1 : 0;
        }
        if (ev < E || ev + E > n) continue;
        std::vector<unsigned char> mask(n);
        for (std::size_t i = 0; i < n; ++i) mask[i] = std::abs(d.entry(i) - d.entry(m)) < eps;
        out.push_back(std::move(mask));
    }
    return out;
}

// Returns 1 and sets `admissible` false when no split qualifies.
double minp_impl(const Dataset& d, MinpVariant variant, std::size_t E, bool& admissible) {
    const auto splits = variant == MinpVariant::MinP1 ? minp1_splits(d, E) : minp2_splits(d, E);
    admissible = !splits.empty();
    if (!admissible || d.event_count() == 0) return 1.0;
    const SplitLogrank engine(d);
    double best = 1.0;
    for (const auto& mask : splits) {
        const auto in_a = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
        if (in_a == 0 || in_a == d.size()) continue;
        best = std::min(best, engine.compare(mask).p_value);
    }
    return best;
}

}  // namespace

Dataset truncation_permutation(const Dataset& d, std::uint64_t seed, std::uint64_t stream_id,
                               PermutationScheme scheme) {
    Stream stream(seed, stream_id);
    return scheme == PermutationScheme::Sequential ? sequential_permutation(d, stream)
                                                   : rejection_permutation(d, stream);
}

double minp_statistic(const Dataset& d, MinpVariant variant, std::size_t min_events) {
    if (min_events == 0) throw ArgumentError("min_events must be >= 1");
    bool admissible = false;
    return minp_impl(d, variant, min_events, admissible);
}

BaselineOutcome minp_test(const Dataset& d, MinpVariant variant, std::size_t min_events,
                          std::size_t permutations, double alpha, std::uint64_t seed,
                          PermutationScheme scheme) {
    if (min_events == 0) throw ArgumentError("min_events must be >= 1");
    if (permutations == 0) throw ArgumentError("permutations must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");

    BaselineOutcome out;
    out.method = variant == MinpVariant::MinP1 ? BaselineMethod::MinP1 : BaselineMethod::MinP2;
    out.calibration = Calibration::Permutation;
    out.seed = seed;

    bool admissible = false;
    out.statistic = minp_impl(d, variant, min_events, admissible);
    if (!admissible) {
        out.p_value = 1.0;
        out.diagnostic = "no admissible split";
        return out;
    }

    std::size_t hits = 0;
    for (std::size_t b = 0; b < permutations; ++b) {
        bool unused = false;
        const Dataset perm = truncation_permutation(d, seed, b, scheme);
        if (minp_impl(perm, variant, min_events, unused) <= out.statistic) ++hits;
    }
    out.p_value = (1.0 + static_cast<double>(hits)) / (static_cast<double>(permutations) + 1.0);
    out.reject = out.p_value <= alpha;
    return out;
}

}  // namespace kqic
