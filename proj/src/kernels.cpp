#include "kqic/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kqic/errors.hpp"

namespace kqic {

void validate(const KernelSpec& spec) {
    if (spec.family == KernelFamily::Constant) return;
    if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
        throw ArgumentError("kernel scale must be positive and finite");
    }
}

double eval_kernel(const KernelSpec& spec, double a, double b) {
    const double d = a - b;
    switch (spec.family) {
        case KernelFamily::Gaussian:
            return std::exp(-(d * d) / (2.0 * spec.scale * spec.scale));
        case KernelFamily::IMQ:
            return 1.0 / std::sqrt(spec.scale * spec.scale + d * d);
        case KernelFamily::Constant:
            return 1.0;
    }
    return 1.0;
}

Matrix gram_matrix(const KernelSpec& spec, std::span<const double> values) {
    validate(spec);
    const auto n = static_cast<Eigen::Index>(values.size());
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i, i) = eval_kernel(spec, values[i], values[i]);
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const double v = eval_kernel(spec, values[i], values[k]);
            g(i, k) = v;
            g(k, i) = v;
        }
    }
    return g;
}

double median_heuristic(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw ArgumentError("median heuristic needs at least two values");
    std::vector<double> dist;
    dist.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) dist.push_back(std::abs(values[i] - values[j]));
    }
    const std::size_t mid = (dist.size() - 1) / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
    const double med = dist[mid];
    if (med > 0.0) return med;
    // Lower median can be 0 even when values differ (mostly ties); fall back
    // to the smallest positive distance before declaring the scale degenerate.
    double smallest = 0.0;
    for (double d : dist) {
        if (d > 0.0 && (smallest == 0.0 || d < smallest)) smallest = d;
    }
    if (smallest == 0.0) throw FeasibilityError("degenerate scale: all values identical");
    return smallest;
}

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Gaussian: return "gauss";
        case KernelFamily::IMQ: return "imq";
        case KernelFamily::Constant: return "const";
    }
    return "gauss";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "gauss" || name == "gaussian") return KernelFamily::Gaussian;
    if (name == "imq") return KernelFamily::IMQ;
    if (name == "const" || name == "constant") return KernelFamily::Constant;
    throw ConfigError("unknown kernel family '" + name + "'");
}

}  // namespace kqic
