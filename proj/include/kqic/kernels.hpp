#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

namespace kqic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelFamily { Gaussian, IMQ, Constant };

/// Scalar kernel on time values.
///   Gaussian: exp(-(a-b)^2 / (2 scale^2))
///   IMQ:      (scale^2 + (a-b)^2)^(-1/2)
///   Constant: 1
/// `scale` must be positive for Gaussian and IMQ and is ignored for Constant.
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double scale = 1.0;

    static KernelSpec gaussian(double sigma) { return {KernelFamily::Gaussian, sigma}; }
    static KernelSpec imq(double c) { return {KernelFamily::IMQ, c}; }
    static KernelSpec constant() { return {KernelFamily::Constant, 1.0}; }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Throws ArgumentError when scale is not a positive finite number.
void validate(const KernelSpec& spec);

double eval_kernel(const KernelSpec& spec, double a, double b);

// n x n symmetric Gram matrix over `values`.
Matrix gram_matrix(const KernelSpec& spec, std::span<const double> values);

/// Lower median of the n(n-1)/2 pairwise absolute differences. Throws
/// FeasibilityError when every value is identical (degenerate scale).
double median_heuristic(std::span<const double> values);

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

}  // namespace kqic
