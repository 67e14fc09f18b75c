#pragma once

#include <cstdint>

#include "kqic/data_model.hpp"
#include "kqic/kernels.hpp"

namespace kqic {

/// Fraction of subjects with entry <= x and observed time >= y; the
/// empirical risk-set proportion at (x, y).
double pi_hat(const Dataset& dataset, double x, double y);

/// Building blocks of the censored statistic for a dataset of size n.
///   K        Gram matrix of the entry kernel over entry times
///   Ltilde   event_i * event_k * L(T_i, T_k)
///   B        1{X_k <= X_i < T_k <= T_i} / n, row i, column k
///   pi_diag  pi_hat(X_i, T_i)
struct StatisticMatrices {
    Matrix K;
    Matrix Ltilde;
    Matrix B;
    Vector pi_diag;
};

StatisticMatrices build_matrices(const Dataset& dataset, const KernelSpec& kx,
                                 const KernelSpec& ky);

/// 1{X_k <= X_i < T_k <= T_i} / n as a dense matrix.
Matrix risk_chain_matrix(const Dataset& dataset);
Vector pi_hat_diagonal(const Dataset& dataset);

/// The squared norm of the censored KQIC contrast:
/// (1/n^2) trace(K pi Lt pi - 2 K pi Lt B^T + K B Lt B^T).
/// Uncensored data gives the uncensored statistic (Lt = L, B = A).
double kqic_statistic(const Dataset& dataset, const KernelSpec& kx, const KernelSpec& ky);

/// Same quantity evaluated by explicit index sums (no matrix products) in
/// O(n^4). Independent cross-check; refuses n above kOracleMaxSize.
double kqic_statistic_oracle(const Dataset& dataset, const KernelSpec& kx,
                             const KernelSpec& ky);
inline constexpr std::size_t kOracleMaxSize = 200;

/// V-statistic matrix whose entries sum to the statistic; the wild
/// bootstrap replicate for weights W is W^T M W.
struct BootstrapMatrix {
    Matrix M;
    // 1^T M 1, evaluated exactly like a replicate with all-ones weights.
    double total() const;
};

BootstrapMatrix build_M(const Dataset& dataset, const KernelSpec& kx, const KernelSpec& ky);
BootstrapMatrix build_M(const StatisticMatrices& mats);

/// Signed contrast with omega == 1 on uncensored data, times n^2; equals
/// -kendall_ka for distinct times.
double constant_contrast_scaled(const Dataset& dataset);

/// Sum over comparable pairs i<k (max entry <= min observed) of
/// sign((X_i - X_k)(T_i - T_k)). Requires every sample to be an event.
std::int64_t kendall_ka(const Dataset& dataset);

}  // namespace kqic
