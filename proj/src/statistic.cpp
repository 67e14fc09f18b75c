#include "kqic/statistic.hpp"

#include <algorithm>
#include <vector>

#include "kqic/errors.hpp"

namespace kqic {

namespace {

// X_k <= X_i < T_k <= T_i: subject k's window opens no later than i's entry
// and closes inside i's window.
inline bool chain(double xk, double xi, double tk, double ti) {
    return xk <= xi && xi < tk && tk <= ti;
}

void require_nonempty(const Dataset& d) {
    if (d.empty()) throw ArgumentError("dataset is empty");
}

}  // namespace

double pi_hat(const Dataset& d, double x, double y) {
    require_nonempty(d);
    std::size_t count = 0;
    for (std::size_t m = 0; m < d.size(); ++m) {
        if (d.entry(m) <= x && d.observed(m) >= y) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(d.size());
}

Vector pi_hat_diagonal(const Dataset& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Vector pi(n);
    for (Eigen::Index i = 0; i < n; ++i) pi(i) = pi_hat(d, d.entry(i), d.observed(i));
    return pi;
}

Matrix risk_chain_matrix(const Dataset& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix B = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (chain(d.entry(k), d.entry(i), d.observed(k), d.observed(i))) B(i, k) = inv_n;
        }
    }
    return B;
}

StatisticMatrices build_matrices(const Dataset& d, const KernelSpec& kx, const KernelSpec& ky) {
    require_nonempty(d);
    StatisticMatrices m;
    m.K = gram_matrix(kx, d.entries());
    m.Ltilde = gram_matrix(ky, d.observed_times());
    const auto n = static_cast<Eigen::Index>(d.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!d.event(i)) {
            m.Ltilde.row(i).setZero();
            m.Ltilde.col(i).setZero();
        }
    }
    m.B = risk_chain_matrix(d);
    m.pi_diag = pi_hat_diagonal(d);
    return m;
}

BootstrapMatrix build_M(const StatisticMatrices& mats) {
    const Eigen::Index n = mats.K.rows();
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));

    // Only event rows/columns of Ltilde are nonzero; work on that block.
    std::vector<Eigen::Index> ev;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (mats.Ltilde.row(i).cwiseAbs().maxCoeff() > 0.0) ev.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(ev.size());

    Matrix L_ee(m, m);
    Matrix B_ne(n, m);
    Vector pi_e(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        pi_e(a) = mats.pi_diag(ev[a]);
        B_ne.col(a) = mats.B.col(ev[a]);
        for (Eigen::Index b = 0; b < m; ++b) L_ee(a, b) = mats.Ltilde(ev[a], ev[b]);
    }

    // G = Ltilde B^T restricted to event rows (m x n).
    const Matrix G = L_ee * B_ne.transpose();
    // B Ltilde B^T
    Matrix inner = B_ne * G;
    for (Eigen::Index a = 0; a < m; ++a) {
        const Eigen::Index i = ev[a];
        // -2 pi Ltilde B^T
        inner.row(i) -= 2.0 * pi_e(a) * G.row(a);
        // pi Ltilde pi
        for (Eigen::Index b = 0; b < m; ++b) {
            inner(i, ev[b]) += pi_e(a) * L_ee(a, b) * pi_e(b);
        }
    }

    BootstrapMatrix out;
    out.M = scale * mats.K.cwiseProduct(inner);
    return out;
}

double BootstrapMatrix::total() const {
    const Vector ones = Vector::Ones(M.rows());
    return ones.dot(M * ones);
}

BootstrapMatrix build_M(const Dataset& d, const KernelSpec& kx, const KernelSpec& ky) {
    return build_M(build_matrices(d, kx, ky));
}

double kqic_statistic(const Dataset& d, const KernelSpec& kx, const KernelSpec& ky) {
    return build_M(d, kx, ky).total();
}

double kqic_statistic_oracle(const Dataset& d, const KernelSpec& kx, const KernelSpec& ky) {
    require_nonempty(d);
    validate(kx);
    validate(ky);
    const std::size_t n = d.size();
    if (n > kOracleMaxSize) {
        throw ArgumentError("oracle limited to n <= " + std::to_string(kOracleMaxSize));
    }
    const double nd = static_cast<double>(n);

    std::vector<double> pi(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t m = 0; m < n; ++m) {
            if (d.entry(m) <= d.entry(i) && d.observed(m) >= d.observed(i)) ++c;
        }
        pi[i] = static_cast<double>(c) / nd;
    }
    auto Kf = [&](std::size_t i, std::size_t j) {
        return eval_kernel(kx, d.entry(i), d.entry(j));
    };
    auto Lt = [&](std::size_t i, std::size_t j) {
        return (d.event(i) && d.event(j)) ? eval_kernel(ky, d.observed(i), d.observed(j)) : 0.0;
    };
    // Pairs (i, k) with the chain indicator set, grouped by i.
    std::vector<std::vector<std::size_t>> links(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (chain(d.entry(k), d.entry(i), d.observed(k), d.observed(i))) links[i].push_back(k);
        }
    }

    double t1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) t1 += Kf(i, j) * Lt(i, j) * pi[i] * pi[j];
    }

    double t2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double kij = Kf(i, j);
            for (std::size_t l : links[j]) t2 += kij * Lt(i, l) * pi[i] / nd;
        }
    }

    double t3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double kij = Kf(i, j);
            for (std::size_t k : links[i]) {
                for (std::size_t l : links[j]) t3 += kij * Lt(k, l) / (nd * nd);
            }
        }
    }
    return (t1 - 2.0 * t2 + t3) / (nd * nd);
}

double constant_contrast_scaled(const Dataset& d) {
    const std::size_t n = d.size();
    long long acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d.event(i)) {
            for (std::size_t m = 0; m < n; ++m) {
                if (d.entry(m) <= d.entry(i) && d.observed(m) >= d.observed(i)) ++acc;
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (d.event(k) && chain(d.entry(k), d.entry(i), d.observed(k), d.observed(i))) --acc;
        }
    }
    return static_cast<double>(acc);
}

std::int64_t kendall_ka(const Dataset& d) {
    if (d.event_count() != d.size()) {
        throw ArgumentError("kendall_ka requires uncensored data; use mb_test for censored data");
    }
    std::int64_t ka = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t k = i + 1; k < d.size(); ++k) {
            const double hi_entry = std::max(d.entry(i), d.entry(k));
            const double lo_time = std::min(d.observed(i), d.observed(k));
            if (hi_entry > lo_time) continue;
            const double s = (d.entry(i) - d.entry(k)) * (d.observed(i) - d.observed(k));
            ka += (s > 0.0) - (s < 0.0);
        }
    }
    return ka;
}

}  // namespace kqic
