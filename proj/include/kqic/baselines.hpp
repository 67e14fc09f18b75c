#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kqic/data_model.hpp"

namespace kqic {

/// Right-continuous step survival function starting at 1.
struct StepSurvivalFunction {
    std::vector<double> jump_times;  // ascending
    std::vector<double> values;      // value on [jump_times[j], next jump)

    double at(double t) const;
    double left_limit(double t) const;
};

/// Product-limit estimator; at tied times events are processed before
/// censorings. Throws ArgumentError on empty input.
StepSurvivalFunction kaplan_meier(std::span<const double> times,
                                  std::span<const unsigned char> events);

using WeightFunction = std::function<double(double x, double y)>;

/// Risk-set count R(x, y) = #{m : X_m <= x, T_m >= y}.
WeightFunction risk_weight(const Dataset& dataset);

/// Weight W(x,y) = (1/n) sum_m 1{X_m <= x, T_m >= y} / S_C((y - X_m)-), with
/// S_C the Kaplan-Meier estimator of the residual censoring time. Terms with
/// a zero left limit are skipped and counted.
class ScWeight {
public:
    explicit ScWeight(const Dataset& dataset);
    double operator()(double x, double y) const;
    std::size_t skipped_terms() const { return *skipped_; }
    const StepSurvivalFunction& censoring_survival() const { return km_; }

private:
    std::vector<double> entry_, observed_;
    StepSurvivalFunction km_;
    std::shared_ptr<std::size_t> skipped_;
};

/// Discrete weighted log-rank statistic
///   sum_i d_i W(X_i,T_i) - sum_{i,k} d_k W(X_i,T_k) 1{X_k<=X_i<T_k<=T_i} / R(X_i,T_k).
double wlr_statistic(const Dataset& dataset, const WeightFunction& weight);

/// Per-subject martingale residuals whose sum is wlr_statistic:
///   d_i W(X_i,T_i) - sum_k d_k W(X_i,T_k) 1{X_k<=X_i<T_k<=T_i} / R(X_i,T_k).
std::vector<double> wlr_residuals(const Dataset& dataset, const WeightFunction& weight);

enum class BaselineMethod { WLR, WLR_SC, MB, MinP1, MinP2 };
enum class Calibration { WildMultiplier, Permutation, KqicEquivalent, NormalJackknife };

struct BaselineOutcome {
    BaselineMethod method = BaselineMethod::WLR;
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    Calibration calibration = Calibration::KqicEquivalent;
    std::uint64_t seed = 0;
    std::string diagnostic;
};

std::string to_string(BaselineMethod m);
std::string to_string(Calibration c);

enum class WlrVariant { RiskWeight, ScWeight };

/// RiskWeight: statistic (L_W / n^2)^2 calibrated by the constant-kernel KQIC
/// wild bootstrap. ScWeight: L_W with the ScWeight weight, two-sided
/// Rademacher multiplier bootstrap on the residuals.
BaselineOutcome wlr_test(const Dataset& dataset, WlrVariant variant, std::size_t draws,
                         double alpha, std::uint64_t seed);

/// Conditional Kendall's tau over orderable comparable pairs.
struct MbStatistic {
    double tau_sum = 0.0;            // sum of signs over comparable pairs
    std::size_t comparable_pairs = 0;
};
MbStatistic mb_statistic(const Dataset& dataset);

/// Two-sided normal test on tau_sum / comparable_pairs with a delete-one
/// jackknife variance. `seed` and `draws` are recorded only.
BaselineOutcome mb_test(const Dataset& dataset, double alpha, std::uint64_t seed = 0,
                        std::size_t draws = 0);

struct LogrankResult {
    double U = 0.0;  // observed minus expected events in group A
    double V = 0.0;  // hypergeometric variance
    double Z = 0.0;
    double p_value = 1.0;
};

/// Log-rank test with left-truncated risk sets (i at risk at t iff
/// X_i <= t <= T_i). Zero variance gives p = 1.
LogrankResult two_sample_logrank(const Dataset& group_a, const Dataset& group_b);

/// Log-rank comparisons of many two-group splits of one dataset, O(n) each.
class SplitLogrank {
public:
    explicit SplitLogrank(const Dataset& dataset);
    LogrankResult compare(std::span<const unsigned char> in_group_a) const;

private:
    std::size_t n_ = 0;
    std::vector<double> event_times_;
    std::vector<long> at_risk_;          // total at risk per event time
    std::vector<long> deaths_;           // events per event time
    std::vector<std::size_t> first_, last_;  // at-risk index range per subject (first > last: never)
    std::vector<long> event_index_;      // event time index of subject, -1 if censored
    mutable std::vector<long> diff_;
};

enum class PermutationScheme {
    // Uniform over valid permutations, drawn subject by subject in order of
    // observed time. Never fails.
    Sequential,
    // Whole-permutation rejection sampling; fails after 10000 rejections.
    Rejection,
};

inline constexpr std::size_t kMaxPermutationRejections = 10000;

/// Reassigns entry times to the fixed (observed, event) pairs so that every
/// pair still satisfies entry < observed. Deterministic in (seed, stream_id).
Dataset truncation_permutation(const Dataset& dataset, std::uint64_t seed,
                               std::uint64_t stream_id,
                               PermutationScheme scheme = PermutationScheme::Sequential);

enum class MinpVariant { MinP1, MinP2 };

inline constexpr std::size_t kDefaultMinEvents = 5;
inline constexpr std::size_t kDefaultPermutations = 500;

/// Smallest admissible split p-value (1 when nothing is admissible).
double minp_statistic(const Dataset& dataset, MinpVariant variant, std::size_t min_events);

BaselineOutcome minp_test(const Dataset& dataset, MinpVariant variant, std::size_t min_events,
                          std::size_t permutations, double alpha, std::uint64_t seed,
                          PermutationScheme scheme = PermutationScheme::Sequential);

}  // namespace kqic
