#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "kqic/baselines.hpp"
#include "kqic/errors.hpp"
#include "kqic/simgen.hpp"
#include "kqic/statistic.hpp"
#include "test_support.hpp"

using namespace kqic;

TEST_CASE("Kaplan-Meier", "[baselines]") {
    const std::vector<double> t = {1, 2, 3};
    const std::vector<unsigned char> e = {1, 1, 0};
    const auto s = kaplan_meier(t, e);
    CHECK(s.at(0.5) == 1.0);
    CHECK(s.at(1.0) == Catch::Approx(2.0 / 3.0));
    CHECK(s.left_limit(1.0) == 1.0);
    CHECK(s.at(2.0) == Catch::Approx(1.0 / 3.0));
    CHECK(s.at(100.0) == Catch::Approx(1.0 / 3.0));

    const std::vector<unsigned char> none = {0, 0, 0};
    CHECK(kaplan_meier(t, none).at(10.0) == 1.0);

    const std::vector<double> t1 = {1};
    const std::vector<unsigned char> e1 = {1};
    CHECK(kaplan_meier(t1, e1).at(1.0) == 0.0);
    CHECK(kaplan_meier(t1, e1).left_limit(1.0) == 1.0);

    // Uncensored: empirical survival function.
    const std::vector<double> t4 = {2, 1, 4, 3};
    const std::vector<unsigned char> e4 = {1, 1, 1, 1};
    CHECK(kaplan_meier(t4, e4).at(2.5) == Catch::Approx(0.5));

    CHECK_THROWS_AS(kaplan_meier(std::vector<double>{}, std::vector<unsigned char>{}),
                    ArgumentError);
}

TEST_CASE("weighted log-rank with risk-set weight", "[baselines]") {
    CHECK(wlr_statistic(testing::d3(), risk_weight(testing::d3())) == -3.0);
    CHECK(wlr_statistic(testing::e6(), risk_weight(testing::e6())) == 1.0);
    std::vector<Sample> censored = testing::d3().samples();
    for (auto& s : censored) s.event = false;
    const Dataset c(censored);
    CHECK(wlr_statistic(c, risk_weight(c)) == 0.0);

    for (const auto& d : {testing::d3(), testing::d3c(), testing::e6()}) {
        const double nn = static_cast<double>(d.size() * d.size());
        const double lw = wlr_statistic(d, risk_weight(d)) / nn;
        const auto one = KernelSpec::constant();
        CHECK(std::abs(lw * lw - kqic_statistic(d, one, one)) < 1e-12);
    }
}

TEST_CASE("censoring-adjusted weight", "[baselines]") {
    const Dataset d = testing::d3();
    const ScWeight w(d);
    CHECK(w(2, 5) == Catch::Approx(pi_hat(d, 2, 5)));
    CHECK(w(3, 4) == Catch::Approx(1.0));

    // Residual times all equal 3; the censoring survival drops to 2/3 at 3.
    const ScWeight wc(testing::d3c());
    CHECK(wc.censoring_survival().at(3.0) == Catch::Approx(2.0 / 3.0));
    CHECK(wc(3, 4) == Catch::Approx(1.0));
    CHECK(wc(2, 5) == Catch::Approx(1.0 / 3.0));
    CHECK(wc.skipped_terms() == 0);
}

TEST_CASE("residuals sum to the statistic", "[baselines]") {
    const Dataset d = testing::e6();
    const ScWeight w(d);
    const auto res = wlr_residuals(d, std::cref(w));
    double sum = 0.0;
    for (double r : res) sum += r;
    CHECK(sum == Catch::Approx(wlr_statistic(d, std::cref(w))));
    CHECK(wlr_test(d, WlrVariant::ScWeight, 50, 0.05, 1).statistic == Catch::Approx(sum));
}

TEST_CASE("WLR test variants", "[baselines]") {
    const Dataset d = testing::e6();
    const auto r = wlr_test(d, WlrVariant::RiskWeight, 99, 0.05, 4);
    CHECK(r.method == BaselineMethod::WLR);
    CHECK(r.calibration == Calibration::KqicEquivalent);
    CHECK(r.statistic == Catch::Approx(1.0 / 1296.0));
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value <= 1.0);
    const auto sc = wlr_test(d, WlrVariant::ScWeight, 99, 0.05, 4);
    CHECK(sc.method == BaselineMethod::WLR_SC);
    CHECK(sc.calibration == Calibration::WildMultiplier);
    CHECK(sc.p_value == wlr_test(d, WlrVariant::ScWeight, 99, 0.05, 4).p_value);
}

TEST_CASE("conditional Kendall's tau", "[baselines]") {
    const auto s = mb_statistic(testing::d3());
    CHECK(s.tau_sum == 3.0);
    CHECK(s.comparable_pairs == 3);
    const auto e = mb_statistic(testing::e6());
    CHECK(e.tau_sum == -1.0);
    CHECK(e.comparable_pairs == 5);

    const Dataset none = testing::make({{0, 1, true}, {2, 3, true}});
    const auto r = mb_test(none, 0.05);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK_FALSE(r.diagnostic.empty());
    CHECK(mb_test(testing::e6(), 0.05).calibration == Calibration::NormalJackknife);
}

TEST_CASE("two-sample log-rank", "[baselines]") {
    const Dataset a = testing::make({{0, 1, true}});
    const Dataset b = testing::make({{0, 2, true}});
    const auto r = two_sample_logrank(a, b);
    CHECK(r.U == Catch::Approx(0.5));
    CHECK(r.V == Catch::Approx(0.25));
    CHECK(r.Z == Catch::Approx(1.0));
    CHECK(r.p_value == Catch::Approx(0.31731050786291415));

    const auto swapped = two_sample_logrank(b, a);
    CHECK(swapped.U == Catch::Approx(-0.5));
    CHECK(swapped.p_value == Catch::Approx(r.p_value));

    const Dataset mirror = testing::make({{0, 1, true}, {0.5, 3, false}});
    CHECK(two_sample_logrank(mirror, mirror).U == 0.0);

    const Dataset early = testing::make({{0, 1, true}});
    const Dataset late = testing::make({{2, 3, true}});
    CHECK(two_sample_logrank(early, late).p_value == 1.0);
    CHECK_THROWS_AS(two_sample_logrank(Dataset(), late), ArgumentError);
}

TEST_CASE("split log-rank engine matches the reference", "[baselines]") {
    GeneratorModel m;
    m.kind = ModelKind::Monotone;
    m.dependence = 0.4;
    m.censor_target = 0.4;
    const Dataset d = gen_dataset(m, 40, 3);
    const SplitLogrank engine(d);
    Stream s(1, 0);
    for (int k = 0; k < 30; ++k) {
        std::vector<unsigned char> mask(d.size());
        std::vector<std::size_t> ia, ib;
        for (std::size_t i = 0; i < d.size(); ++i) {
            mask[i] = s.coin() ? 1 : 0;
            (mask[i] ? ia : ib).push_back(i);
        }
        if (ia.empty() || ib.empty()) continue;
        const auto fast = engine.compare(mask);
        const auto ref = two_sample_logrank(d.subset(ia), d.subset(ib));
        CHECK(fast.U == Catch::Approx(ref.U).margin(1e-12));
        CHECK(fast.V == Catch::Approx(ref.V).margin(1e-12));
    }
}

TEST_CASE("truncation-respecting permutations", "[baselines]") {
    const Dataset d3 = testing::d3();
    std::map<std::vector<double>, int> seen;
    for (std::uint64_t b = 0; b < 6000; ++b) {
        const Dataset p = truncation_permutation(d3, 1, b);
        std::vector<double> x(p.entries().begin(), p.entries().end());
        ++seen[x];
    }
    CHECK(seen.size() == 6);
    for (const auto& [x, c] : seen) CHECK(std::abs(c - 1000) < 150);

    // Chain dataset: entry for T=1.5 must be 0 or 1, for T=2.5 anything below 2.5.
    const Dataset chain = testing::make({{0, 1.5, true}, {1, 2.5, true}, {2, 3.5, true}});
    for (auto scheme : {PermutationScheme::Sequential, PermutationScheme::Rejection}) {
        std::map<std::vector<double>, int> valid;
        for (std::uint64_t b = 0; b < 4000; ++b) {
            const Dataset p = truncation_permutation(chain, 2, b, scheme);
            std::vector<double> x(p.entries().begin(), p.entries().end());
            std::vector<double> sorted = x;
            std::sort(sorted.begin(), sorted.end());
            REQUIRE(sorted == std::vector<double>{0, 1, 2});
            ++valid[x];
        }
        CHECK(valid.size() == 4);
        CHECK(valid.count({2, 1, 0}) == 0);
        for (const auto& [x, c] : valid) CHECK(std::abs(c - 1000) < 150);
    }

    CHECK(truncation_permutation(d3, 5, 5) == truncation_permutation(d3, 5, 5));
}

TEST_CASE("rejection sampling gives up on infeasible truncation", "[baselines]") {
    // Only the identity is valid among 12! permutations.
    std::vector<Sample> v;
    for (int i = 0; i < 12; ++i) v.push_back({double(i), i + 0.5, true});
    const Dataset tight(v);
    CHECK_THROWS_AS(truncation_permutation(tight, 1, 0, PermutationScheme::Rejection),
                    FeasibilityError);
    CHECK(truncation_permutation(tight, 1, 0) == tight);
}

namespace {

// Minimum log-rank p-value over every cut X <= X_m by brute force.
double brute_force_minp1(const Dataset& d, std::size_t E) {
    double best = 1.0;
    for (std::size_t m = 0; m < d.size(); ++m) {
        std::vector<std::size_t> a, b;
        std::size_t ea = 0, eb = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d.entry(i) <= d.entry(m)) {
                a.push_back(i);
                ea += d.event(i);
            } else {
                b.push_back(i);
                eb += d.event(i);
            }
        }
        if (ea < E || eb < E) continue;
        best = std::min(best, two_sample_logrank(d.subset(a), d.subset(b)).p_value);
    }
    return best;
}

}  // namespace

TEST_CASE("MinP1 cut enumeration", "[baselines]") {
    // Early entrants live long, late entrants die early.
    const Dataset d = testing::make({{0.1, 9.0, true},
                                     {0.2, 8.0, true},
                                     {0.3, 8.5, true},
                                     {3.0, 3.5, true},
                                     {3.1, 3.6, true},
                                     {3.2, 3.4, true}});
    const double minp = minp_statistic(d, MinpVariant::MinP1, 1);
    CHECK(minp == Catch::Approx(brute_force_minp1(d, 1)));
    // The separating cut (after the third entrant) attains the minimum.
    const std::vector<std::size_t> a = {0, 1, 2}, b = {3, 4, 5};
    CHECK(minp == Catch::Approx(two_sample_logrank(d.subset(a), d.subset(b)).p_value));

    GeneratorModel m;
    m.kind = ModelKind::Monotone;
    m.dependence = -0.4;
    m.censor_target = 0.5;
    const Dataset big = gen_dataset(m, 60, 9);
    CHECK(minp_statistic(big, MinpVariant::MinP1, 5) == Catch::Approx(brute_force_minp1(big, 5)));
}

TEST_CASE("MinP tests", "[baselines]") {
    const Dataset few = testing::e6();  // 4 events < 2E
    for (auto v : {MinpVariant::MinP1, MinpVariant::MinP2}) {
        const auto r = minp_test(few, v, 5, 50, 0.05, 1);
        CHECK(r.p_value == 1.0);
        CHECK_FALSE(r.reject);
        CHECK_FALSE(r.diagnostic.empty());
    }

    GeneratorModel m;
    m.kind = ModelKind::Monotone;
    m.dependence = 0.0;
    m.censor_target = 0.3;
    const Dataset d = gen_dataset(m, 80, 4);
    for (auto v : {MinpVariant::MinP1, MinpVariant::MinP2}) {
        const auto r = minp_test(d, v, 5, 99, 0.05, 7);
        CHECK(r.statistic > 0.0);
        CHECK(r.statistic <= 1.0);
        CHECK(r.p_value >= 1.0 / 100.0);
        CHECK(r.p_value <= 1.0);
        CHECK(r.calibration == Calibration::Permutation);
        CHECK(r.p_value == minp_test(d, v, 5, 99, 0.05, 7).p_value);
    }
    CHECK_THROWS_AS(minp_test(d, MinpVariant::MinP1, 0, 10, 0.05, 1), ArgumentError);
}
