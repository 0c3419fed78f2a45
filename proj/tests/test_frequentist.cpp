#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "upsr/errors.hpp"
#include "upsr/estimation.hpp"
#include "upsr/frequentist.hpp"
#include "upsr/random.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace upsr;

namespace {

void check_same(const InferenceResult& a, const InferenceResult& b, double tol) {
    CHECK_THAT(a.statistic, WithinAbs(b.statistic, tol));
    CHECK_THAT(a.p_value, WithinAbs(b.p_value, tol));
    CHECK(a.reject == b.reject);
    REQUIRE(a.threshold.has_value() == b.threshold.has_value());
    if (a.threshold) {
        CHECK_THAT(*a.threshold, WithinAbs(*b.threshold, tol));
    }
    REQUIRE(a.interval.has_value() == b.interval.has_value());
    if (a.interval) {
        CHECK_THAT(a.interval->lo, WithinAbs(b.interval->lo, tol));
        CHECK_THAT(a.interval->hi, WithinAbs(b.interval->hi, tol));
    }
}

} // namespace

TEST_CASE("Sidedness parsing", "[frequentist]") {
    CHECK(parse_sided("upper") == Sided::upper);
    CHECK(parse_sided("greater") == Sided::upper);
    CHECK(parse_sided("lower") == Sided::lower);
    CHECK(parse_sided("two") == Sided::two);
    CHECK(std::string(to_string(Sided::lower)) == "lower");
    CHECK_THROWS_AS(parse_sided("sideways"), DomainError);
}

TEST_CASE("One-sample test at the central-t boundary", "[frequentist]") {
    // t_{0.95, 49} from scipy.stats.t.ppf.
    const double t95 = 1.6765508926168537;
    const std::size_t n = 50;
    const double rootn = std::sqrt(50.0);
    const auto at = one_sample_test({t95 / rootn, n}, 0.0, 0.05, Sided::upper);
    CHECK_THAT(*at.classical_p_value, WithinAbs(0.05, 1e-9));
    CHECK_THAT(at.p_value, WithinAbs(0.05, 5e-3));
    for (double shift : {-0.05, 0.05}) {
        const auto r = one_sample_test({(t95 + shift) / rootn, n}, 0.0, 0.05, Sided::upper);
        CHECK(r.reject == *r.classical_reject);
        CHECK(r.reject == (shift > 0));
    }
}

TEST_CASE("One-sample test p-value near one half when sr equals snr0", "[frequentist]") {
    for (std::size_t n : {30u, 120u, 500u}) {
        for (double z : {-0.2, 0.0, 0.1, 0.3}) {
            const auto r = one_sample_test({z, n}, z, 0.05, Sided::upper);
            CHECK_THAT(r.p_value, WithinAbs(0.5, 0.02));
            CHECK_FALSE(r.reject);
        }
    }
}

TEST_CASE("Upsilon and noncentral t decisions agree away from the threshold", "[frequentist]") {
    int compared = 0;
    for (std::size_t n : {24u, 60u, 250u, 1000u}) {
        for (double zhat = -0.3; zhat <= 0.45; zhat += 0.15) {
            for (double z0 : {-0.1, 0.0, 0.05, 0.1, 0.2}) {
                for (Sided sided : {Sided::upper, Sided::lower}) {
                    const auto r = one_sample_test({zhat, n}, z0, 0.05, sided);
                    ++compared;
                    if (std::abs(*r.classical_p_value - 0.05) < 5e-3) {
                        continue;
                    }
                    CHECK(r.reject == *r.classical_reject);
                    CHECK_THAT(r.p_value, WithinAbs(*r.classical_p_value, 5e-3));
                }
            }
        }
    }
    CHECK(compared >= 200);
}

TEST_CASE("One-sample two-sided test", "[frequentist]") {
    const auto r = one_sample_test({0.05, 100}, 0.0, 0.05, Sided::two);
    REQUIRE(r.interval.has_value());
    CHECK(r.interval->lo < r.statistic);
    CHECK(r.statistic < r.interval->hi);
    CHECK_FALSE(r.reject);
    CHECK_THAT(r.p_value, WithinAbs(*r.classical_p_value, 5e-3));
    const auto far = one_sample_test({0.5, 100}, 0.0, 0.05, Sided::two);
    CHECK(far.reject);
}

TEST_CASE("k-sample test reductions and symmetries", "[frequentist]") {
    SECTION("equal Sharpe ratios and sizes give p = 0.5") {
        const std::vector<SRSummary> s = {{0.17, 80}, {0.17, 80}};
        const auto r = k_sample_test(s, {{1.0, -1.0}, 0.0, 0.05, Sided::upper});
        CHECK_THAT(r.p_value, WithinAbs(0.5, 1e-14));
        CHECK_FALSE(r.reject);
        for (double alpha : {0.01, 0.1, 0.3, 0.49}) {
            CHECK_FALSE(k_sample_test(s, {{1.0, -1.0}, 0.0, alpha, Sided::upper}).reject);
        }
    }
    SECTION("k = 1 matches the one-sample test") {
        for (Sided sided : {Sided::upper, Sided::lower, Sided::two}) {
            const SRSummary s{0.21, 64};
            const auto a = k_sample_test(std::vector<SRSummary>{s}, {{1.0}, 0.05, 0.05, sided});
            const auto b = one_sample_test(s, 0.05, 0.05, sided);
            check_same(a, b, 1e-12);
            CHECK(a.params.coef() == b.params.coef());
            CHECK(a.params.dof() == b.params.dof());
        }
    }
    SECTION("permuting weights with samples") {
        const std::vector<SRSummary> s = {{0.1, 40}, {-0.05, 90}, {0.2, 300}};
        const std::vector<SRSummary> t = {s[2], s[0], s[1]};
        const auto a = k_sample_test(s, {{1.0, -0.5, 2.0}, 0.1, 0.05, Sided::upper});
        const auto b = k_sample_test(t, {{2.0, 1.0, -0.5}, 0.1, 0.05, Sided::upper});
        check_same(a, b, 1e-12);
    }
    SECTION("swapping the two samples complements the one-sided p-value") {
        const std::vector<SRSummary> s = {{0.25, 128}, {0.05, 256}};
        const std::vector<SRSummary> t = {s[1], s[0]};
        const auto a = k_sample_test(s, {{1.0, -1.0}, 0.0, 0.05, Sided::upper});
        const auto b = k_sample_test(t, {{1.0, -1.0}, 0.0, 0.05, Sided::upper});
        CHECK_THAT(a.p_value + b.p_value, WithinAbs(1.0, 2e-3));
    }
    SECTION("invalid hypotheses") {
        const std::vector<SRSummary> s = {{0.1, 40}, {0.2, 50}};
        CHECK_THROWS_AS(k_sample_test(s, {{0.0, 0.0}, 0.0, 0.05, Sided::upper}), DomainError);
        CHECK_THROWS_AS(k_sample_test(s, {{1.0}, 0.0, 0.05, Sided::upper}), DomainError);
        CHECK_THROWS_AS(k_sample_test(s, {{1.0, -1.0}, 0.0, 1.5, Sided::upper}), DomainError);
        CHECK_THROWS_AS(k_sample_test(std::vector<SRSummary>{{0.1, 1}}, {{1.0}, 0.0, 0.05, Sided::upper}),
                        DomainError);
    }
}

TEST_CASE("Test results are invariant to a common scale of returns", "[frequentist][property]") {
    RngStream rng(8);
    std::vector<double> x(70), y(90);
    for (auto& v : x) {
        v = 0.01 + 0.04 * rng.normal();
    }
    for (auto& v : y) {
        v = 0.002 + 0.04 * rng.normal();
    }
    auto run = [&](double c) {
        std::vector<double> xs = x, ys = y;
        for (auto& v : xs) {
            v *= c;
        }
        for (auto& v : ys) {
            v *= c;
        }
        const std::vector<SRSummary> s = {compute_sr({xs, 0.0}), compute_sr({ys, 0.0})};
        return k_sample_test(s, {{1.0, -1.0}, 0.0, 0.05, Sided::two});
    };
    const auto base = run(1.0);
    for (double c : {0.01, 100.0}) {
        check_same(run(c), base, 1e-10);
    }
}

TEST_CASE("Factor k-sample test", "[frequentist]") {
    SECTION("intercept-only summaries reduce to the plain test") {
        const std::vector<SRSummary> s = {{0.12, 60}, {-0.03, 110}};
        const std::vector<FactorSRSummary> f = {{0.12, 60, 1, 1.0 / 60}, {-0.03, 110, 1, 1.0 / 110}};
        for (Sided sided : {Sided::upper, Sided::two}) {
            const LinearHypothesis hyp{{1.0, -1.0}, 0.0, 0.05, sided};
            check_same(factor_k_sample_test(f, hyp), k_sample_test(s, hyp), 1e-12);
        }
    }
    SECTION("January example: quantiles, CDF at zero and the decision") {
        // Gram scalars chosen so the null law has coef (-0.993, -2.175), dof (84, 964).
        const double c = 7.25;
        const double g = 1.0 / (2.0 * c * c);
        const std::vector<FactorSRSummary> f = {{-0.993 / c, 88, 4, g}, {2.175 / c, 968, 4, g}};
        const auto r = factor_k_sample_test(f, {{1.0, -1.0}, 0.0, 0.01, Sided::two}, ApproxOrder{8, 6});
        CHECK_THAT(r.params.coef()[0], WithinAbs(-0.993, 1e-12));
        CHECK_THAT(r.params.coef()[1], WithinAbs(-2.175, 1e-12));
        CHECK(r.params.dof() == std::vector<double>{84.0, 964.0});
        CHECK(r.statistic == 0.0);
        REQUIRE(r.interval.has_value());
        CHECK_THAT(r.interval->lo, WithinAbs(-5.751, 0.02));
        CHECK_THAT(r.interval->hi, WithinAbs(-0.578, 0.02));
        const UpsilonApprox law(r.params, ApproxOrder{8, 6});
        CHECK_THAT(law.cdf(0.0), WithinAbs(0.999, 0.002));
        CHECK(law.cdf(0.0) > 1.0 - 0.01 / 2);
        CHECK(r.reject);
        CHECK(r.p_value < 0.01);
    }
    SECTION("validation") {
        const std::vector<FactorSRSummary> f = {{0.1, 4, 4, 0.1}};
        CHECK_THROWS_AS(factor_k_sample_test(f, {{1.0}, 0.0, 0.05, Sided::upper}), DomainError);
        const std::vector<FactorSRSummary> g = {{0.1, 40, 4, 0.0}};
        CHECK_THROWS_AS(factor_k_sample_test(g, {{1.0}, 0.0, 0.05, Sided::upper}), DomainError);
    }
}

TEST_CASE("Confidence intervals", "[frequentist]") {
    SECTION("zero Sharpe ratio reduces to the normal") {
        const auto ci = sr_confidence_interval({0.0, 100}, 0.05);
        CHECK_THAT(ci.lo, WithinAbs(-0.196, 1e-3));
        CHECK_THAT(ci.hi, WithinAbs(0.196, 1e-3));
        CHECK_THAT(ci.hi, WithinAbs(1.959963984540054 / 10.0, 1e-9));
    }
    SECTION("endpoints strictly increase with the Sharpe ratio") {
        double lo = -1e9, hi = -1e9;
        for (double z = -1.0; z <= 1.0; z += 0.1) {
            const auto ci = sr_confidence_interval({z, 48}, 0.05);
            CHECK(ci.lo > lo);
            CHECK(ci.hi > hi);
            lo = ci.lo;
            hi = ci.hi;
        }
    }
    SECTION("the observed Sharpe ratio lies strictly inside") {
        // For alpha near 1 the interval shrinks onto the median of the law, which sits
        // about sr / (4 (n - 1)) closer to zero than sr, so the grid stops at 0.5.
        for (double alpha : {0.001, 0.01, 0.05, 0.2, 0.5}) {
            for (double z : {-0.4, 0.0, 0.15, 0.8}) {
                const auto ci = sr_confidence_interval({z, 36}, alpha);
                CHECK(ci.lo < z);
                CHECK(z < ci.hi);
            }
        }
    }
    SECTION("intercept-only factor interval matches the plain interval") {
        const auto a = sr_confidence_interval({0.3, 64}, 0.05);
        const auto b = factor_sr_confidence_interval({0.3, 64, 1, 1.0 / 64}, 0.05);
        CHECK_THAT(b.lo, WithinAbs(a.lo, 1e-13));
        CHECK_THAT(b.hi, WithinAbs(a.hi, 1e-13));
    }
    SECTION("factor interval widens with the gram scalar") {
        double width = 0.0;
        for (double g : {0.005, 0.01, 0.02, 0.05}) {
            const auto ci = factor_sr_confidence_interval({0.2, 120, 4, g}, 0.05);
            CHECK(ci.hi - ci.lo > width);
            width = ci.hi - ci.lo;
        }
    }
    SECTION("errors") {
        CHECK_THROWS_AS(sr_confidence_interval({0.1, 1}, 0.05), DomainError);
        CHECK_THROWS_AS(sr_confidence_interval({0.1, 10}, 0.0), DomainError);
        CHECK_THROWS_AS(factor_sr_confidence_interval({0.1, 4, 4, 0.1}, 0.05), DomainError);
    }
}

TEST_CASE("Prediction intervals", "[frequentist]") {
    SECTION("endpoints solve the defining equations") {
        for (double z : {-0.2, 0.0, 0.15, 0.5}) {
            for (std::size_t n2 : {12u, 128u, 1000u}) {
                const SRSummary s{z, 128};
                const auto pi = sr_prediction_interval(s, n2, 0.05);
                CHECK_THAT(prediction_cdf(s, n2, pi.lo), WithinAbs(0.025, 1e-8));
                CHECK_THAT(prediction_cdf(s, n2, pi.hi), WithinAbs(0.975, 1e-8));
                CHECK(pi.lo < z);
                CHECK(z < pi.hi);
            }
        }
    }
    SECTION("prediction CDF increases in psi") {
        const SRSummary s{0.1, 60};
        double previous = 0.0;
        for (double psi = -1.0; psi <= 1.2; psi += 0.05) {
            const double G = prediction_cdf(s, 60, psi);
            CHECK(G >= previous);
            previous = G;
        }
    }
    SECTION("large future sample converges to the confidence interval") {
        const SRSummary s{0.2, 128};
        const auto pi = sr_prediction_interval(s, 1000000, 0.05);
        const auto ci = sr_confidence_interval(s, 0.05);
        CHECK_THAT(pi.lo, WithinAbs(ci.lo, 2e-3));
        CHECK_THAT(pi.hi, WithinAbs(ci.hi, 2e-3));
    }
    SECTION("endpoints strictly increase with the observed Sharpe ratio") {
        double lo = -1e9, hi = -1e9;
        for (double z = -0.5; z <= 0.5; z += 0.1) {
            const auto pi = sr_prediction_interval({z, 100}, 50, 0.1);
            CHECK(pi.lo > lo);
            CHECK(pi.hi > hi);
            lo = pi.lo;
            hi = pi.hi;
        }
    }
    SECTION("errors") {
        CHECK_THROWS_AS(sr_prediction_interval({0.1, 100}, 1, 0.05), DomainError);
        CHECK_THROWS_AS(sr_prediction_interval({0.1, 100}, 10, 1.0), DomainError);
    }
}
