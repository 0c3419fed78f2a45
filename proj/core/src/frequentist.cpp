#include "upsr/frequentist.hpp"

#include <algorithm>
#include <cmath>

#include "upsr/errors.hpp"
#include "upsr/rootfind.hpp"

namespace upsr {

const char* to_string(Sided s) noexcept {
    switch (s) {
    case Sided::upper:
        return "upper";
    case Sided::lower:
        return "lower";
    case Sided::two:
        return "two";
    }
    return "?";
}

Sided parse_sided(const std::string& s) {
    if (s == "upper" || s == "greater") {
        return Sided::upper;
    }
    if (s == "lower" || s == "less") {
        return Sided::lower;
    }
    if (s == "two" || s == "two-sided" || s == "both") {
        return Sided::two;
    }
    throw DomainError("unknown sidedness '" + s + "' (expected upper, lower or two)");
}

namespace detail {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie strictly between 0 and 1, got " + std::to_string(alpha));
    }
}

} // namespace detail

namespace {

void check_n(std::size_t n, std::size_t min, const char* what) {
    if (n < min) {
        throw DomainError(std::string(what) + ": sample size " + std::to_string(n) + " is too small");
    }
}

// Decide with statistic `stat` under the null law `law`. For H1 "greater", small values
// of the statistic relative to the Upsilon are evidence: reject when stat < q_alpha.
InferenceResult decide(double stat, const UpsilonApprox& law, double alpha, Sided sided, std::string method) {
    detail::check_alpha(alpha);
    InferenceResult r;
    r.statistic = stat;
    r.params = law.params();
    r.order = law.order();
    r.alpha = alpha;
    r.sided = sided;
    r.method = std::move(method);
    const double F = law.cdf(stat);
    switch (sided) {
    case Sided::upper: {
        const double q = law.quantile(alpha);
        r.threshold = q;
        r.reject = stat < q;
        r.p_value = F;
        break;
    }
    case Sided::lower: {
        const double q = law.quantile(1.0 - alpha);
        r.threshold = q;
        r.reject = stat > q;
        r.p_value = 1.0 - F;
        break;
    }
    case Sided::two: {
        const Interval acc{law.quantile(0.5 * alpha), law.quantile(1.0 - 0.5 * alpha)};
        r.interval = acc;
        r.reject = stat < acc.lo || stat > acc.hi;
        r.p_value = std::min(1.0, 2.0 * std::min(F, 1.0 - F));
        break;
    }
    }
    return r;
}

Interval scaled_interval(const UpsilonApprox& law, double alpha, double scale) {
    detail::check_alpha(alpha);
    return {law.quantile(0.5 * alpha) / scale, law.quantile(1.0 - 0.5 * alpha) / scale};
}

} // namespace

InferenceResult one_sample_test(const SRSummary& s, double snr0, double alpha, Sided sided, ApproxOrder order) {
    check_n(s.n, 2, "one_sample_test");
    const double rootn = std::sqrt(static_cast<double>(s.n));
    const double dof = static_cast<double>(s.n - 1);
    const UpsilonApprox law(UpsilonParams({rootn * s.sr}, {dof}), order);
    auto r = decide(rootn * snr0, law, alpha, sided, "one-sample SNR test via Upsilon quantiles");

    // Classical route: t = sqrt(n) sr against the noncentral t with ncp sqrt(n) snr0.
    const double t = rootn * s.sr;
    const double upper_tail = 1.0 - noncentral_t_cdf(t, rootn * snr0, dof);
    double p = 0.0;
    switch (sided) {
    case Sided::upper:
        p = upper_tail;
        break;
    case Sided::lower:
        p = 1.0 - upper_tail;
        break;
    case Sided::two:
        p = std::min(1.0, 2.0 * std::min(upper_tail, 1.0 - upper_tail));
        break;
    }
    r.classical_p_value = p;
    r.classical_reject = p < alpha;
    return r;
}

InferenceResult k_sample_test(std::span<const SRSummary> samples, const LinearHypothesis& hyp, ApproxOrder order) {
    if (samples.empty()) {
        throw DomainError("k_sample_test: no samples");
    }
    if (hyp.weights.size() != samples.size()) {
        throw DomainError("k_sample_test: need one weight per sample");
    }
    if (std::all_of(hyp.weights.begin(), hyp.weights.end(), [](double a) { return a == 0.0; })) {
        throw DomainError("k_sample_test: weights are all zero");
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        check_n(samples[i].n, 2, "k_sample_test");
        denom += hyp.weights[i] * hyp.weights[i] / static_cast<double>(samples[i].n);
    }
    const double c = 1.0 / std::sqrt(denom);
    std::vector<double> coef;
    std::vector<double> dof;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        coef.push_back(c * hyp.weights[i] * samples[i].sr);
        dof.push_back(static_cast<double>(samples[i].n - 1));
    }
    const UpsilonApprox law(UpsilonParams(std::move(coef), std::move(dof)), order);
    return decide(c * hyp.target, law, hyp.alpha, hyp.sided,
                  std::to_string(samples.size()) + "-sample SNR linear hypothesis test");
}

InferenceResult factor_k_sample_test(std::span<const FactorSRSummary> samples, const LinearHypothesis& hyp,
                                     ApproxOrder order) {
    if (samples.empty()) {
        throw DomainError("factor_k_sample_test: no samples");
    }
    if (hyp.weights.size() != samples.size()) {
        throw DomainError("factor_k_sample_test: need one weight per sample");
    }
    if (std::all_of(hyp.weights.begin(), hyp.weights.end(), [](double a) { return a == 0.0; })) {
        throw DomainError("factor_k_sample_test: weights are all zero");
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].n <= samples[i].p || samples[i].p < 1) {
            throw DomainError("factor_k_sample_test: each sample needs n > p >= 1");
        }
        if (!(samples[i].gram_scalar > 0.0)) {
            throw DomainError("factor_k_sample_test: gram scalar must be positive");
        }
        denom += hyp.weights[i] * hyp.weights[i] * samples[i].gram_scalar;
    }
    const double c = 1.0 / std::sqrt(denom);
    std::vector<double> coef;
    std::vector<double> dof;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        coef.push_back(c * hyp.weights[i] * samples[i].srg);
        dof.push_back(static_cast<double>(samples[i].n - samples[i].p));
    }
    const UpsilonApprox law(UpsilonParams(std::move(coef), std::move(dof)), order);
    return decide(c * hyp.target, law, hyp.alpha, hyp.sided,
                  std::to_string(samples.size()) + "-sample factor-model SNR test");
}

Interval sr_confidence_interval(const SRSummary& s, double alpha, ApproxOrder order) {
    check_n(s.n, 2, "sr_confidence_interval");
    const double rootn = std::sqrt(static_cast<double>(s.n));
    const UpsilonApprox law(UpsilonParams({rootn * s.sr}, {static_cast<double>(s.n - 1)}), order);
    return scaled_interval(law, alpha, rootn);
}

Interval factor_sr_confidence_interval(const FactorSRSummary& s, double alpha, ApproxOrder order) {
    if (s.n <= s.p || s.p < 1) {
        throw DomainError("factor_sr_confidence_interval: need n > p >= 1");
    }
    if (!(s.gram_scalar > 0.0)) {
        throw DomainError("factor_sr_confidence_interval: gram scalar must be positive");
    }
    const double scale = 1.0 / std::sqrt(s.gram_scalar);
    const UpsilonApprox law(UpsilonParams({scale * s.srg}, {static_cast<double>(s.n - s.p)}), order);
    return scaled_interval(law, alpha, scale);
}

double prediction_cdf(const SRSummary& s1, std::size_t n2, double psi, ApproxOrder order) {
    check_n(s1.n, 2, "prediction_cdf");
    check_n(n2, 2, "prediction_cdf");
    const double n1d = static_cast<double>(s1.n);
    const double n2d = static_cast<double>(n2);
    const double c = std::sqrt(n1d * n2d / (n1d + n2d));
    const UpsilonApprox law(UpsilonParams({c * s1.sr, -c * psi}, {n1d - 1.0, n2d - 1.0}), order);
    return law.cdf(0.0);
}


Interval sr_prediction_interval(const SRSummary& s1, std::size_t n2, double alpha, ApproxOrder order) {
    detail::check_alpha(alpha);
    check_n(s1.n, 2, "sr_prediction_interval");
    check_n(n2, 2, "sr_prediction_interval");
    const double w = std::sqrt(1.0 / static_cast<double>(s1.n) + 1.0 / static_cast<double>(n2));
    auto G = [&](double psi) { return prediction_cdf(s1, n2, psi, order); };
    return {solve_prediction_endpoint(G, 0.5 * alpha, s1.sr, w),
            solve_prediction_endpoint(G, 1.0 - 0.5 * alpha, s1.sr, w)};
}

} // namespace upsr
