#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upsr/estimation.hpp"
#include "upsr/upsilon.hpp"

namespace upsr {

/// Direction of the alternative. `upper` is H1: sum a_i zeta_i > b.
enum class Sided { upper, lower, two };

const char* to_string(Sided s) noexcept;
/// Accepts "upper", "lower", "two"; throws DomainError otherwise.
Sided parse_sided(const std::string& s);

/// H0: sum_i a_i zeta_i = b, for SNRs or factor-model SNRs.
struct LinearHypothesis {
    std::vector<double> weights;
    double target = 0.0;
    double alpha = 0.05;
    Sided sided = Sided::upper;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Outcome of a test. The statistic is compared to the Upsilon quantile(s): one-sided
/// tests report `threshold`, two-sided tests the acceptance `interval`. The p-value
/// comes from the Edgeworth CDF at the statistic and is a series approximation.
struct InferenceResult {
    double statistic = 0.0;
    std::optional<double> threshold;
    std::optional<Interval> interval;
    double p_value = 1.0;
    bool reject = false;
    UpsilonParams params;
    ApproxOrder order;
    double alpha = 0.05;
    Sided sided = Sided::upper;
    std::string method;
    /// Cross-check through the noncentral t (one-sample test only).
    std::optional<double> classical_p_value;
    std::optional<bool> classical_reject;
};

/// H0: zeta = snr0, rejecting when sqrt(n) snr0 falls beyond the Upsilon quantile with
/// coef (sqrt(n) sr) and dof (n - 1).
InferenceResult one_sample_test(const SRSummary& s, double snr0, double alpha = 0.05, Sided sided = Sided::upper,
                                ApproxOrder order = {});

/// Independent-samples test of a linear combination of SNRs. With c = (sum a_i^2 / n_i)^{-1/2}
/// the null law of c b is Upsilon with coef c a_i sr_i and dof n_i - 1.
InferenceResult k_sample_test(std::span<const SRSummary> samples, const LinearHypothesis& hyp,
                              ApproxOrder order = {});

/// Factor-model analogue: c = (sum a_i^2 g_i)^{-1/2} with g_i the gram scalars, dof n_i - p_i.
InferenceResult factor_k_sample_test(std::span<const FactorSRSummary> samples, const LinearHypothesis& hyp,
                                     ApproxOrder order = {});

Interval sr_confidence_interval(const SRSummary& s, double alpha = 0.05, ApproxOrder order = {});
Interval factor_sr_confidence_interval(const FactorSRSummary& s, double alpha = 0.05, ApproxOrder order = {});

/// Interval for the Sharpe ratio of n2 future observations given the observed s1.
Interval sr_prediction_interval(const SRSummary& s1, std::size_t n2, double alpha = 0.05, ApproxOrder order = {});

/// P(future SR < psi) as used by sr_prediction_interval: the Edgeworth CDF at 0 of the
/// Upsilon with coef sqrt(n1 n2/(n1+n2)) (sr1, -psi) and dof (n1 - 1, n2 - 1).
double prediction_cdf(const SRSummary& s1, std::size_t n2, double psi, ApproxOrder order = {});

namespace detail {
void check_alpha(double alpha);
} // namespace detail

} // namespace upsr
