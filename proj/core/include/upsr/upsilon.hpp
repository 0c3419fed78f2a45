#pragma once

// The Upsilon distribution: y = sum_j coef_j * sqrt(chi2_{dof_j} / dof_j) + Z, with all
// summands independent and Z standard normal. Distribution and quantile functions are
// computed by Edgeworth and Cornish-Fisher expansions driven by the exact cumulants.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "upsr/expansion.hpp"

namespace upsr {

/// Coefficients and degrees of freedom of one Upsilon law. An empty parameter set is
/// the standard normal.
class UpsilonParams {
public:
    UpsilonParams() = default;

    /// Throws DomainError if the lengths differ or a dof is not a finite positive number.
    UpsilonParams(std::vector<double> coef, std::vector<double> dof);

    const std::vector<double>& coef() const noexcept { return coef_; }
    const std::vector<double>& dof() const noexcept { return dof_; }
    std::size_t size() const noexcept { return coef_.size(); }
    bool empty() const noexcept { return coef_.empty(); }

    /// Parameters of the law with every coefficient negated.
    UpsilonParams negated() const;

    friend bool operator==(const UpsilonParams&, const UpsilonParams&) = default;

private:
    std::vector<double> coef_;
    std::vector<double> dof_;
};

/// Concatenation of summands. The result carries one normal summand, not two.
UpsilonParams concat(const UpsilonParams& a, const UpsilonParams& b);

/// Raw cumulants kappa_1..kappa_K of a scalar law.
class CumulantSeries {
public:
    CumulantSeries() = default;
    explicit CumulantSeries(std::vector<double> values) : values_(std::move(values)) {}

    /// 1-based: kappa(1) is the mean, kappa(2) the variance.
    double kappa(std::size_t order) const { return values_.at(order - 1); }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }

    /// gamma_s = kappa_{s+2} / kappa_2^{(s+2)/2}, for s = 1..size()-2.
    std::vector<double> standardized() const;

private:
    std::vector<double> values_;
};

/// Number of series terms. Both counts are corrections beyond the Gaussian: the
/// Edgeworth series with S terms uses cumulants up to order S+2, and so does a
/// Cornish-Fisher expansion with S adjustment polynomials.
struct ApproxOrder {
    int edgeworth_terms = 8;
    int cf_terms = 6;

    /// Throws DomainError unless both counts are in [1, kMaxSeriesTerms].
    void validate() const;
    int max_cumulant_order() const noexcept;
};

/// E[chi^order] for a chi variate with `dof` degrees of freedom:
/// 2^{order/2} Gamma((dof+order)/2) / Gamma(dof/2).
double chi_raw_moment(double dof, int order);

/// Raw moments m_1..m_K to cumulants kappa_1..kappa_K.
CumulantSeries moments_to_cumulants(std::span<const double> moments);

/// Inverse of moments_to_cumulants.
std::vector<double> cumulants_to_moments(std::span<const double> cumulants);

/// Cumulants of an Upsilon law up to `max_order` (>= 2).
CumulantSeries upsilon_cumulants(const UpsilonParams& params, int max_order);

/// Precomputed series for one law and one approximation order; cheap to evaluate
/// repeatedly. Immutable after construction and safe to share between threads.
class UpsilonApprox {
public:
    explicit UpsilonApprox(UpsilonParams params, ApproxOrder order = {});

    const UpsilonParams& params() const noexcept { return params_; }
    const ApproxOrder& order() const noexcept { return order_; }
    const CumulantSeries& cumulants() const noexcept { return cumulants_; }
    double mean() const noexcept { return mean_; }
    double sd() const noexcept { return sd_; }

    /// Edgeworth CDF clamped to [0, 1].
    double cdf(double x) const;
    /// Edgeworth density clamped at 0.
    double pdf(double x) const;
    /// Cornish-Fisher quantile. Throws DomainError unless 0 < p < 1.
    double cf_quantile(double p) const;
    /// Quantile by bisection on cdf(); throws NumericalError if the bracket fails.
    double quantile(double p) const;

private:
    bool exact_normal() const noexcept;

    UpsilonParams params_;
    ApproxOrder order_;
    CumulantSeries cumulants_;
    double mean_ = 0.0;
    double sd_ = 1.0;
    EdgeworthSeries edgeworth_;
    // The Cornish-Fisher polynomial costs more than the Edgeworth weights and many
    // callers only need the CDF, so it is built on first use. Copies share it.
    struct LazyPolynomial;
    std::shared_ptr<LazyPolynomial> cf_;
    const Polynomial& cf_poly() const;
};

double edgeworth_cdf(const UpsilonParams& params, double x, ApproxOrder order = {});
double edgeworth_pdf(const UpsilonParams& params, double x, ApproxOrder order = {});
double cornish_fisher_quantile(const UpsilonParams& params, double p, ApproxOrder order = {});

/// Cornish-Fisher seed polished by bisection on the Edgeworth CDF. The result satisfies
/// |edgeworth_cdf(q) - p| <= 1e-9 or lies in a bracket narrower than 1e-10.
double quantile_refined(const UpsilonParams& params, double p, ApproxOrder order = {});

/// CDF of the noncentral t distribution.
double noncentral_t_cdf(double x, double ncp, double dof);

/// Standard normal helpers.
double normal_cdf(double z);
double normal_pdf(double z);
double normal_quantile(double p);

} // namespace upsr
