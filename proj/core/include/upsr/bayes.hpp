#pragma once

// Conjugate Normal-Inverse-Gamma analysis of Gaussian returns, with the SNR marginal
// expressed as an Upsilon law:
//   sigma^2 ~ IG(m/2, m sigsq/2),  mu | sigma^2 ~ N(mu_loc, sigma^2 / n)
//   =>  sqrt(n) zeta ~ Upsilon(coef = (sqrt(n) mu_loc / sqrt(sigsq)), dof = (m)).

#include <cstddef>

#include <Eigen/Core>

#include "upsr/estimation.hpp"
#include "upsr/frequentist.hpp"
#include "upsr/upsilon.hpp"

namespace upsr {

/// NIG hyperparameters. `n` is the location pseudo-count, `m` the variance dof.
/// The noninformative prior is n = m = 0.
struct NIGHyper {
    double mu = 0.0;
    double n = 0.0;
    double sigsq = 0.0;
    double m = 0.0;

    /// Throws DomainError on negative counts, negative sigsq, or sigsq = 0 with m > 0.
    void validate() const;
    bool proper() const noexcept { return n > 0.0 && m > 0.0 && sigsq > 0.0; }
};

/// Hyperparameters in SNR form: snr = mu / sigma.
struct SnrHyper {
    double snr = 0.0;
    double n = 0.0;
    double sigsq = 0.0;
    double m = 0.0;
};

NIGHyper update_nig(const NIGHyper& prior, const SampleMoments& data);

SnrHyper to_snr_form(const NIGHyper& h);
NIGHyper from_snr_form(const SnrHyper& h);

/// The same update written on (snr, sigma): sigsq is updated first, then the SNR.
/// `data` supplies sr = mean/sd together with sd and n.
SnrHyper update_snr_form(const SnrHyper& prior, double sr, double sd, std::size_t n);

/// Marginal law of sqrt(n) zeta: Upsilon(coef = (sqrt(n) snr), dof = (m)).
struct MarginalSnr {
    UpsilonParams params;
    double scale = 1.0;  ///< sqrt(n); quantiles of `params` divided by scale are quantiles of zeta
    double snr = 0.0;
};

/// Throws ImproperPosteriorError unless n, m and sigsq are positive.
MarginalSnr marginal_snr_params(const NIGHyper& h);

/// Equal-tailed 1 - alpha credible interval for zeta.
Interval credible_interval(const NIGHyper& h, double alpha = 0.05, ApproxOrder order = {});

/// Bayesian regression hyperparameters: beta | sigma^2 ~ N(beta0, sigma^2 lambda^{-1}).
struct RegressionHyper {
    Eigen::VectorXd beta;
    Eigen::MatrixXd lambda;
    double sigsq = 0.0;
    double m = 0.0;

    /// Noninformative prior of dimension p.
    static RegressionHyper noninformative(Eigen::Index p);
    void validate() const;
};

/// Conjugate update with a full-rank factor sample (n > p). Throws ImproperPosteriorError
/// when the posterior precision is singular.
RegressionHyper update_regression(const RegressionHyper& prior, const FactorSample& sample);

/// Collapse along direction v: v'beta | sigma^2 ~ N(v'beta_i, sigma^2 v' lambda^{-1} v), which is
/// an NIG record with location v'beta_i and pseudo-count 1 / (v' lambda^{-1} v). Its marginal
/// SNR law is that of (v' lambda^{-1} v)^{-1/2} v'beta / sigma.
NIGHyper collapse_direction(const RegressionHyper& h, const Eigen::VectorXd& v);

/// Posterior prediction interval for the Sharpe ratio of n2 future observations.
Interval posterior_prediction_interval(const NIGHyper& h, std::size_t n2, double alpha = 0.05,
                                       ApproxOrder order = {});

/// P(future SR < psi) under the posterior: Edgeworth CDF at 0 of the Upsilon with
/// coef sqrt(n n2/(n + n2)) (snr, -psi) and dof (m, n2 - 1).
double posterior_prediction_cdf(const NIGHyper& h, std::size_t n2, double psi, ApproxOrder order = {});

} // namespace upsr
