#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace upsr {

/// Per-period returns in decimal units and a per-period risk-free rate.
struct ReturnsSample {
    std::vector<double> returns;
    double rfr = 0.0;
};

/// Sufficient statistics for inference on one Sharpe ratio.
struct SRSummary {
    double sr = 0.0;  ///< per sqrt(period)
    std::size_t n = 0;
};

/// Mean, Bessel-corrected standard deviation and count.
struct SampleMoments {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

/// Returns attributed to deterministic factors. The first column of `factors` must be
/// the constant one; `direction` is the contrast v applied to the coefficients.
struct FactorSample {
    Eigen::MatrixXd factors;
    Eigen::VectorXd returns;
    Eigen::VectorXd direction;
    double rfr = 0.0;
};

struct FactorSRSummary {
    double srg = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
    double gram_scalar = 0.0;  ///< v' (F'F)^{-1} v
};

struct OlsFit {
    Eigen::VectorXd coefficients;
    double sigma = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
};

/// Throws DomainError for n < 2 or non-finite values.
SampleMoments sample_moments(std::span<const double> x);

/// (mean - rfr) / sd. Throws DegenerateSampleError on zero variance.
SRSummary compute_sr(const ReturnsSample& sample);

/// Least squares through an SVD of the design; singular values below 1e-10 times the
/// largest raise SingularDesignError.
OlsFit ols_fit(const Eigen::MatrixXd& factors, const Eigen::VectorXd& returns);
OlsFit ols_fit(const FactorSample& sample);

/// v' (F'F)^{-1} v, from the same decomposition as ols_fit.
double gram_scalar(const Eigen::MatrixXd& factors, const Eigen::VectorXd& direction);

/// (beta_hat' v - rfr) / sigma_hat with its gram scalar.
FactorSRSummary compute_factor_sr(const FactorSample& sample);

/// Design with only the intercept column, direction (1).
FactorSample intercept_only(std::span<const double> returns, double rfr = 0.0);

} // namespace upsr
