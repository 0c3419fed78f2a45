#include "upsr/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "upsr/errors.hpp"

namespace upsr {

namespace {

constexpr double kRankTolerance = 1e-10;
// A spread this small relative to the data is rounding noise, not variation.
constexpr double kDegenerateSpread = 1e-13;

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

struct Decomposition {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

Decomposition decompose(const Eigen::MatrixXd& F) {
    if (F.rows() <= F.cols() || F.cols() < 1) {
        throw DomainError("factor design needs n > p >= 1, got n = " + std::to_string(F.rows()) +
                          ", p = " + std::to_string(F.cols()));
    }
    if (!F.allFinite()) {
        throw DomainError("factor design contains non-finite values");
    }
    Decomposition d{Eigen::JacobiSVD<Eigen::MatrixXd>(F, Eigen::ComputeThinU | Eigen::ComputeThinV)};
    const auto& s = d.svd.singularValues();
    if (s(0) <= 0.0 || s(s.size() - 1) < kRankTolerance * s(0)) {
        throw SingularDesignError("factor design is rank deficient (smallest/largest singular value = " +
                                  std::to_string(s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0) + ")");
    }
    return d;
}

double gram_from(const Decomposition& d, const Eigen::VectorXd& v) {
    // F = U S V'  =>  v'(F'F)^{-1}v = || S^{-1} V' v ||^2
    const Eigen::VectorXd w = (d.svd.matrixV().transpose() * v).cwiseQuotient(d.svd.singularValues());
    return w.squaredNorm();
}

void check_sample(const FactorSample& sample) {
    const auto& F = sample.factors;
    if (sample.returns.size() != F.rows()) {
        throw DomainError("returns length does not match factor rows");
    }
    if (sample.direction.size() != F.cols()) {
        throw DomainError("direction length does not match factor columns");
    }
    if (sample.direction.isZero(0.0)) {
        throw DomainError("direction must be nonzero");
    }
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
        if (F(i, 0) != 1.0) {
            throw DomainError("first factor column must be the constant one");
        }
    }
}

} // namespace

SampleMoments sample_moments(std::span<const double> x) {
    if (x.size() < 2) {
        throw DomainError("need at least two returns, got " + std::to_string(x.size()));
    }
    double mean = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw DomainError("returns must be finite");
        }
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(x.size() - 1)), x.size()};
}

SRSummary compute_sr(const ReturnsSample& sample) {
    const auto m = sample_moments(sample.returns);
    if (!(m.sd > kDegenerateSpread * max_abs(sample.returns))) {
        throw DegenerateSampleError("returns have zero sample variance; Sharpe ratio undefined");
    }
    return {(m.mean - sample.rfr) / m.sd, m.n};
}

OlsFit ols_fit(const Eigen::MatrixXd& factors, const Eigen::VectorXd& returns) {
    if (returns.size() != factors.rows()) {
        throw DomainError("returns length does not match factor rows");
    }
    if (!returns.allFinite()) {
        throw DomainError("returns must be finite");
    }
    const auto d = decompose(factors);
    OlsFit fit;
    fit.coefficients = d.svd.solve(returns);
    fit.n = static_cast<std::size_t>(factors.rows());
    fit.p = static_cast<std::size_t>(factors.cols());
    const Eigen::VectorXd resid = returns - factors * fit.coefficients;
    fit.sigma = std::sqrt(resid.squaredNorm() / static_cast<double>(fit.n - fit.p));
    return fit;
}

OlsFit ols_fit(const FactorSample& sample) { return ols_fit(sample.factors, sample.returns); }

double gram_scalar(const Eigen::MatrixXd& factors, const Eigen::VectorXd& direction) {
    if (direction.size() != factors.cols()) {
        throw DomainError("direction length does not match factor columns");
    }
    return gram_from(decompose(factors), direction);
}

FactorSRSummary compute_factor_sr(const FactorSample& sample) {
    check_sample(sample);
    const auto d = decompose(sample.factors);
    const Eigen::VectorXd beta = d.svd.solve(sample.returns);
    const auto n = static_cast<std::size_t>(sample.factors.rows());
    const auto p = static_cast<std::size_t>(sample.factors.cols());
    const Eigen::VectorXd resid = sample.returns - sample.factors * beta;
    const double sigma = std::sqrt(resid.squaredNorm() / static_cast<double>(n - p));
    const std::span<const double> y(sample.returns.data(), static_cast<std::size_t>(sample.returns.size()));
    if (!(sigma > kDegenerateSpread * max_abs(y))) {
        throw DegenerateSampleError("factor regression has zero residual variance");
    }
    return {(beta.dot(sample.direction) - sample.rfr) / sigma, n, p, gram_from(d, sample.direction)};
}

FactorSample intercept_only(std::span<const double> returns, double rfr) {
    FactorSample s;
    s.factors = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(returns.size()), 1);
    s.returns = Eigen::Map<const Eigen::VectorXd>(returns.data(), static_cast<Eigen::Index>(returns.size()));
    s.direction = Eigen::VectorXd::Ones(1);
    s.rfr = rfr;
    return s;
}

} // namespace upsr
