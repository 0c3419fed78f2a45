#include "upsr/bayes.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "upsr/errors.hpp"
#include "upsr/rootfind.hpp"

namespace upsr {

void NIGHyper::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(n) || !std::isfinite(sigsq) || !std::isfinite(m)) {
        throw DomainError("NIG hyperparameters must be finite");
    }
    if (n < 0.0 || m < 0.0) {
        throw DomainError("NIG pseudo-counts must be nonnegative (n = " + std::to_string(n) +
                          ", m = " + std::to_string(m) + ")");
    }
    if (sigsq < 0.0) {
        throw DomainError("NIG variance scale must be nonnegative");
    }
    if (m > 0.0 && sigsq == 0.0) {
        throw DomainError("NIG variance scale must be positive when its dof is positive");
    }
}

NIGHyper update_nig(const NIGHyper& prior, const SampleMoments& data) {
    prior.validate();
    if (data.n == 0) {
        return prior;
    }
    if (!std::isfinite(data.mean) || !(data.sd >= 0.0)) {
        throw DomainError("update_nig: sample mean and sd must be finite, sd nonnegative");
    }
    const double n = static_cast<double>(data.n);
    NIGHyper post;
    post.n = prior.n + n;
    post.mu = (prior.n * prior.mu + n * data.mean) / post.n;
    post.m = prior.m + n;
    const double shift = prior.mu - data.mean;
    post.sigsq = (prior.m * prior.sigsq + (n - 1.0) * data.sd * data.sd + (prior.n * n / post.n) * shift * shift) /
                 post.m;
    return post;
}

SnrHyper to_snr_form(const NIGHyper& h) {
    if (!(h.sigsq > 0.0)) {
        throw ImproperPosteriorError("SNR form needs a positive variance scale");
    }
    return {h.mu / std::sqrt(h.sigsq), h.n, h.sigsq, h.m};
}

NIGHyper from_snr_form(const SnrHyper& h) { return {h.snr * std::sqrt(h.sigsq), h.n, h.sigsq, h.m}; }

SnrHyper update_snr_form(const SnrHyper& prior, double sr, double sd, std::size_t n) {
    if (n == 0) {
        return prior;
    }
    const double nd = static_cast<double>(n);
    const double sig0 = std::sqrt(prior.sigsq);
    SnrHyper post;
    post.n = prior.n + nd;
    post.m = prior.m + nd;
    const double shift = prior.snr * sig0 - sr * sd;
    post.sigsq = (prior.m * prior.sigsq + (nd - 1.0) * sd * sd + (prior.n * nd / post.n) * shift * shift) / post.m;
    if (!(post.sigsq > 0.0)) {
        throw DegenerateSampleError("SNR-form update: posterior variance scale is zero");
    }
    post.snr = (prior.n * prior.snr * sig0 + nd * sr * sd) / (post.n * std::sqrt(post.sigsq));
    return post;
}

MarginalSnr marginal_snr_params(const NIGHyper& h) {
    h.validate();
    if (!h.proper()) {
        throw ImproperPosteriorError("marginal SNR law needs n > 0, m > 0 and sigsq > 0 (n = " + std::to_string(h.n) +
                                     ", m = " + std::to_string(h.m) + ", sigsq = " + std::to_string(h.sigsq) +
                                     "); absorb data into the prior first");
    }
    const double snr = h.mu / std::sqrt(h.sigsq);
    const double scale = std::sqrt(h.n);
    return {UpsilonParams({scale * snr}, {h.m}), scale, snr};
}

Interval credible_interval(const NIGHyper& h, double alpha, ApproxOrder order) {
    detail::check_alpha(alpha);
    const auto marg = marginal_snr_params(h);
    const UpsilonApprox law(marg.params, order);
    return {law.quantile(0.5 * alpha) / marg.scale, law.quantile(1.0 - 0.5 * alpha) / marg.scale};
}

RegressionHyper RegressionHyper::noninformative(Eigen::Index p) {
    return {Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p), 0.0, 0.0};
}

void RegressionHyper::validate() const {
    if (lambda.rows() != lambda.cols() || lambda.rows() != beta.size()) {
        throw DomainError("regression prior dimensions are inconsistent");
    }
    if (!lambda.allFinite() || !beta.allFinite()) {
        throw DomainError("regression prior must be finite");
    }
    if (!lambda.isApprox(lambda.transpose(), 1e-12) && !(lambda - lambda.transpose()).isZero(1e-12)) {
        throw DomainError("regression prior precision must be symmetric");
    }
    if (sigsq < 0.0 || m < 0.0 || (m > 0.0 && sigsq == 0.0)) {
        throw DomainError("regression prior variance hyperparameters are invalid");
    }
    if (lambda.size() > 0) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lambda, Eigen::EigenvaluesOnly);
        const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-12 * top) {
            throw DomainError("regression prior precision must be positive semidefinite");
        }
    }
}

RegressionHyper update_regression(const RegressionHyper& prior, const FactorSample& sample) {
    prior.validate();
    const auto& F = sample.factors;
    const auto& y = sample.returns;
    const Eigen::Index p = F.cols();
    const Eigen::Index n = F.rows();
    if (prior.beta.size() != p) {
        throw DomainError("regression prior dimension does not match factor columns");
    }
    if (y.size() != n) {
        throw DomainError("returns length does not match factor rows");
    }
    if (!F.allFinite() || !y.allFinite()) {
        throw DomainError("factor sample must be finite");
    }

    // Posterior mean minimises ||y - F b||^2 + (b - beta0)' lambda0 (b - beta0). With R'R = lambda0
    // this is least squares on the stacked system [F; R] b = [y; R beta0], whose Gram matrix is
    // lambda1 and whose residual norm is the sum-of-squares part of m1 sigsq1.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prior.lambda);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd R = ev.asDiagonal() * es.eigenvectors().transpose();

    Eigen::MatrixXd A(n + p, p);
    A << F, R;
    Eigen::VectorXd b(n + p);
    b << y, R * prior.beta;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < p) {
        throw ImproperPosteriorError("posterior precision lambda0 + F'F is singular");
    }

    RegressionHyper post;
    post.beta = qr.solve(b);
    post.lambda = prior.lambda + F.transpose() * F;
    post.m = prior.m + static_cast<double>(n);
    post.sigsq = (prior.m * prior.sigsq + (b - A * post.beta).squaredNorm()) / post.m;
    return post;
}

NIGHyper collapse_direction(const RegressionHyper& h, const Eigen::VectorXd& v) {
    h.validate();
    if (v.size() != h.beta.size()) {
        throw DomainError("direction length does not match regression dimension");
    }
    if (v.isZero(0.0)) {
        throw DomainError("direction must be nonzero");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(h.lambda);
    if (llt.info() != Eigen::Success) {
        throw ImproperPosteriorError("precision matrix is singular; cannot collapse along a direction");
    }
    const double quad = v.dot(llt.solve(v));
    if (!(quad > 0.0) || !std::isfinite(quad)) {
        throw ImproperPosteriorError("precision matrix is numerically singular along the direction");
    }
    return {v.dot(h.beta), 1.0 / quad, h.sigsq, h.m};
}

double posterior_prediction_cdf(const NIGHyper& h, std::size_t n2, double psi, ApproxOrder order) {
    const auto marg = marginal_snr_params(h);
    if (n2 < 2) {
        throw DomainError("posterior prediction needs n2 >= 2");
    }
    const double n2d = static_cast<double>(n2);
    const double c = std::sqrt(h.n * n2d / (h.n + n2d));
    const UpsilonApprox law(UpsilonParams({c * marg.snr, -c * psi}, {h.m, n2d - 1.0}), order);
    return law.cdf(0.0);
}

Interval posterior_prediction_interval(const NIGHyper& h, std::size_t n2, double alpha, ApproxOrder order) {
    detail::check_alpha(alpha);
    const auto marg = marginal_snr_params(h);
    if (n2 < 2) {
        throw DomainError("posterior prediction needs n2 >= 2");
    }
    const double w = std::sqrt(1.0 / h.n + 1.0 / static_cast<double>(n2));
    auto G = [&](double psi) { return posterior_prediction_cdf(h, n2, psi, order); };
    return {solve_prediction_endpoint(G, 0.5 * alpha, marg.snr, w),
            solve_prediction_endpoint(G, 1.0 - 0.5 * alpha, marg.snr, w)};
}

} // namespace upsr
