#include "upsr/upsilon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "upsr/errors.hpp"
#include "upsr/rootfind.hpp"

namespace upsr {

namespace {

using wide = boost::multiprecision::cpp_bin_float_100;

void check_dof(double dof, const char* where) {
    if (!(dof > 0.0) || !std::isfinite(dof)) {
        throw DomainError(std::string(where) + ": degrees of freedom must be positive and finite, got " +
                          std::to_string(dof));
    }
}

// Binomial coefficients C(n, k) for n < rows.
template <class T>
std::vector<std::vector<T>> pascal(std::size_t rows) {
    std::vector<std::vector<T>> c(rows);
    for (std::size_t n = 0; n < rows; ++n) {
        c[n].assign(n + 1, T(1));
        for (std::size_t k = 1; k < n; ++k) {
            c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
        }
    }
    return c;
}

template <class T>
std::vector<T> moments_to_cumulants_impl(const std::vector<T>& m) {
    // m[0] = 1 is the zeroth moment; m[n] for n = 1..K.
    const std::size_t K = m.size() - 1;
    const auto C = pascal<T>(K + 1);
    std::vector<T> kappa(K + 1, T(0));
    for (std::size_t n = 1; n <= K; ++n) {
        T acc = m[n];
        for (std::size_t j = 1; j < n; ++j) {
            acc -= C[n - 1][j - 1] * kappa[j] * m[n - j];
        }
        kappa[n] = acc;
    }
    return kappa;
}

// Cumulants 1..K of chi_dof / sqrt(dof). The raw moments obey m_{i+2} = (dof + i) m_i / dof,
// so only the mean needs a gamma ratio. The conversion to cumulants cancels roughly
// (K-1) log10(dof) digits, hence the extended precision.
std::vector<double> unit_chi_cumulants_uncached(double dof, int K) {
    const wide nu(dof);
    std::vector<wide> m(static_cast<std::size_t>(K) + 1);
    m[0] = 1;
    if (K >= 1) {
        using boost::multiprecision::exp;
        using boost::multiprecision::sqrt;
        m[1] = sqrt(wide(2) / nu) * exp(boost::math::lgamma((nu + 1) / 2) - boost::math::lgamma(nu / 2));
    }
    for (int i = 0; i + 2 <= K; ++i) {
        m[i + 2] = (nu + i) * m[i] / nu;
    }
    const auto kappa = moments_to_cumulants_impl(m);
    std::vector<double> out(static_cast<std::size_t>(K));
    for (int j = 1; j <= K; ++j) {
        out[j - 1] = static_cast<double>(kappa[j]);
    }
    return out;
}

const std::vector<double>& unit_chi_cumulants(double dof, int K) {
    // Per-thread memo; root finders rebuild laws with the same dof many times.
    thread_local std::map<std::pair<double, int>, std::vector<double>> memo;
    const auto key = std::make_pair(dof, K);
    auto it = memo.find(key);
    if (it != memo.end()) {
        return it->second;
    }
    if (memo.size() > 256) {
        memo.clear();
    }
    return memo.emplace(key, unit_chi_cumulants_uncached(dof, K)).first->second;
}

} // namespace

UpsilonParams::UpsilonParams(std::vector<double> coef, std::vector<double> dof)
    : coef_(std::move(coef)), dof_(std::move(dof)) {
    if (coef_.size() != dof_.size()) {
        throw DomainError("Upsilon coefficient and dof vectors differ in length (" + std::to_string(coef_.size()) +
                          " vs " + std::to_string(dof_.size()) + ")");
    }
    for (double nu : dof_) {
        check_dof(nu, "UpsilonParams");
    }
    for (double c : coef_) {
        if (!std::isfinite(c)) {
            throw DomainError("UpsilonParams: coefficients must be finite");
        }
    }
}

UpsilonParams UpsilonParams::negated() const {
    UpsilonParams out = *this;
    for (auto& c : out.coef_) {
        c = -c;
    }
    return out;
}

UpsilonParams concat(const UpsilonParams& a, const UpsilonParams& b) {
    auto coef = a.coef();
    auto dof = a.dof();
    coef.insert(coef.end(), b.coef().begin(), b.coef().end());
    dof.insert(dof.end(), b.dof().begin(), b.dof().end());
    return UpsilonParams(std::move(coef), std::move(dof));
}

std::vector<double> CumulantSeries::standardized() const {
    if (values_.size() < 2 || !(values_[1] > 0.0)) {
        throw DomainError("standardized cumulants need a positive variance");
    }
    const double var = values_[1];
    std::vector<double> g;
    for (std::size_t order = 3; order <= values_.size(); ++order) {
        g.push_back(values_[order - 1] / std::pow(var, 0.5 * static_cast<double>(order)));
    }
    return g;
}

void ApproxOrder::validate() const {
    if (edgeworth_terms < 1 || edgeworth_terms > kMaxSeriesTerms || cf_terms < 1 || cf_terms > kMaxSeriesTerms) {
        throw DomainError("series term counts must lie in [1, " + std::to_string(kMaxSeriesTerms) + "]");
    }
}

int ApproxOrder::max_cumulant_order() const noexcept {
    return std::max(edgeworth_terms, cf_terms) + 2;
}

double chi_raw_moment(double dof, int order) {
    check_dof(dof, "chi_raw_moment");
    if (order < 0) {
        throw DomainError("chi_raw_moment: order must be nonnegative");
    }
    if (order == 0) {
        return 1.0;
    }
    const double i = order;
    // Boost's gamma ratio keeps full precision at large dof, where a difference of two
    // large lgamma values cancels about log10(dof) digits.
    const double log_scale = 0.5 * i * std::numbers::ln2;
    try {
        const double ratio = boost::math::tgamma_ratio(0.5 * (dof + i), 0.5 * dof);
        if (std::isfinite(ratio) && ratio > 0.0) {
            const double out = std::exp(log_scale) * ratio;
            if (std::isfinite(out)) {
                return out;
            }
        }
    } catch (const std::overflow_error&) {
    }
    return std::exp(log_scale + std::lgamma(0.5 * (dof + i)) - std::lgamma(0.5 * dof));
}

CumulantSeries moments_to_cumulants(std::span<const double> moments) {
    if (moments.empty()) {
        throw DomainError("moments_to_cumulants: empty moment sequence");
    }
    std::vector<long double> m(moments.size() + 1);
    m[0] = 1.0L;
    std::copy(moments.begin(), moments.end(), m.begin() + 1);
    const auto kappa = moments_to_cumulants_impl(m);
    return CumulantSeries(std::vector<double>(kappa.begin() + 1, kappa.end()));
}

std::vector<double> cumulants_to_moments(std::span<const double> cumulants) {
    if (cumulants.empty()) {
        throw DomainError("cumulants_to_moments: empty cumulant sequence");
    }
    const std::size_t K = cumulants.size();
    const auto C = pascal<long double>(K + 1);
    std::vector<long double> m(K + 1, 0.0L);
    m[0] = 1.0L;
    for (std::size_t n = 1; n <= K; ++n) {
        long double acc = 0.0L;
        for (std::size_t j = 1; j <= n; ++j) {
            acc += C[n - 1][j - 1] * cumulants[j - 1] * m[n - j];
        }
        m[n] = acc;
    }
    return std::vector<double>(m.begin() + 1, m.end());
}

CumulantSeries upsilon_cumulants(const UpsilonParams& params, int max_order) {
    if (max_order < 2) {
        throw DomainError("upsilon_cumulants: max_order must be at least 2");
    }
    std::vector<double> kappa(static_cast<std::size_t>(max_order), 0.0);
    kappa[1] = 1.0; // the normal summand
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double c = params.coef()[j];
        if (c == 0.0) {
            continue;
        }
        const auto& unit = unit_chi_cumulants(params.dof()[j], max_order);
        double cpow = 1.0;
        for (int order = 1; order <= max_order; ++order) {
            cpow *= c;
            kappa[order - 1] += cpow * unit[order - 1];
        }
    }
    return CumulantSeries(std::move(kappa));
}

struct UpsilonApprox::LazyPolynomial {
    std::once_flag once;
    std::vector<double> gammas;
    Polynomial poly;
};

UpsilonApprox::UpsilonApprox(UpsilonParams params, ApproxOrder order)
    : params_(std::move(params)), order_(order), cf_(std::make_shared<LazyPolynomial>()) {
    order_.validate();
    cumulants_ = upsilon_cumulants(params_, order_.max_cumulant_order());
    mean_ = cumulants_.kappa(1);
    sd_ = std::sqrt(cumulants_.kappa(2));
    if (!exact_normal()) {
        cf_->gammas = cumulants_.standardized();
        edgeworth_ = edgeworth_series(cf_->gammas, order_.edgeworth_terms);
    }
}

const Polynomial& UpsilonApprox::cf_poly() const {
    std::call_once(cf_->once, [this] {
        cf_->poly = exact_normal() ? Polynomial::identity() : cornish_fisher_polynomial(cf_->gammas, order_.cf_terms);
    });
    return cf_->poly;
}

bool UpsilonApprox::exact_normal() const noexcept {
    return std::all_of(params_.coef().begin(), params_.coef().end(), [](double c) { return c == 0.0; });
}

double UpsilonApprox::cdf(double x) const {
    if (std::isnan(x)) {
        return x;
    }
    const double z = (x - mean_) / sd_;
    return std::clamp(edgeworth_.cdf(z), 0.0, 1.0);
}

double UpsilonApprox::pdf(double x) const {
    if (std::isnan(x)) {
        return x;
    }
    const double z = (x - mean_) / sd_;
    return std::max(0.0, edgeworth_.density(z) / sd_);
}

double UpsilonApprox::cf_quantile(double p) const {
    const double z = normal_quantile(p);
    return mean_ + sd_ * cf_poly()(z);
}

double UpsilonApprox::quantile(double p) const {
    const double z = normal_quantile(p);
    if (exact_normal()) {
        return mean_ + sd_ * z;
    }
    const double seed = mean_ + sd_ * cf_poly()(z);
    BisectionOptions opts;
    opts.x_tol = 1e-10;
    return bisect_increasing([this](double x) { return cdf(x); }, p, mean_, 10.0 * sd_, opts,
                             "Upsilon quantile", seed);
}

double edgeworth_cdf(const UpsilonParams& params, double x, ApproxOrder order) {
    return UpsilonApprox(params, order).cdf(x);
}

double edgeworth_pdf(const UpsilonParams& params, double x, ApproxOrder order) {
    return UpsilonApprox(params, order).pdf(x);
}

double cornish_fisher_quantile(const UpsilonParams& params, double p, ApproxOrder order) {
    return UpsilonApprox(params, order).cf_quantile(p);
}

double quantile_refined(const UpsilonParams& params, double p, ApproxOrder order) {
    return UpsilonApprox(params, order).quantile(p);
}

double noncentral_t_cdf(double x, double ncp, double dof) {
    check_dof(dof, "noncentral_t_cdf");
    if (std::isnan(x) || std::isnan(ncp)) {
        throw DomainError("noncentral_t_cdf: NaN argument");
    }
    if (ncp == 0.0) {
        return boost::math::cdf(boost::math::students_t_distribution<double>(dof), x);
    }
    return boost::math::cdf(boost::math::non_central_t_distribution<double>(dof, ncp), x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("probability must lie strictly between 0 and 1, got " + std::to_string(p));
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

} // namespace upsr
