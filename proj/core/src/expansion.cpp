#include "upsr/expansion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "upsr/errors.hpp"

namespace upsr {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
}

double Polynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) {
        return {};
    }
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        d[k - 1] = static_cast<double>(k) * coeffs_[k];
    }
    return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(rhs.coeffs_.size(), 0.0);
    }
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) {
        coeffs_[k] += rhs.coeffs_[k];
    }
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(rhs.coeffs_.size(), 0.0);
    }
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) {
        coeffs_[k] -= rhs.coeffs_[k];
    }
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double c) {
    for (auto& a : coeffs_) {
        a *= c;
    }
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.coeffs_.empty() || b.coeffs_.empty()) {
        return {};
    }
    std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
            out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    return Polynomial(std::move(out));
}

double hermite_he(int n, double x) {
    if (n < 0) {
        throw DomainError("hermite_he: negative order");
    }
    if (n == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> hermite_he_all(int nmax, double x) {
    if (nmax < 0) {
        return {};
    }
    std::vector<double> he(static_cast<std::size_t>(nmax) + 1);
    he[0] = 1.0;
    if (nmax >= 1) {
        he[1] = x;
    }
    for (int k = 1; k < nmax; ++k) {
        he[k + 1] = x * he[k] - k * he[k - 1];
    }
    return he;
}

namespace {

Polynomial build_hermite(int n) {
    Polynomial prev = Polynomial::constant(1.0);
    if (n == 0) {
        return prev;
    }
    Polynomial cur = Polynomial::identity();
    for (int k = 1; k < n; ++k) {
        Polynomial next = Polynomial::identity() * cur - static_cast<double>(k) * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

// Every index the series builders can request: He_{3S} for S = kMaxSeriesTerms.
constexpr int kHermiteCache = 3 * kMaxSeriesTerms + 1;

} // namespace

Polynomial hermite_he_polynomial(int n) {
    if (n < 0) {
        throw DomainError("hermite_he_polynomial: negative order");
    }
    static const std::vector<Polynomial> cache = [] {
        std::vector<Polynomial> v;
        for (int k = 0; k <= kHermiteCache; ++k) {
            v.push_back(build_hermite(k));
        }
        return v;
    }();
    return n <= kHermiteCache ? cache[static_cast<std::size_t>(n)] : build_hermite(n);
}

namespace {

void enumerate_partitions(int remaining, int max_part, std::vector<int>& mult,
                          std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(mult);
        return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
        ++mult[part - 1];
        enumerate_partitions(remaining - part, part, mult, out);
        --mult[part - 1];
    }
}

std::vector<std::vector<int>> make_partitions(int s) {
    std::vector<std::vector<int>> out;
    std::vector<int> mult(static_cast<std::size_t>(s), 0);
    enumerate_partitions(s, s, mult, out);
    return out;
}

const std::array<std::vector<std::vector<int>>, kMaxSeriesTerms + 1>& partition_cache() {
    static const auto cache = [] {
        std::array<std::vector<std::vector<int>>, kMaxSeriesTerms + 1> c;
        for (int s = 1; s <= kMaxSeriesTerms; ++s) {
            c[static_cast<std::size_t>(s)] = make_partitions(s);
        }
        return c;
    }();
    return cache;
}

double factorial(int n) {
    static const auto table = [] {
        std::array<double, kMaxSeriesTerms + 3> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            t[i] = t[i - 1] * static_cast<double>(i);
        }
        return t;
    }();
    return table[static_cast<std::size_t>(n)];
}

// Weight of a partition (multiplicities k_m of part m) and its r = sum k_m.
std::pair<double, int> partition_weight(const std::vector<int>& mult, std::span<const double> gammas) {
    double w = 1.0;
    int r = 0;
    for (std::size_t idx = 0; idx < mult.size(); ++idx) {
        const int k = mult[idx];
        if (k == 0) {
            continue;
        }
        // Part m carries gamma_m / (m+2)!; k equal parts add 1/k!.
        const double term = gammas[idx] / factorial(static_cast<int>(idx) + 3);
        double power = term;
        for (int j = 1; j < k; ++j) {
            power *= term;
        }
        w *= power / factorial(k);
        r += k;
    }
    return {w, r};
}

void check_gammas(std::span<const double> gammas, int terms) {
    if (terms < 1 || terms > kMaxSeriesTerms) {
        throw DomainError("series terms must lie in [1, " + std::to_string(kMaxSeriesTerms) + "]");
    }
    if (gammas.size() < static_cast<std::size_t>(terms)) {
        throw DomainError("not enough standardized cumulants for the requested series terms");
    }
}

} // namespace

const std::vector<std::vector<int>>& partitions(int s) {
    if (s < 1 || s > kMaxSeriesTerms) {
        throw DomainError("partitions: order out of cached range");
    }
    return partition_cache()[static_cast<std::size_t>(s)];
}

double EdgeworthSeries::cdf(double z) const {
    const double Phi = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    // phi(z) underflows well before the Hermite terms can matter.
    if (std::abs(z) > 38.0 || cdf_weight.empty()) {
        return Phi;
    }
    const auto he = hermite_he_all(static_cast<int>(cdf_weight.size()) - 1, z);
    double corr = 0.0;
    for (std::size_t n = 0; n < cdf_weight.size(); ++n) {
        corr += cdf_weight[n] * he[n];
    }
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return Phi - phi * corr;
}

double EdgeworthSeries::density(double z) const {
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    if (std::abs(z) > 38.0 || pdf_weight.empty()) {
        return phi;
    }
    const auto he = hermite_he_all(static_cast<int>(pdf_weight.size()) - 1, z);
    double corr = 1.0;
    for (std::size_t n = 0; n < pdf_weight.size(); ++n) {
        corr += pdf_weight[n] * he[n];
    }
    return phi * corr;
}

EdgeworthSeries edgeworth_series(std::span<const double> gammas, int terms) {
    check_gammas(gammas, terms);
    EdgeworthSeries series;
    // Highest Hermite index in the CDF: s + 2r - 1 with r = s gives 3S - 1.
    series.cdf_weight.assign(static_cast<std::size_t>(3 * terms), 0.0);
    series.pdf_weight.assign(static_cast<std::size_t>(3 * terms + 1), 0.0);
    for (int s = 1; s <= terms; ++s) {
        for (const auto& mult : partitions(s)) {
            const auto [w, r] = partition_weight(mult, gammas);
            const auto n = static_cast<std::size_t>(s + 2 * r - 1);
            series.cdf_weight[n] += w;
            series.pdf_weight[n + 1] += w;
        }
    }
    return series;
}

Polynomial edgeworth_term(std::span<const double> gammas, int s) {
    check_gammas(gammas, s);
    Polynomial out;
    for (const auto& mult : partitions(s)) {
        const auto [w, r] = partition_weight(mult, gammas);
        out += w * hermite_he_polynomial(s + 2 * r - 1);
    }
    return out;
}

namespace {

using Series = std::vector<Polynomial>; // index = order in the small parameter

Series series_product(const Series& a, const Series& b, int max_order) {
    Series out(static_cast<std::size_t>(max_order) + 1);
    for (int i = 0; i <= max_order; ++i) {
        if (a[i].degree() < 0) {
            continue;
        }
        for (int j = 0; i + j <= max_order; ++j) {
            if (b[j].degree() < 0) {
                continue;
            }
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

// d/dz [phi(z) P(z)] = phi(z) (P'(z) - z P(z)).
Polynomial gaussian_derivative(const Polynomial& p) {
    return p.derivative() - Polynomial::identity() * p;
}

} // namespace

std::vector<Polynomial> cornish_fisher_adjustments(std::span<const double> gammas, int terms) {
    check_gammas(gammas, terms);

    // Solve Phi(z + delta) = F(z + delta) order by order, delta = sum_s eps^s w_s(z), where
    // F(x) = Phi(x) - phi(x) sum_s eps^s R_s(x). Expanding both sides about z and dividing by
    // phi(z) gives
    //   sum_{m>=1} delta^m/m! D^{m-1}[1] = sum_s eps^s sum_{m>=0} delta^m/m! D^m[R_s],
    // with D[P] = P' - zP. The m = 1 term on the left is delta itself.
    std::vector<Polynomial> R(static_cast<std::size_t>(terms) + 1);
    for (int s = 1; s <= terms; ++s) {
        R[s] = edgeworth_term(gammas, s);
    }
    // DR[s][m] = D^m R_s; Done[m] = D^m [1].
    std::vector<std::vector<Polynomial>> DR(static_cast<std::size_t>(terms) + 1);
    for (int s = 1; s <= terms; ++s) {
        DR[s].push_back(R[s]);
        for (int m = 1; m <= terms - s; ++m) {
            DR[s].push_back(gaussian_derivative(DR[s].back()));
        }
    }
    std::vector<Polynomial> Done{Polynomial::constant(1.0)};
    for (int m = 1; m <= terms; ++m) {
        Done.push_back(gaussian_derivative(Done.back()));
    }

    std::vector<double> inv_factorial(static_cast<std::size_t>(terms) + 1, 1.0);
    for (int m = 1; m <= terms; ++m) {
        inv_factorial[m] = inv_factorial[m - 1] / m;
    }

    Series w(static_cast<std::size_t>(terms) + 1);
    for (int s = 1; s <= terms; ++s) {
        // Powers of delta built from w_1..w_{s-1}; exact through order s for m >= 2,
        // and through order s-1 for m = 1.
        std::vector<Series> pw(static_cast<std::size_t>(s) + 1);
        pw[1] = Series(w.begin(), w.begin() + s + 1);
        for (int m = 2; m <= s; ++m) {
            pw[m] = series_product(pw[m - 1], pw[1], s);
        }

        Polynomial acc = R[s];
        for (int sp = 1; sp < s; ++sp) {
            for (int m = 1; m <= s - sp; ++m) {
                acc += (inv_factorial[m] * pw[m][s - sp]) * DR[sp][m];
            }
        }
        for (int m = 2; m <= s; ++m) {
            acc -= (inv_factorial[m] * pw[m][s]) * Done[m - 1];
        }
        w[s] = std::move(acc);
    }
    return std::vector<Polynomial>(w.begin() + 1, w.end());
}

Polynomial cornish_fisher_polynomial(std::span<const double> gammas, int terms) {
    Polynomial out = Polynomial::identity();
    for (const auto& adj : cornish_fisher_adjustments(gammas, terms)) {
        out += adj;
    }
    return out;
}

} // namespace upsr
