#pragma once

// Building blocks for Edgeworth and Cornish-Fisher series: probabilists' Hermite
// polynomials, integer partitions and a small dense polynomial type.

#include <cstddef>
#include <span>
#include <vector>

namespace upsr {

/// Largest supported number of series terms.
inline constexpr int kMaxSeriesTerms = 16;

/// Dense polynomial in one variable, coefficients in increasing degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    static Polynomial constant(double c) { return Polynomial({c}); }
    static Polynomial identity() { return Polynomial({0.0, 1.0}); }

    /// Degree of the stored representation; -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    double coeff(std::size_t k) const noexcept { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
    const std::vector<double>& coeffs() const noexcept { return coeffs_; }

    double operator()(double x) const noexcept;

    Polynomial derivative() const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(double c);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double c) { return a *= c; }
    friend Polynomial operator*(double c, Polynomial a) { return a *= c; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

private:
    void trim();
    std::vector<double> coeffs_;
};

/// He_n(x) via He_{n+1} = x He_n - n He_{n-1}.
double hermite_he(int n, double x);

/// He_0(x)..He_nmax(x).
std::vector<double> hermite_he_all(int nmax, double x);

/// Monomial coefficients of He_n.
Polynomial hermite_he_polynomial(int n);

/// Partitions of s as multiplicity vectors: entry m-1 holds how many parts equal m.
/// Cached for s <= kMaxSeriesTerms.
const std::vector<std::vector<int>>& partitions(int s);

/// Edgeworth series as weights on Hermite polynomials of the standardized variable:
///   F(z) = Phi(z) - phi(z) * sum_n cdf_weight[n] He_n(z)
///   f(z) = phi(z) * (1 + sum_n pdf_weight[n] He_n(z))
struct EdgeworthSeries {
    std::vector<double> cdf_weight;
    std::vector<double> pdf_weight;

    double cdf(double z) const;
    double density(double z) const;
};

/// Build the S-term series from standardized cumulants gamma_1..gamma_S, where
/// gamma_s = kappa_{s+2} / kappa_2^{(s+2)/2}. Terms are grouped by powers of the
/// small parameter: term s collects partitions of s, each contributing
///   He_{s+2r-1}(z) * prod_m (gamma_m / (m+2)!)^{k_m} / k_m!,   r = sum_m k_m.
EdgeworthSeries edgeworth_series(std::span<const double> gammas, int terms);

/// The polynomial of term s (1-based) of the Edgeworth CDF correction, i.e. the
/// quantity subtracted after multiplying by phi(z).
Polynomial edgeworth_term(std::span<const double> gammas, int s);

/// Cornish-Fisher adjustment polynomials w_1..w_terms in the standard normal quantile z;
/// the quantile of the standardized law is z + sum_s w_s(z). Obtained by formally
/// inverting the Edgeworth series order by order.
std::vector<Polynomial> cornish_fisher_adjustments(std::span<const double> gammas, int terms);

/// z + sum of the adjustments.
Polynomial cornish_fisher_polynomial(std::span<const double> gammas, int terms);

} // namespace upsr
