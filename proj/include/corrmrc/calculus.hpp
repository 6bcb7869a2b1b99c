#pragma once

// Numerical calculus used by the semi-numerical evaluation: complete Bell
// polynomials (Faa di Bruno for exp), Chebyshev interpolation with analytic
// differentiation of the interpolant, and adaptive Gauss-Kronrod quadrature.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace corrmrc::calculus {

/// Complete Bell polynomial B_n(x_1, ..., x_n) with n = x.size(); B_0 = 1.
/// Uses B_{n+1} = sum_{i=0}^{n} C(n,i) B_{n-i} x_{i+1}.
double complete_bell(std::span<const double> x);

/// Value and derivatives g(x0), g'(x0), ..., g^(n)(x0) of an inner function.
struct InnerDerivatives {
    double g0 = 0.0;
    std::vector<double> derivs;
};

/// n-th derivative of exp(g(x)) at x0, n = inner.derivs.size():
/// exp(g0) * B_n(g', ..., g^(n)). Evaluated as sign(B) exp(g0 + log|B|) so a
/// large Bell value or a very negative g0 does not overflow prematurely.
double faa_di_bruno_exp(const InnerDerivatives& inner);

/// Taylor coefficients a_k = (d^k/dx^k exp(g))(x0) / k!, k = 0..n, from the
/// recurrence k a_k = sum_{j=1}^{k} j c_j a_{k-j}, c_j = g^(j)(x0)/j!.
/// Same content as faa_di_bruno_exp for every order, without the k! growth.
std::vector<double> exp_taylor_coefficients(const InnerDerivatives& inner);

/// Chebyshev interpolant on [a,b] in the "-c0/2 + sum c_l T_l" convention.
class ChebyshevInterpolant {
public:
    ChebyshevInterpolant(double a, double b, std::vector<double> coeffs);

    /// Samples f at the p Chebyshev points of [a,b] and builds the interpolant.
    static ChebyshevInterpolant fit(const std::function<double(double)>& f, double a, double b, int p);

    /// Builds the interpolant from values already sampled at `nodes(a,b,p)`.
    static ChebyshevInterpolant from_samples(double a, double b, std::span<const double> samples);

    /// Sampling points 0.5(b-a)cos(pi(i+1/2)/p) + 0.5(a+b), i = 0..p-1.
    static std::vector<double> nodes(double a, double b, int p);

    double operator()(double s) const { return derivative(0, s); }

    /// k-th derivative of the interpolant at s0; requires k < p and s0 in [a,b].
    double derivative(int k, double s0) const;

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    int size() const noexcept { return static_cast<int>(coeffs_.size()); }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

private:
    double a_;
    double b_;
    std::vector<double> coeffs_;
};

/// k-th derivatives T_l^(k)(x) for l = 0..p-1, via
/// T_{l+1}^(k) = 2x T_l^(k) + 2k T_l^(k-1) - T_{l-1}^(k).
std::vector<double> chebyshev_t_derivatives(int k, int p, double x);

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    int evaluations = 0;
};

struct QuadOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int max_subdivisions = 4000;
    /// Length scale L of the map z = lo + L u/(1-u) used for hi = +inf.
    double scale = 1.0;
};

/// Adaptive 15-point Gauss-Kronrod quadrature with global bisection of the
/// worst interval. `hi` may be +inf. Throws NumericalError (carrying the best
/// estimate) if the tolerance is not met within max_subdivisions.
QuadResult integrate(const std::function<double(double)>& f, double lo, double hi, const QuadOptions& opts = {});

/// Vector-valued variant: every component is integrated on one shared
/// adaptive partition (error measured by the worst component). `f(z, out)`
/// writes `dim` values. Components integrated this way differ only through
/// the integrand, which keeps parametric families smooth in the parameter.
struct QuadVectorResult {
    std::vector<double> value;
    std::vector<double> err_est;
    int evaluations = 0;
};

QuadVectorResult integrate_vector(const std::function<void(double, std::span<double>)>& f, std::size_t dim, double lo,
                                  double hi, const QuadOptions& opts = {});

} // namespace corrmrc::calculus
