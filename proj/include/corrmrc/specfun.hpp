#pragma once

// Real-argument special functions: gamma family, incomplete gamma, Beta,
// Pochhammer and the Gauss hypergeometric function on (-inf, 1].

namespace corrmrc::specfun {

/// 1/Gamma(x); zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// Gamma(a)/Gamma(b) evaluated through log-gamma so that large arguments
/// do not overflow. Either argument may be negative (non-pole).
double gamma_ratio(double a, double b);

/// Digamma psi(x) = Gamma'(x)/Gamma(x). Domain error at the poles.
double digamma(double x);

/// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
/// Series for x < a+1, Lentz continued fraction otherwise.
double reg_upper_gamma(double a, double x);

/// Regularized lower incomplete gamma P(a,x) = 1 - Q(a,x).
double reg_lower_gamma(double a, double x);

/// Lower incomplete gamma gamma(a,x) = Gamma(a) P(a,x).
double lower_gamma(double a, double x);

/// Rising factorial (a)_n = a(a+1)...(a+n-1); (a)_0 = 1.
double pochhammer(double a, int n);

/// Falling factorial x(x-1)...(x-n+1) = (x-n+1)_n.
double falling_factorial(double x, int n);

/// Beta function Gamma(x)Gamma(y)/Gamma(x+y), x,y > 0.
double beta(double x, double y);

/// Gauss hypergeometric 2F1(a,b;c;z) for real z <= 1.
///
/// Evaluation strategy:
///   - terminating polynomial when a or b is a non-positive integer,
///   - Gauss series for 0 <= z <= 0.75, or up to z < 1 when c-a-b >= 8,
///   - Pfaff transformation z -> z/(z-1) for z < 0,
///   - the 1-z connection formula for 0.75 < z < 1, including the
///     logarithmic (integer c-a-b) case,
///   - Gauss summation at z = 1 (requires c-a-b > 0).
///
/// Throws DomainError for z > 1, a divergent z = 1 case, or c a
/// non-positive integer; NumericalError if a series fails to converge.
double hyp2f1(double a, double b, double c, double z);

/// Regularized 2F1(a,b;c;z)/Gamma(c); finite for every c.
double reg_hyp2f1(double a, double b, double c, double z);

} // namespace corrmrc::specfun
