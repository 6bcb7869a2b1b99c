#include "corrmrc/specfun.hpp"

#include "corrmrc/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace corrmrc::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 20000;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// log|Gamma(x)| with the sign of Gamma(x). lgamma_r does not touch signgam.
double lgamma_signed(double x, int& sign)
{
    int s = 1;
    const double v = ::lgamma_r(x, &s);
    sign = s;
    return v;
}

// Prod Gamma(num_i) / Prod Gamma(den_j); a pole in a denominator gives 0.
template <int N, int M>
double gamma_fraction(const double (&num)[N], const double (&den)[M])
{
    double log_mag = 0.0;
    int sign = 1;
    for (double x : den) {
        if (is_nonpositive_integer(x))
            return 0.0;
        int s = 1;
        log_mag -= lgamma_signed(x, s);
        sign *= s;
    }
    for (double x : num) {
        if (is_nonpositive_integer(x))
            throw DomainError("gamma", "gamma pole at " + std::to_string(x));
        int s = 1;
        log_mag += lgamma_signed(x, s);
        sign *= s;
    }
    return sign * std::exp(log_mag);
}

double series(double a, double b, double c, double z)
{
    double term = 1.0;
    double sum = 1.0;
    int small_run = 0;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (term == 0.0)
            return sum;
        if (std::fabs(term) <= kEps * 0.25 * std::fabs(sum)) {
            if (++small_run >= 2)
                return sum;
        } else {
            small_run = 0;
        }
    }
    throw NumericalError("hyp2f1: Gauss series did not converge", sum);
}

// Terminating case: a = -n. Valid for every finite z.
double polynomial(double a, double b, double c, double z)
{
    const int n = static_cast<int>(-a);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < n; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
    }
    return sum;
}

// 2F1(a, b; a+b+m; 1-y) for integer m >= 0 and 0 < y < 1 (logarithmic case).
double log_case(double a, double b, int m, double y)
{
    const double c = a + b + m;
    double first = 0.0;
    if (m > 0) {
        double term = 1.0;
        double sum = 1.0;
        for (int n = 0; n + 1 < m; ++n) {
            term *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * y;
            sum += term;
        }
        first = gamma_fraction<2, 2>({static_cast<double>(m), c}, {a + m, b + m}) * sum;
    }

    const double pref = gamma_fraction<1, 2>({c}, {a, b});
    if (pref == 0.0)
        return first;

    const double log_y = std::log(y);
    double coef = 1.0 / std::tgamma(m + 1.0); // (a+m)_n (b+m)_n / (n! (n+m)!) y^n
    double psi1 = digamma(1.0);
    double psi2 = digamma(m + 1.0);
    double psia = digamma(a + m);
    double psib = digamma(b + m);
    double sum = 0.0;
    int small_run = 0;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        const double term = coef * (log_y - psi1 - psi2 + psia + psib);
        sum += term;
        if (std::fabs(term) <= kEps * 0.25 * std::fabs(sum) || coef == 0.0) {
            if (++small_run >= 2) {
                const double sign_m = (m % 2 == 0) ? 1.0 : -1.0;
                return first - pref * sign_m * std::pow(y, m) * sum;
            }
        } else {
            small_run = 0;
        }
        coef *= (a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0)) * y;
        psi1 += 1.0 / (n + 1.0);
        psi2 += 1.0 / (n + m + 1.0);
        psia += 1.0 / (a + m + n);
        psib += 1.0 / (b + m + n);
    }
    throw NumericalError("hyp2f1: logarithmic connection series did not converge");
}

// Non-degenerate connection formula for 2F1(a,b;c;1-y).
double connection(double a, double b, double c, double y)
{
    const double s = c - a - b;
    const double t1 = gamma_fraction<2, 2>({c, s}, {c - a, c - b});
    const double f1 = t1 == 0.0 ? 0.0 : series(a, b, 1.0 - s, y);
    const double t2 = gamma_fraction<2, 2>({c, -s}, {a, b});
    const double f2 = t2 == 0.0 ? 0.0 : series(c - a, c - b, s + 1.0, y);
    return t1 * f1 + std::pow(y, s) * t2 * f2;
}

// 2F1(a,b;c;1-y) for 0 < y < 0.25.
double near_one(double a, double b, double c, double y)
{
    const double s = c - a - b;
    const double m = std::round(s);
    const double dist = s - m;
    // Within this distance of an integer the connection coefficients cancel
    // catastrophically; interpolate in c through the exact logarithmic case.
    constexpr double kBand = 2e-4;

    auto exact_integer = [&](double cc) {
        const int mi = static_cast<int>(std::round(cc - a - b));
        if (mi >= 0)
            return log_case(a, b, mi, y);
        // Euler: F(a,b;c;z) = (1-z)^{c-a-b} F(c-a,c-b;c;z), whose excess is -mi.
        return std::pow(y, cc - a - b) * log_case(cc - a, cc - b, -mi, y);
    };

    if (std::fabs(dist) < 1e-13 * std::fmax(1.0, std::fabs(s)))
        return exact_integer(a + b + m);
    if (std::fabs(dist) >= kBand)
        return connection(a, b, c, y);

    const double c0 = a + b + m;
    const double fm = connection(a, b, c0 - kBand, y);
    const double f0 = exact_integer(c0);
    const double fp = connection(a, b, c0 + kBand, y);
    const double u = dist / kBand;
    return f0 + 0.5 * u * (fp - fm) + 0.5 * u * u * (fp - 2.0 * f0 + fm);
}

// z and y = 1 - z are passed separately so that y keeps full relative
// precision when it comes from the Pfaff map of a large negative argument.
double hyp2f1_impl(double a, double b, double c, double z, double y)
{
    if (std::isnan(a) || std::isnan(b) || std::isnan(c) || std::isnan(z))
        throw DomainError("hyp2f1", "hyp2f1: NaN argument");
    if (z > 1.0)
        throw DomainError("hyp2f1", "hyp2f1: argument z > 1");
    if (is_nonpositive_integer(c)) {
        // Only well defined as a polynomial that terminates before the pole.
        const bool a_ok = is_nonpositive_integer(a) && a > c;
        const bool b_ok = is_nonpositive_integer(b) && b > c;
        if (!a_ok && !b_ok)
            throw DomainError("hyp2f1", "hyp2f1: c is a non-positive integer");
    }
    if (z == 0.0)
        return 1.0;
    if (is_nonpositive_integer(a))
        return polynomial(a, b, c, z);
    if (is_nonpositive_integer(b))
        return polynomial(b, a, c, z);

    if (y == 0.0) {
        if (!(c - a - b > 0.0))
            throw DomainError("hyp2f1", "hyp2f1: divergent at z = 1 (c-a-b <= 0)");
        return gamma_fraction<2, 2>({c, c - a - b}, {c - a, c - b});
    }
    if (z < 0.0) {
        // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)), or the same
        // with a and b swapped; keep the image whose c-a-b is larger.
        const double w = z / (z - 1.0);
        const double yw = 1.0 / (1.0 - z);
        if (b - a > a - b)
            return std::pow(yw, a) * hyp2f1_impl(a, c - b, c, w, yw);
        return std::pow(yw, b) * hyp2f1_impl(b, c - a, c, w, yw);
    }
    // With a large excess c-a-b the terms decay like n^(a+b-c-1) even at
    // z = 1, while the connection formula would need F(a,b;a+b-c+1;1-z)
    // with a strongly negative third parameter.
    if (z <= 0.75 || c - a - b >= 8.0)
        return series(a, b, c, z);
    return near_one(a, b, c, y);
}

} // namespace

double rgamma(double x)
{
    if (is_nonpositive_integer(x))
        return 0.0;
    if (x > 0.0 && x < 170.0)
        return 1.0 / std::tgamma(x);
    int s = 1;
    const double lg = lgamma_signed(x, s);
    return s * std::exp(-lg);
}

double gamma_ratio(double a, double b)
{
    return gamma_fraction<1, 1>({a}, {b});
}

double digamma(double x)
{
    if (is_nonpositive_integer(x))
        throw DomainError("digamma", "digamma pole at " + std::to_string(x));
    double result = 0.0;
    if (x < 0.0) {
        // psi(x) = psi(1-x) - pi cot(pi x)
        result = -std::numbers::pi / std::tan(std::numbers::pi * x);
        x = 1.0 - x;
    }
    while (x < 16.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    const double tail = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))));
    return result + std::log(x) - 0.5 / x - tail;
}

namespace {

// P(a,x) by series, valid (fast) for x < a+1.
double lower_series(double a, double x)
{
    int s = 1;
    const double log_pref = -x + a * std::log(x) - lgamma_signed(a + 1.0, s);
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < sum * kEps * 0.5)
            return sum * std::exp(log_pref);
    }
    throw NumericalError("reg_lower_gamma: series did not converge");
}

// Q(a,x) by modified Lentz continued fraction, valid for x >= a+1.
double upper_fraction(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            break;
    }
    int s = 1;
    return std::exp(-x + a * std::log(x) - lgamma_signed(a, s)) * h;
}

void check_incomplete_args(double a, double x)
{
    if (!(a > 0.0))
        throw DomainError("a", "incomplete gamma requires a > 0");
    if (!(x >= 0.0))
        throw DomainError("x", "incomplete gamma requires x >= 0");
}

} // namespace

double reg_upper_gamma(double a, double x)
{
    check_incomplete_args(a, x);
    if (x == 0.0)
        return 1.0;
    if (x == kInfinity)
        return 0.0;
    if (x < a + 1.0)
        return 1.0 - lower_series(a, x);
    return upper_fraction(a, x);
}

double reg_lower_gamma(double a, double x)
{
    check_incomplete_args(a, x);
    if (x == 0.0)
        return 0.0;
    if (x == kInfinity)
        return 1.0;
    if (x < a + 1.0)
        return lower_series(a, x);
    return 1.0 - upper_fraction(a, x);
}

double lower_gamma(double a, double x)
{
    return std::tgamma(a) * reg_lower_gamma(a, x);
}

double pochhammer(double a, int n)
{
    double r = 1.0;
    for (int k = 0; k < n; ++k)
        r *= a + k;
    return r;
}

double falling_factorial(double x, int n)
{
    double r = 1.0;
    for (int k = 0; k < n; ++k)
        r *= x - k;
    return r;
}

double beta(double x, double y)
{
    if (!(x > 0.0) || !(y > 0.0))
        throw DomainError("beta", "beta requires positive arguments");
    int sx = 1, sy = 1, sxy = 1;
    return std::exp(lgamma_signed(x, sx) + lgamma_signed(y, sy) - lgamma_signed(x + y, sxy));
}

double hyp2f1(double a, double b, double c, double z)
{
    return hyp2f1_impl(a, b, c, z, 1.0 - z);
}

double reg_hyp2f1(double a, double b, double c, double z)
{
    if (is_nonpositive_integer(c)) {
        // F(a,b;-n;z)/Gamma(-n) = (a)_{n+1}(b)_{n+1} z^{n+1} F(a+n+1,b+n+1;n+2;z)/Gamma(n+2)
        const int n = static_cast<int>(-c);
        const double k = n + 1.0;
        const double pref = pochhammer(a, n + 1) * pochhammer(b, n + 1) * std::pow(z, k);
        if (pref == 0.0)
            return 0.0;
        return pref * reg_hyp2f1(a + k, b + k, k + 1.0, z);
    }
    return hyp2f1_impl(a, b, c, z, 1.0 - z) * rgamma(c);
}

} // namespace corrmrc::specfun
