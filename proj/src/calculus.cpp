#include "corrmrc/calculus.hpp"

#include "corrmrc/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

namespace corrmrc::calculus {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

double complete_bell(std::span<const double> x)
{
    const std::size_t n = x.size();
    std::vector<double> bell(n + 1, 0.0);
    bell[0] = 1.0;
    std::vector<double> binom{1.0}; // row k of Pascal's triangle
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= k; ++i)
            acc += binom[i] * bell[k - i] * x[i];
        bell[k + 1] = acc;
        std::vector<double> next(k + 2, 1.0);
        for (std::size_t i = 1; i <= k; ++i)
            next[i] = binom[i - 1] + binom[i];
        binom = std::move(next);
    }
    return bell[n];
}

double faa_di_bruno_exp(const InnerDerivatives& inner)
{
    const double b = complete_bell(inner.derivs);
    if (b == 0.0)
        return 0.0;
    return std::copysign(std::exp(inner.g0 + std::log(std::fabs(b))), b);
}

std::vector<double> exp_taylor_coefficients(const InnerDerivatives& inner)
{
    const std::size_t n = inner.derivs.size();
    std::vector<double> c(n + 1, 0.0);
    double fact = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        fact *= static_cast<double>(j);
        c[j] = inner.derivs[j - 1] / fact;
    }
    std::vector<double> a(n + 1, 0.0);
    a[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            acc += static_cast<double>(j) * c[j] * a[k - j];
        a[k] = acc / static_cast<double>(k);
    }
    const double e = std::exp(inner.g0);
    for (auto& v : a)
        v *= e;
    return a;
}

// ---------------------------------------------------------------------------

ChebyshevInterpolant::ChebyshevInterpolant(double a, double b, std::vector<double> coeffs)
    : a_(a), b_(b), coeffs_(std::move(coeffs))
{
    if (!(a < b))
        throw DomainError("cheb_a", "Chebyshev interval requires a < b");
    if (coeffs_.empty())
        throw DomainError("cheb_p", "Chebyshev interpolant needs at least one coefficient");
}

std::vector<double> ChebyshevInterpolant::nodes(double a, double b, int p)
{
    if (p < 1)
        throw DomainError("cheb_p", "Chebyshev node count must be positive");
    std::vector<double> s(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
        s[i] = 0.5 * (b - a) * std::cos(std::numbers::pi * (i + 0.5) / p) + 0.5 * (a + b);
    return s;
}

ChebyshevInterpolant ChebyshevInterpolant::from_samples(double a, double b, std::span<const double> samples)
{
    const int p = static_cast<int>(samples.size());
    if (p < 1)
        throw DomainError("cheb_p", "Chebyshev node count must be positive");
    std::vector<double> c(samples.size(), 0.0);
    for (int l = 0; l < p; ++l) {
        double acc = 0.0;
        for (int i = 0; i < p; ++i)
            acc += samples[i] * std::cos(std::numbers::pi * l * (i + 0.5) / p);
        c[l] = 2.0 / p * acc;
    }
    return ChebyshevInterpolant(a, b, std::move(c));
}

ChebyshevInterpolant ChebyshevInterpolant::fit(const std::function<double(double)>& f, double a, double b, int p)
{
    const auto s = nodes(a, b, p);
    std::vector<double> v(s.size());
    std::transform(s.begin(), s.end(), v.begin(), f);
    return from_samples(a, b, v);
}

std::vector<double> chebyshev_t_derivatives(int k, int p, double x)
{
    // rows[j][l] = T_l^(j)(x)
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(k) + 1, std::vector<double>(p, 0.0));
    for (int j = 0; j <= k; ++j) {
        auto& r = rows[j];
        if (p > 0)
            r[0] = (j == 0) ? 1.0 : 0.0;
        if (p > 1)
            r[1] = (j == 0) ? x : (j == 1 ? 1.0 : 0.0);
        for (int l = 1; l + 1 < p; ++l) {
            const double lower = (j > 0) ? rows[j - 1][l] : 0.0;
            r[l + 1] = 2.0 * x * r[l] + 2.0 * j * lower - r[l - 1];
        }
    }
    return rows[k];
}

double ChebyshevInterpolant::derivative(int k, double s0) const
{
    const int p = size();
    if (k < 0 || k >= p)
        throw DomainError("k", "derivative order must satisfy 0 <= k < p");
    const double slack = 1e-12 * (b_ - a_);
    if (s0 < a_ - slack || s0 > b_ + slack)
        throw DomainError("s0", "evaluation point outside the interpolation interval");
    const double half = 0.5 * (b_ - a_);
    const double x = std::clamp((s0 - 0.5 * (a_ + b_)) / half, -1.0, 1.0);
    const auto t = chebyshev_t_derivatives(k, p, x);
    double acc = 0.0;
    for (int l = k; l < p; ++l)
        acc += coeffs_[l] * t[l];
    if (k == 0)
        acc -= 0.5 * coeffs_[0];
    return std::pow(1.0 / half, k) * acc;
}

// ---------------------------------------------------------------------------

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

constexpr double kEpmach = std::numeric_limits<double>::epsilon();
constexpr double kUflow = std::numeric_limits<double>::min();

struct Segment {
    double a;
    double b;
    std::vector<double> value;
    std::vector<double> err;
    double key; // largest component error
};

class Integrand {
public:
    Integrand(const std::function<void(double, std::span<double>)>& f, std::size_t dim, double lo, double hi,
              double scale)
        : f_(f), dim_(dim), lo_(lo), scale_(scale), infinite_(std::isinf(hi)), buf_(dim)
    {
    }

    // Writes the (possibly mapped) integrand at u into out.
    void operator()(double u, std::span<double> out)
    {
        double z = u;
        double jac = 1.0;
        if (infinite_) {
            const double om = 1.0 - u;
            z = lo_ + scale_ * u / om;
            jac = scale_ / (om * om);
            if (!std::isfinite(jac) || !std::isfinite(z)) {
                // the node rounded onto the point at infinity
                std::fill(out.begin(), out.end(), 0.0);
                ++evaluations;
                return;
            }
        }
        f_(z, out);
        for (std::size_t i = 0; i < dim_; ++i) {
            out[i] *= jac;
            if (!std::isfinite(out[i]))
                throw NumericalError("integrand is not finite at z = " + num(z));
        }
        ++evaluations;
    }

    int evaluations = 0;

private:
    const std::function<void(double, std::span<double>)>& f_;
    std::size_t dim_;
    double lo_;
    double scale_;
    bool infinite_;
    std::vector<double> buf_;
};

Segment kronrod15(Integrand& f, std::size_t dim, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> fc(dim), f1(dim), f2(dim);
    std::vector<std::array<double, 7>> fv1(dim), fv2(dim);

    f(center, fc);
    std::vector<double> resg(dim), resk(dim), resabs(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        resg[i] = fc[i] * kWg[3];
        resk[i] = fc[i] * kWgk[7];
        resabs[i] = std::fabs(resk[i]);
    }
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f(center - dx, f1);
        f(center + dx, f2);
        for (std::size_t i = 0; i < dim; ++i) {
            fv1[i][j] = f1[i];
            fv2[i][j] = f2[i];
            const double sum = f1[i] + f2[i];
            resk[i] += kWgk[j] * sum;
            resabs[i] += kWgk[j] * (std::fabs(f1[i]) + std::fabs(f2[i]));
            if (j % 2 == 1)
                resg[i] += kWg[j / 2] * sum;
        }
    }

    Segment seg{a, b, std::vector<double>(dim), std::vector<double>(dim), 0.0};
    const double ahalf = std::fabs(half);
    for (std::size_t i = 0; i < dim; ++i) {
        const double reskh = resk[i] * 0.5;
        double resasc = kWgk[7] * std::fabs(fc[i] - reskh);
        for (int j = 0; j < 7; ++j)
            resasc += kWgk[j] * (std::fabs(fv1[i][j] - reskh) + std::fabs(fv2[i][j] - reskh));
        const double result = resk[i] * half;
        const double rabs = resabs[i] * ahalf;
        resasc *= ahalf;
        double err = std::fabs((resk[i] - resg[i]) * half);
        if (resasc != 0.0 && err != 0.0)
            err = resasc * std::fmin(1.0, std::pow(200.0 * err / resasc, 1.5));
        if (rabs > kUflow / (50.0 * kEpmach))
            err = std::fmax(kEpmach * 50.0 * rabs, err);
        seg.value[i] = result;
        seg.err[i] = err;
        seg.key = std::fmax(seg.key, err);
    }
    return seg;
}

bool heap_less(const Segment& x, const Segment& y) { return x.key < y.key; }

} // namespace

QuadVectorResult integrate_vector(const std::function<void(double, std::span<double>)>& f, std::size_t dim, double lo,
                                  double hi, const QuadOptions& opts)
{
    if (!(opts.rel_tol > 0.0))
        throw DomainError("rel_tol", "quadrature rel_tol must be positive");
    if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo))
        throw DomainError("lo", "quadrature limits must be numbers with a finite lower limit");
    QuadVectorResult out{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0};
    if (lo == hi)
        return out;
    if (hi < lo) {
        auto r = integrate_vector(f, dim, hi, lo, opts);
        for (auto& v : r.value)
            v = -v;
        return r;
    }

    Integrand g(f, dim, lo, hi, opts.scale);
    const double a0 = std::isinf(hi) ? 0.0 : lo;
    const double b0 = std::isinf(hi) ? 1.0 : hi;

    std::vector<Segment> heap;
    std::vector<Segment> settled; // too narrow to split further
    heap.push_back(kronrod15(g, dim, a0, b0));

    auto totals = [&](std::vector<double>& val, std::vector<double>& err) {
        std::fill(val.begin(), val.end(), 0.0);
        std::fill(err.begin(), err.end(), 0.0);
        for (const auto* group : {&heap, &settled})
            for (const auto& s : *group)
                for (std::size_t i = 0; i < dim; ++i) {
                    val[i] += s.value[i];
                    err[i] += s.err[i];
                }
    };
    auto converged = [&](const std::vector<double>& val, const std::vector<double>& err) {
        for (std::size_t i = 0; i < dim; ++i)
            if (err[i] > std::fmax(opts.abs_tol, opts.rel_tol * std::fabs(val[i])))
                return false;
        return true;
    };

    std::vector<double> val(dim), err(dim);
    for (int iter = 0;; ++iter) {
        totals(val, err);
        if (converged(val, err) || heap.empty())
            break;
        if (iter >= opts.max_subdivisions) {
            out.value = val;
            out.err_est = err;
            throw NumericalError("quadrature did not converge within " + std::to_string(opts.max_subdivisions) +
                                     " subdivisions (error estimate " + num(*std::max_element(err.begin(), err.end())) + ")",
                                 val.empty() ? 0.0 : val[0]);
        }
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        Segment worst = std::move(heap.back());
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) <= 8.0 * kEpmach * std::fmax(std::fabs(worst.a), std::fabs(worst.b))) {
            // Resolution limit reached: keep the segment as is. If such
            // segments alone exceed the tolerance, no refinement can help.
            settled.push_back(std::move(worst));
            std::vector<double> se(dim, 0.0);
            for (const auto& s : settled)
                for (std::size_t i = 0; i < dim; ++i)
                    se[i] += s.err[i];
            bool hopeless = false;
            for (std::size_t i = 0; i < dim; ++i)
                hopeless |= se[i] > std::fmax(opts.abs_tol, opts.rel_tol * std::fabs(val[i]));
            if (hopeless)
                break;
            continue;
        }
        heap.push_back(kronrod15(g, dim, worst.a, mid));
        std::push_heap(heap.begin(), heap.end(), heap_less);
        heap.push_back(kronrod15(g, dim, mid, worst.b));
        std::push_heap(heap.begin(), heap.end(), heap_less);
    }
    totals(val, err);
    out.value = val;
    out.err_est = err;
    out.evaluations = g.evaluations;
    return out;
}

QuadResult integrate(const std::function<double(double)>& f, double lo, double hi, const QuadOptions& opts)
{
    const std::function<void(double, std::span<double>)> vf = [&f](double z, std::span<double> out) { out[0] = f(z); };
    const auto r = integrate_vector(vf, 1, lo, hi, opts);
    return {r.value[0], r.err_est[0], r.evaluations};
}

} // namespace corrmrc::calculus
