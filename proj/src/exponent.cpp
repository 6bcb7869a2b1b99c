#include "corrmrc/exponent.hpp"

#include "corrmrc/specfun.hpp"

#include <cmath>

namespace corrmrc {

namespace {

void check_point(double z, double s, double t, double T)
{
    if (!(z >= 0.0) || !std::isfinite(z))
        throw DomainError("z", "z must be a finite nonnegative number");
    if (!(s > 0.0))
        throw DomainError("s", "s must be positive");
    if (!(t > 0.0))
        throw DomainError("t", "t must be positive");
    if (!(T > 0.0) || !std::isfinite(T))
        throw DomainError("T", "threshold T must be positive and finite");
}

// d^2 Gamma(1-delta) (m_d/m_i)^delta
double scale(const SystemConfig& cfg)
{
    const double delta = cfg.delta();
    return cfg.d * cfg.d * std::tgamma(1.0 - delta) * std::pow(cfg.m_d / cfg.m_i, delta);
}

// Gamma(delta+m_i)/Gamma(m_i)
double single_moment(const SystemConfig& cfg) { return specfun::gamma_ratio(cfg.delta() + cfg.m_i, cfg.m_i); }

} // namespace

double frac_moment_H(double s, double t, double psi1, double psi2, const SystemConfig& cfg)
{
    if (!(psi1 >= 0.0) || !(psi2 >= 0.0) || (psi1 == 0.0 && psi2 == 0.0))
        throw DomainError("psi", "psi1 and psi2 must be nonnegative and not both zero");
    const double delta = cfg.delta();
    const double mi = cfg.m_i;
    const double x1 = s * psi1;
    const double x2 = t * psi2;
    if (x1 == 0.0 || x2 == 0.0)
        return std::pow((x1 + x2) / mi, delta) * single_moment(cfg);
    // Expand around the larger term so the 2F1 argument stays in [0,1).
    const double big = std::fmax(x1, x2);
    const double small = std::fmin(x1, x2);
    return std::pow(big / mi, delta) * std::tgamma(delta + 2.0 * mi) *
           specfun::reg_hyp2f1(-delta, mi, 2.0 * mi, 1.0 - small / big);
}

double exponent_A(double z, double s, double t, double T, const SystemConfig& cfg)
{
    check_point(z, s, t, T);
    const double delta = cfg.delta();
    if (z >= T)
        return std::pow(z * t, delta) * scale(cfg) * single_moment(cfg);
    const double mi = cfg.m_i;
    return std::pow(s * (T - z), delta) * scale(cfg) * std::tgamma(delta + 2.0 * mi) *
           specfun::reg_hyp2f1(-delta, mi, 2.0 * mi, 1.0 - z * t / ((T - z) * s));
}

ExponentDerivatives exponent_A_t_derivs(double z, double s, double T, const SystemConfig& cfg, int n_max)
{
    if (n_max < 0)
        throw DomainError("n_max", "derivative order must be nonnegative");
    ExponentDerivatives out;
    out.value = exponent_A(z, s, 1.0, T, cfg);
    out.t_derivs.resize(static_cast<std::size_t>(n_max));
    const double delta = cfg.delta();
    const double k = scale(cfg);
    if (z >= T) {
        const double base = k * single_moment(cfg) * std::pow(z, delta);
        for (int n = 1; n <= n_max; ++n)
            out.t_derivs[n - 1] = base * specfun::falling_factorial(delta, n);
        return out;
    }
    if (z == 0.0) {
        // every t-derivative carries z^delta (z t)^... and vanishes at z = 0
        return out;
    }
    const double mi = cfg.m_i;
    const double w = 1.0 - (T - z) * s / z;
    const double zpow = std::pow(z, delta) * k * std::tgamma(delta + 2.0 * mi);
    for (int n = 1; n <= n_max; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const double poch = specfun::pochhammer(-delta, n) * specfun::pochhammer(mi, n);
        out.t_derivs[n - 1] =
            sign * zpow * poch * specfun::reg_hyp2f1(n - delta, mi, 2.0 * mi + n, w);
    }
    return out;
}

double exponent_B(double z, double s, double t, double T, const SystemConfig& cfg)
{
    check_point(z, s, t, T);
    const double delta = cfg.delta();
    const double lower = (z < T) ? std::pow(s * (T - z), delta) : 0.0;
    return scale(cfg) * single_moment(cfg) * (lower + std::pow(z * t, delta));
}

ExponentDerivatives exponent_B_t_derivs(double z, double s, double T, const SystemConfig& cfg, int n_max)
{
    if (n_max < 0)
        throw DomainError("n_max", "derivative order must be nonnegative");
    ExponentDerivatives out;
    out.value = exponent_B(z, s, 1.0, T, cfg);
    out.t_derivs.resize(static_cast<std::size_t>(n_max));
    const double delta = cfg.delta();
    const double base = scale(cfg) * single_moment(cfg) * std::pow(z, delta);
    for (int n = 1; n <= n_max; ++n)
        out.t_derivs[n - 1] = base * specfun::falling_factorial(delta, n);
    return out;
}

} // namespace corrmrc
