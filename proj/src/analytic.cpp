#include "corrmrc/analytic.hpp"

#include "corrmrc/calculus.hpp"
#include "corrmrc/exponent.hpp"
#include "corrmrc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace corrmrc {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

constexpr double kPi = std::numbers::pi;
constexpr int kMaxExactMd = 20;

void check_threshold(double T)
{
    if (!(T > 0.0) || !std::isfinite(T))
        throw DomainError("T", "threshold T must be positive and finite");
}

void check_branches(int n)
{
    if (n < 1)
        throw DomainError("n_branches", "number of branches must be at least 1");
}

void require_noise_free(const SystemConfig& cfg, const char* what)
{
    if (!cfg.noise_free())
        throw DomainError("snr", std::string(what) + " is defined without noise; use snr = inf");
}

void require_rayleigh(const SystemConfig& cfg, const char* what)
{
    if (cfg.m_d != 1.0)
        throw DomainError("m_d", std::string(what) + " requires Rayleigh fading (m_d = 1)");
    if (cfg.m_i != 1.0)
        throw DomainError("m_i", std::string(what) + " requires Rayleigh fading (m_i = 1)");
}

double inv_snr(const SystemConfig& cfg) { return cfg.noise_free() ? 0.0 : 1.0 / cfg.snr; }

// Coefficient of z^delta in both exponents for z >= T.
double power_coefficient(const SystemConfig& cfg)
{
    const double delta = cfg.delta();
    return cfg.d * cfg.d * std::tgamma(1.0 - delta) * std::pow(cfg.m_d / cfg.m_i, delta) *
           specfun::gamma_ratio(delta + cfg.m_i, cfg.m_i);
}

// Length scale on which the kernel beyond T decays.
double tail_scale(const SystemConfig& cfg, double T)
{
    const double by_field = std::pow(1.0 / (kPi * cfg.lambda * power_coefficient(cfg)), 1.0 / cfg.delta());
    const double by_noise = cfg.noise_free() ? kInfinity : cfg.snr / cfg.m_d;
    const double z = std::min(by_field, by_noise);
    return std::isfinite(z) && z > 0.0 ? std::clamp(z, 1e-6 * T, 1e6 * T) : T;
}

template <class F>
auto with_context(const std::string& where, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const NumericalError& e) {
        throw NumericalError(where + ": " + e.what(), e.best_estimate());
    }
}

// (1/z) d^{m_d}/dt^{m_d} exp(-(T-z)^+ s m_d/snr - z t m_d/snr - pi lambda X(z,s,t)) at t = 1.
class Kernel {
public:
    Kernel(const SystemConfig& cfg, double T, bool independent)
        : cfg_(cfg), T_(T), independent_(independent), md_(cfg.md()), noise_(cfg.m_d * inv_snr(cfg)),
          pl_(kPi * cfg.lambda)
    {
        inner_.derivs.resize(static_cast<std::size_t>(md_));
    }

    double operator()(double z, double s)
    {
        z = std::max(z, 1e-300);
        const auto ed = independent_ ? exponent_B_t_derivs(z, s, T_, cfg_, md_)
                                     : exponent_A_t_derivs(z, s, T_, cfg_, md_);
        inner_.g0 = -std::max(T_ - z, 0.0) * s * noise_ - z * noise_ - pl_ * ed.value;
        for (int n = 0; n < md_; ++n)
            inner_.derivs[n] = -pl_ * ed.t_derivs[n];
        inner_.derivs[0] -= z * noise_;
        return calculus::faa_di_bruno_exp(inner_) / z;
    }

private:
    const SystemConfig& cfg_;
    double T_;
    bool independent_;
    int md_;
    double noise_;
    double pl_;
    calculus::InnerDerivatives inner_;
};

SuccessResult mrc_pipeline(const SystemConfig& cfg, double T, const EvalSettings& settings, bool independent)
{
    validate(cfg);
    validate(settings, cfg);
    check_threshold(T);
    const int md = cfg.md();
    if (md > kMaxExactMd)
        throw DomainError("m_d", "exact and NC evaluation support m_d <= " + std::to_string(kMaxExactMd));
    const ModelTag tag = independent ? ModelTag::nc : ModelTag::exact;
    const std::string name(to_string(tag));

    calculus::QuadOptions opts;
    opts.rel_tol = settings.quad_rel_tol;
    opts.abs_tol = 1e-15;

    Kernel kernel(cfg, T, independent);
    opts.scale = tail_scale(cfg, T);
    const auto upper = with_context(name + " model, z in [T, inf)", [&] {
        return calculus::integrate([&](double z) { return kernel(z, 1.0); }, T, kInfinity, opts);
    });
    opts.scale = 1.0;

    const double sign_md = (md % 2 == 0) ? 1.0 : -1.0;
    if (md == 1) {
        // Only the k = 0 term exists; V(1) is evaluated directly.
        const auto lower = with_context(name + " model, z in (0, T)", [&] {
            return calculus::integrate([&](double z) { return kernel(z, 1.0); }, 0.0, T, opts);
        });
        return make_result(sign_md * (lower.value + upper.value), lower.err_est + upper.err_est, tag);
    }

    const int p = settings.nodes_for(cfg);
    // Interpolation variable: s itself, or u = log s (the only singularity
    // of V, at s = 0, then sits at distance pi off the real axis).
    const bool logv = settings.log_variable;
    const double lo = logv ? std::log(settings.cheb_a) : settings.cheb_a;
    const double hi = logv ? std::log(settings.cheb_b) : settings.cheb_b;
    const double at = logv ? 0.0 : 1.0;
    auto nodes = calculus::ChebyshevInterpolant::nodes(lo, hi, p);
    if (logv)
        for (auto& x : nodes)
            x = std::exp(x);
    const auto lower = with_context(name + " model, z in (0, T)", [&] {
        return calculus::integrate_vector(
            [&](double z, std::span<double> out) {
                for (int l = 0; l < p; ++l)
                    out[l] = kernel(z, nodes[l]);
            },
            static_cast<std::size_t>(p), 0.0, T, opts);
    });

    std::vector<double> v(p);
    for (int l = 0; l < p; ++l)
        v[l] = lower.value[l] + upper.value;

    // d^k/ds^k at s = 1 as a linear functional of the interpolant's
    // derivatives in the interpolation variable. In log s this is
    // sum_j s(k,j) d^j/du^j with signed Stirling numbers of the first kind.
    std::vector<std::vector<double>> stirling(md, std::vector<double>(md, 0.0));
    stirling[0][0] = 1.0;
    for (int k = 1; k < md; ++k)
        for (int j = 1; j <= k; ++j)
            stirling[k][j] = stirling[k - 1][j - 1] - (k - 1) * stirling[k - 1][j];
    auto s_derivative = [&](const calculus::ChebyshevInterpolant& f, int k) {
        if (!logv || k == 0)
            return f.derivative(k, at);
        double acc = 0.0;
        for (int j = 1; j <= k; ++j)
            acc += stirling[k][j] * f.derivative(j, at);
        return acc;
    };

    const auto cheb = calculus::ChebyshevInterpolant::from_samples(lo, hi, v);
    // Propagate the per-sample quadrature and rounding error through the
    // weights of each derivative functional.
    std::vector<calculus::ChebyshevInterpolant> basis;
    std::vector<double> unit(p, 0.0);
    for (int l = 0; l < p; ++l) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[l] = 1.0;
        basis.push_back(calculus::ChebyshevInterpolant::from_samples(lo, hi, unit));
    }
    double total = 0.0;
    double err = 0.0;
    double fact = 1.0;
    const double gmd = std::tgamma(static_cast<double>(md));
    for (int k = 0; k < md; ++k) {
        if (k > 0)
            fact *= k;
        const double coef = ((k % 2 == 0) ? 1.0 : -1.0) * sign_md / (fact * gmd);
        total += coef * s_derivative(cheb, k);
        double spread = 0.0;
        for (int l = 0; l < p; ++l)
            spread += std::fabs(s_derivative(basis[l], k)) *
                      (lower.err_est[l] + upper.err_est + 1e-15 * std::fabs(v[l]));
        err += std::fabs(coef) * spread;
    }
    return make_result(total, err, tag);
}

double q_gamma(double a, double x) { return x <= 0.0 ? 1.0 : specfun::reg_upper_gamma(a, x); }

} // namespace

void validate(const EvalSettings& settings, const SystemConfig& cfg)
{
    if (!(settings.cheb_a > 0.0 && settings.cheb_a < 1.0))
        throw DomainError("cheb_a", "cheb_a must lie in (0, 1)");
    if (!(settings.cheb_b > 1.0 && std::isfinite(settings.cheb_b)))
        throw DomainError("cheb_b", "cheb_b must exceed 1");
    if (settings.cheb_p != 0 && settings.cheb_p < cfg.md() + 1)
        throw DomainError("cheb_p", "cheb_p must be at least m_d + 1");
    if (!(settings.quad_rel_tol > 0.0 && settings.quad_rel_tol < 1.0))
        throw DomainError("quad_rel_tol", "quad_rel_tol must lie in (0, 1)");
}

SuccessResult p_mrc_exact(const SystemConfig& cfg, double T, const EvalSettings& settings)
{
    return mrc_pipeline(cfg, T, settings, false);
}

SuccessResult p_mrc_nc(const SystemConfig& cfg, double T, const EvalSettings& settings)
{
    return mrc_pipeline(cfg, T, settings, true);
}

SuccessResult p_mrc_special_a4_m1(const SystemConfig& cfg, double T, const EvalSettings& settings)
{
    validate(cfg);
    check_threshold(T);
    if (cfg.alpha != 4.0)
        throw DomainError("alpha", "the closed special case requires alpha = 4");
    require_rayleigh(cfg, "the closed special case");
    const double ns = inv_snr(cfg);
    const double c = cfg.lambda * kPi * kPi * cfg.d * cfg.d / 2.0;
    // With r = sqrt((T-z)^+) and q = sqrt(z), the kernel (r^3 - q^3)/(r^2 - q^2)
    // is evaluated as (r^2 + rq + q^2)/(r + q), which has no 0/0 on the diagonal.
    auto f = [&](double z) {
        const double a = std::max(T - z, 0.0);
        const double r = std::sqrt(a);
        const double q = std::sqrt(z);
        const double sum = r + q;
        const double k = (r * r + r * q + q * q) / sum;
        const double dk = (2.0 * r + q) / (2.0 * sum * sum);
        return std::exp(-a * ns - z * ns - c * k) * (ns + c * dk);
    };
    calculus::QuadOptions opts;
    opts.rel_tol = settings.quad_rel_tol;
    opts.abs_tol = 1e-15;
    const auto lower = with_context("special model, z in (0, T)", [&] { return calculus::integrate(f, 0.0, T, opts); });
    opts.scale = tail_scale(cfg, T);
    const auto upper =
        with_context("special model, z in [T, inf)", [&] { return calculus::integrate(f, T, kInfinity, opts); });
    return make_result(lower.value + upper.value, lower.err_est + upper.err_est, ModelTag::special);
}

SuccessResult p_mrc_fc(const SystemConfig& cfg, double T, int n_branches)
{
    validate(cfg);
    check_threshold(T);
    check_branches(n_branches);
    const double delta = cfg.delta();
    const double gamma = cfg.lambda * kPi * cfg.d * cfg.d * std::pow(T, delta) * std::tgamma(1.0 - delta) *
                         specfun::gamma_ratio(delta + cfg.m_i, cfg.m_i) * std::pow(cfg.m_d / cfg.m_i, delta);
    const double noise = cfg.m_d * T * inv_snr(cfg);
    const int terms = n_branches * cfg.md();
    calculus::InnerDerivatives inner;
    inner.g0 = -noise - gamma;
    inner.derivs.resize(static_cast<std::size_t>(terms - 1));
    for (int n = 1; n < terms; ++n)
        inner.derivs[n - 1] = -gamma * specfun::falling_factorial(delta, n);
    if (terms > 1)
        inner.derivs[0] -= noise;
    const auto a = calculus::exp_taylor_coefficients(inner);
    double p = 0.0;
    for (int k = 0; k < terms; ++k)
        p += ((k % 2 == 0) ? 1.0 : -1.0) * a[k];
    return make_result(p, 1e-15 * terms, n_branches == 1 ? ModelTag::single : ModelTag::fc);
}

SuccessResult p_single(const SystemConfig& cfg, double T)
{
    auto r = p_mrc_fc(cfg, T, 1);
    r.model = ModelTag::single;
    return r;
}

SuccessResult p_noise_limited(const SystemConfig& cfg, double T)
{
    validate(cfg);
    check_threshold(T);
    if (cfg.noise_free())
        throw DomainError("snr", "the interference-free limit needs a finite snr");
    return make_result(q_gamma(2.0 * cfg.m_d, cfg.m_d * T / cfg.snr), 1e-15, ModelTag::noise_limited);
}

SuccessResult p_sc_noise_limited(const SystemConfig& cfg, double T, int n_branches)
{
    validate(cfg);
    check_threshold(T);
    check_branches(n_branches);
    if (cfg.noise_free())
        throw DomainError("snr", "the interference-free limit needs a finite snr");
    const double out1 = specfun::reg_lower_gamma(cfg.m_d, cfg.m_d * T / cfg.snr);
    return make_result(1.0 - std::pow(out1, n_branches), 1e-15, ModelTag::sc);
}

std::vector<double> asymptotic_c_k(const SystemConfig& cfg)
{
    validate(cfg);
    const double delta = cfg.delta();
    const double md = cfg.m_d;
    const double mi = cfg.m_i;
    std::vector<double> out;
    calculus::QuadOptions opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-15;
    for (int k = 0; k < cfg.md(); ++k) {
        const double a = -delta + md + k;
        const double b = mi + k;
        const double c = 2.0 * mi + md + k;
        // u < 1/2: the argument (2u-1)/u runs to -inf, so integrate the Pfaff
        // image 2F1(b, c-a; c; (1-2u)/(1-u)) (u/(1-u))^b instead.
        auto left = [&](double u) {
            return std::pow(u, delta - 1.0 + mi) * std::pow(1.0 - u, -mi) *
                   specfun::reg_hyp2f1(b, c - a, c, (1.0 - 2.0 * u) / (1.0 - u));
        };
        auto right = [&](double u) {
            return std::pow(u, delta - 1.0 - k) * std::pow(1.0 - u, k) *
                   specfun::reg_hyp2f1(a, b, c, (2.0 * u - 1.0) / u);
        };
        const std::string where = "C_" + std::to_string(k);
        const auto l = with_context(where, [&] { return calculus::integrate(left, 0.0, 0.5, opts); });
        const auto r = with_context(where, [&] { return calculus::integrate(right, 0.5, 1.0, opts); });
        out.push_back(l.value + r.value);
    }
    return out;
}

AsymptoticResult p_mrc_asymptotic(const SystemConfig& cfg, double T)
{
    validate(cfg);
    check_threshold(T);
    require_noise_free(cfg, "the low-outage expansion");
    const double delta = cfg.delta();
    const double md = cfg.m_d;
    const double mi = cfg.m_i;
    AsymptoticResult out;
    auto& terms = out.terms;
    terms.kappa = kPi * cfg.lambda * cfg.d * cfg.d * std::pow(md / mi, delta);
    const double kt = terms.kappa * std::pow(T, delta);
    terms.single_antenna_term =
        kt * specfun::gamma_ratio(md - delta, md) * specfun::gamma_ratio(mi + delta, mi);
    terms.c_k = asymptotic_c_k(cfg);
    double sum = 0.0;
    for (int k = 0; k < cfg.md(); ++k)
        sum += std::tgamma(-delta + md + k) * terms.c_k[k] / (specfun::beta(mi, k + 1.0) * (mi + k));
    terms.mrc_gain_term = delta * kt * std::tgamma(2.0 * mi + delta) / specfun::beta(mi, md) * sum;
    out.result = make_result(1.0 - terms.single_antenna_term + terms.mrc_gain_term, 1e-10 * kt, ModelTag::asym);
    return out;
}

SuccessResult p_blind_asymptotic(const SystemConfig& cfg, double T, int n_branches)
{
    validate(cfg);
    check_threshold(T);
    check_branches(n_branches);
    require_noise_free(cfg, "the interference-blind expansion");
    const double delta = cfg.delta();
    const double kappa = kPi * cfg.lambda * cfg.d * cfg.d * std::pow(cfg.m_d / cfg.m_i, delta);
    const double nm = n_branches * cfg.m_d;
    const double outage = kappa * std::pow(T, delta) * specfun::gamma_ratio(cfg.m_i + delta, cfg.m_i) *
                          specfun::gamma_ratio(nm - delta, nm);
    return make_result(1.0 - outage, 1e-15, ModelTag::blind);
}

double sc_delta_constant(const SystemConfig& cfg)
{
    return cfg.lambda * (2.0 * kPi * kPi / cfg.alpha) * cfg.d * cfg.d / std::sin(2.0 * kPi / cfg.alpha);
}

double diversity_polynomial(int n, double x)
{
    double p = 1.0;
    for (int i = 1; i < n; ++i)
        p *= 1.0 + x / i;
    return p;
}

SuccessResult p_sc(const SystemConfig& cfg, double T, int n_branches)
{
    validate(cfg);
    check_threshold(T);
    check_branches(n_branches);
    require_rayleigh(cfg, "selection combining");
    require_noise_free(cfg, "selection combining under interference");
    const double delta = cfg.delta();
    const double base = sc_delta_constant(cfg) * std::pow(T, delta);
    double p = 0.0;
    double binom = 1.0;
    for (int n = 1; n <= n_branches; ++n) {
        binom = binom * (n_branches - n + 1) / n;
        p += ((n % 2 == 1) ? 1.0 : -1.0) * binom * std::exp(-base * diversity_polynomial(n, delta));
    }
    return make_result(p, 1e-15 * n_branches, ModelTag::sc);
}

SuccessResult p_mmse(const SystemConfig& cfg, double T, int n_branches)
{
    validate(cfg);
    check_threshold(T);
    check_branches(n_branches);
    require_rayleigh(cfg, "MMSE combining");
    const double x = sc_delta_constant(cfg) * std::pow(T, cfg.delta()) +
                     std::pow(cfg.d, cfg.alpha) * T * inv_snr(cfg);
    return make_result(q_gamma(n_branches, x), 1e-15, ModelTag::mmse);
}

double mean_sinr(const SuccessCurve& curve, double rel_tol)
{
    // Panels [0,1], [1,2], [2,4], ... until a panel no longer contributes.
    calculus::QuadOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-16;
    double total = with_context("mean SINR", [&] { return calculus::integrate(curve, 0.0, 1.0, opts).value; });
    double lo = 1.0;
    for (int panel = 0; panel < 400; ++panel) {
        const double hi = 2.0 * lo;
        const double part =
            with_context("mean SINR", [&] { return calculus::integrate(curve, lo, hi, opts).value; });
        total += part;
        if (std::fabs(part) <= 1e-12 * std::fabs(total) && std::fabs(curve(hi)) * hi <= 1e-12 * std::fabs(total))
            return total;
        lo = hi;
    }
    throw NumericalError("mean SINR: success curve does not decay fast enough to be integrable", total);
}

double diversity_gain_db(const SuccessCurve& curve_a, const SuccessCurve& curve_b, double rel_tol)
{
    const double a = mean_sinr(curve_a, rel_tol);
    const double b = mean_sinr(curve_b, rel_tol);
    if (!(a > 0.0) || !(b > 0.0))
        throw NumericalError("diversity gain: mean SINR is not positive");
    return 10.0 * std::log10(a / b);
}

double delta_fc(const SystemConfig& cfg, double T, const EvalSettings& settings)
{
    const double exact = p_mrc_exact(cfg, T, settings).raw;
    const double fc = p_mrc_fc(cfg, T, 2).raw;
    if (1.0 - exact < 1e-12)
        throw NumericalError("deviation undefined: exact outage below 1e-12");
    return (1.0 - fc) / (1.0 - exact);
}

double delta_mrc_sa(const SystemConfig& cfg)
{
    const auto a = p_mrc_asymptotic(cfg, 1.0);
    return a.terms.mrc_gain_term / a.terms.single_antenna_term;
}

SuccessResult evaluate(ModelTag model, const SystemConfig& cfg, double T, const EvalSettings& settings,
                       int n_branches)
{
    switch (model) {
    case ModelTag::exact:
        return p_mrc_exact(cfg, T, settings);
    case ModelTag::nc:
        return p_mrc_nc(cfg, T, settings);
    case ModelTag::special:
        return p_mrc_special_a4_m1(cfg, T, settings);
    case ModelTag::fc:
        return p_mrc_fc(cfg, T, n_branches);
    case ModelTag::single:
        return p_single(cfg, T);
    case ModelTag::noise_limited:
        return p_noise_limited(cfg, T);
    case ModelTag::asym:
        return p_mrc_asymptotic(cfg, T).result;
    case ModelTag::blind:
        return p_blind_asymptotic(cfg, T, n_branches);
    case ModelTag::sc:
        return p_sc(cfg, T, n_branches);
    case ModelTag::mmse:
        return p_mmse(cfg, T, n_branches);
    }
    throw DomainError("model", "unknown model");
}

CapacityResult transmission_capacity(const SystemConfig& cfg, double eps, double T, ModelTag model,
                                     const EvalSettings& settings, int n_branches)
{
    validate(cfg);
    check_threshold(T);
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("eps", "outage target eps must lie in (0, 1)");
    const double target = 1.0 - eps;
    auto success = [&](double lambda) {
        SystemConfig c = cfg;
        c.lambda = lambda;
        return evaluate(model, c, T, settings, n_branches).raw;
    };

    CapacityResult out;
    // A density with 1e-12 expected interferers inside the link distance.
    double lo = 1e-12 / (kPi * cfg.d * cfg.d);
    const double floor = success(lo);
    if (floor < target)
        throw InfeasibleError("outage target eps = " + num(eps) +
                              " is infeasible: even without interferers the success probability is " +
                              num(floor));
    double hi = 1.0 / (kPi * cfg.d * cfg.d);
    double p_hi = success(hi);
    for (int i = 0; p_hi >= target; ++i) {
        if (i > 60)
            throw NumericalError("transmission capacity: no density violates the outage target");
        lo = hi;
        hi *= 4.0;
        p_hi = success(hi);
    }
    double p_lo = floor;
    for (int it = 0; it < 200; ++it) {
        out.iterations = it + 1;
        if (hi / lo - 1.0 < 1e-12)
            break;
        const double mid = std::sqrt(lo * hi);
        const double pm = success(mid);
        if (pm >= target) {
            lo = mid;
            p_lo = pm;
        } else {
            hi = mid;
        }
        if (std::fabs(p_lo - target) < 1e-10)
            break;
    }
    out.lambda_eps = lo;
    out.p_at_lambda = p_lo == floor ? success(lo) : p_lo;
    out.capacity = lo * (1.0 - eps);
    return out;
}

} // namespace corrmrc
