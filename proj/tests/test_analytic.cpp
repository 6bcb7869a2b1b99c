#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corrmrc/analytic.hpp"
#include "corrmrc/specfun.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace corrmrc;

namespace {

SystemConfig scenario(double m_d, double m_i, double snr = 1.0)
{
    SystemConfig c;
    c.m_d = m_d;
    c.m_i = m_i;
    c.snr = snr;
    return c;
}

double db(double x) { return db_to_linear(x); }

// Shared-interference model with Rayleigh desired links, written out by hand:
// P = exp(f(1)) (1 - f'(1)) with f(s) = -sT/snr - K s^delta.
double fc_rayleigh_desired(const SystemConfig& c, double T)
{
    const double de = c.delta();
    const double K = c.lambda * std::numbers::pi * c.d * c.d * std::pow(T, de) * std::tgamma(1 - de) *
                     std::tgamma(de + c.m_i) / std::tgamma(c.m_i) * std::pow(1.0 / c.m_i, de);
    const double noise = c.noise_free() ? 0.0 : T / c.snr;
    return std::exp(-noise - K) * (1 + noise + de * K);
}

} // namespace

// Reference values from an arbitrary-precision evaluation of the double
// integral form (numerical differentiation in s and t, 30 digits).
TEST_CASE("exact model against high-precision reference")
{
    struct Case {
        double alpha, m_d, m_i, T, expect;
    };
    const Case cases[] = {
        {4.0, 1, 1, 1.0, 0.505770005225748},
        {4.0, 2, 2, 1.0, 0.565755883821015},
        {3.5, 2, 1.5, 1.0, 0.540222082500060},
        {4.0, 1, 1, db(-5), 0.8104172765},
        {4.0, 1, 1, db(5), 0.07959467870},
        {4.0, 1, 1, db(10), 0.0001065434096},
    };
    for (const auto& k : cases) {
        CAPTURE(k.alpha);
        CAPTURE(k.m_d);
        CAPTURE(k.T);
        auto c = scenario(k.m_d, k.m_i);
        c.alpha = k.alpha;
        const auto r = p_mrc_exact(c, k.T);
        CHECK(std::abs(r.p - k.expect) < 1e-8);
        CHECK(r.abs_err_est < 1e-6);
    }
}

TEST_CASE("special case Rayleigh alpha 4 matches the general pipeline")
{
    for (double snr : {1.0, db(10), kInfinity}) {
        const auto c = scenario(1, 1, snr);
        for (double T : {0.01, 0.25, 1.0, 2.0, 4.0, 20.0})
            CHECK(std::abs(p_mrc_special_a4_m1(c, T).p - p_mrc_exact(c, T).p) < 1e-6);
    }
    // outage ~ kappa sqrt(T) 0.68, so 1e-6 is not yet within 1e-4 of one
    CHECK(p_mrc_special_a4_m1(scenario(1, 1), 1e-8).p > 1 - 1e-4);
    auto bad = scenario(2, 2);
    CHECK_THROWS_AS(p_mrc_special_a4_m1(bad, 1.0), DomainError);
    bad = scenario(1, 1);
    bad.alpha = 3;
    CHECK_THROWS_AS(p_mrc_special_a4_m1(bad, 1.0), DomainError);
}

TEST_CASE("vanishing density reduces to the noise-limited Gamma tail")
{
    for (double m : {1.0, 3.0}) {
        auto c = scenario(m, m, 1.0);
        c.lambda = 1e-12;
        for (double T : {0.5, 2.0}) {
            const double q = specfun::reg_upper_gamma(2 * m, m * T);
            CHECK(std::abs(p_mrc_exact(c, T).p - q) < 1e-6);
            CHECK(std::abs(p_mrc_nc(c, T).p - q) < 1e-6);
            CHECK(std::abs(p_mrc_fc(c, T).p - q) < 1e-6);
        }
    }
    auto c = scenario(1, 1, 1.0);
    CHECK(p_noise_limited(c, 1.0).p == doctest::Approx(2 * std::exp(-1.0)).epsilon(1e-14));
    c = scenario(3, 1, 4.0);
    CHECK(p_noise_limited(c, 2.0).p == doctest::Approx(specfun::reg_upper_gamma(6, 1.5)).epsilon(1e-14));
    c.snr = kInfinity;
    CHECK_THROWS_AS(p_noise_limited(c, 1.0), DomainError);
}

TEST_CASE("shared-interference model")
{
    for (double mi : {0.5, 1.0, 3.0})
        for (double snr : {1.0, kInfinity})
            for (double T : {0.1, 1.0, 7.0}) {
                const auto c = scenario(1, mi, snr);
                CHECK(p_mrc_fc(c, T).p == doctest::Approx(fc_rayleigh_desired(c, T)).epsilon(1e-12));
            }
    // one branch: every model is the single-antenna probability
    const auto c = scenario(2, 1.5);
    for (double T : {0.3, 1.0, 3.0})
        CHECK(p_mrc_fc(c, T, 1).p == doctest::Approx(p_single(c, T).p).epsilon(1e-14));
    // large orders do not overflow
    const auto big = scenario(20, 2);
    const double p = p_mrc_fc(big, 1.0, 8).p;
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p > p_mrc_fc(big, 1.0, 2).p);
}

TEST_CASE("fc approaches exact as interference fading vanishes")
{
    double last = 1.0;
    for (double mi : {1.0, 2.0, 4.0, 16.0, 64.0}) {
        const auto c = scenario(1, mi);
        const double gap = std::abs(p_mrc_fc(c, 1.0).p - p_mrc_exact(c, 1.0).p);
        CAPTURE(mi);
        CHECK(gap < last);
        last = gap;
    }
    CHECK(last < 0.01);
    CHECK(std::abs(delta_fc(scenario(1, 64), 1.0) - 1.0) < 0.02);
}

TEST_CASE("probabilities are in [0,1] and nonincreasing in T and lambda")
{
    for (auto model : {ModelTag::exact, ModelTag::nc, ModelTag::fc}) {
        for (double m : {1.0, 2.0}) {
            CAPTURE(to_string(model));
            CAPTURE(m);
            auto c = scenario(m, m);
            double last = 1.0;
            for (double tdb = -10; tdb <= 15; tdb += 2.5) {
                const double p = evaluate(model, c, db(tdb)).p;
                CHECK(p >= 0.0);
                CHECK(p <= last + 1e-9);
                last = p;
            }
            last = 1.0;
            for (double lam : {1e-5, 1e-4, 1e-3, 3e-3, 1e-2}) {
                c.lambda = lam;
                const double p = evaluate(model, c, 1.0).p;
                CHECK(p <= last + 1e-9);
                last = p;
            }
        }
    }
}

TEST_CASE("combiner ordering without noise")
{
    for (double alpha : {3.0, 4.0, 5.0}) {
        auto c = scenario(1, 1, kInfinity);
        c.alpha = alpha;
        c.d = 15;
        for (double tdb = -20; tdb <= 20; tdb += 1) {
            const double T = db(tdb);
            const double pe = p_mrc_exact(c, T).p;
            if (pe < 0.05 || pe > 0.99)
                continue;
            CAPTURE(alpha);
            CAPTURE(tdb);
            CHECK(p_sc(c, T).p <= pe + 1e-9);
            CHECK(pe <= p_mmse(c, T).p + 1e-9);
        }
    }
    const auto c = scenario(1, 1);
    for (double tdb = -15; tdb <= 0; tdb += 1) {
        const double pe = p_mrc_exact(c, db(tdb)).p;
        if (pe >= 0.8)
            CHECK(pe <= p_mrc_nc(c, db(tdb)).p + 1e-9);
    }
}

TEST_CASE("selection and MMSE closed forms")
{
    auto c = scenario(1, 1, kInfinity);
    CHECK(sc_delta_constant(c) == doctest::Approx(c.lambda * std::numbers::pi * std::numbers::pi * 50.0));
    CHECK(diversity_polynomial(1, 0.7) == 1.0);
    CHECK(diversity_polynomial(3, 0.5) == doctest::Approx(1.5 * 1.25));
    const double D = sc_delta_constant(c);
    CHECK(p_sc(c, 2.0, 1).p == doctest::Approx(std::exp(-D * std::sqrt(2.0))));
    CHECK(p_sc(c, 2.0, 2).p == doctest::Approx(2 * std::exp(-D * std::sqrt(2.0)) - std::exp(-1.5 * D * std::sqrt(2.0))));
    // single-antenna Rayleigh without noise has the same exponent
    CHECK(p_sc(c, 2.0, 1).p == doctest::Approx(p_single(c, 2.0).p).epsilon(1e-12));
    c.snr = 1.0;
    c.lambda = 1e-14;
    CHECK(p_mmse(c, 1e-4, 1).p == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    c = scenario(1, 1, kInfinity);
    c.alpha = 3;
    c.d = 15;
    CHECK(p_mmse(c, 1.0).p == doctest::Approx(specfun::reg_upper_gamma(2, sc_delta_constant(c))).epsilon(1e-13));
    CHECK_THROWS_AS(p_sc(scenario(2, 2, kInfinity), 1.0), DomainError);
    CHECK_THROWS_AS(p_sc(scenario(1, 1, 1.0), 1.0), DomainError);
    CHECK_THROWS_AS(p_mmse(scenario(2, 1, kInfinity), 1.0), DomainError);
}

TEST_CASE("low-outage expansion")
{
    const auto ck = asymptotic_c_k(scenario(1, 1, kInfinity));
    REQUIRE(ck.size() == 1);
    const double s2 = std::sqrt(2.0);
    const double c0 = 2 + std::log(6 - 4 * s2) / (2 * s2) - std::log(2 + s2) / s2;
    CHECK(ck[0] == doctest::Approx(c0).epsilon(1e-9));

    auto c = scenario(1, 1, kInfinity);
    const auto a = p_mrc_asymptotic(c, 1e-4);
    const double kappa = c.lambda * std::numbers::pi * c.d * c.d;
    CHECK(a.terms.kappa == doctest::Approx(kappa));
    CHECK(a.terms.single_antenna_term == doctest::Approx(kappa * 1e-2 * std::numbers::pi / 2).epsilon(1e-12));
    CHECK(1 - a.result.raw == doctest::Approx(kappa * 1e-2 * std::numbers::pi / 2 * (1 - 0.75 * c0)).epsilon(1e-9));

    // blind MRC with one branch is the first term
    CHECK(1 - p_blind_asymptotic(c, 1e-4, 1).raw == doctest::Approx(a.terms.single_antenna_term).epsilon(1e-12));

    for (auto cfg : {scenario(1, 1, kInfinity), scenario(2, 2, kInfinity), scenario(4, 1.5, kInfinity)}) {
        // ratio to the exact outage tends to 1
        const double T = cfg.m_d == 1 ? 1e-6 : 1e-4;
        const double r = (1 - p_mrc_exact(cfg, T).raw) / (1 - p_mrc_asymptotic(cfg, T).result.raw);
        CAPTURE(cfg.m_d);
        CHECK(std::abs(r - 1) < 0.03);
    }
    CHECK_THROWS_AS(p_mrc_asymptotic(scenario(1, 1, 1.0), 1e-3), DomainError);
}

TEST_CASE("outage slope follows T^delta")
{
    for (double alpha : {3.0, 4.0, 5.0}) {
        auto c = scenario(1, 1, kInfinity);
        c.alpha = alpha;
        const double lo = std::log(1 - p_mrc_exact(c, 1e-4).raw);
        const double hi = std::log(1 - p_mrc_exact(c, 1e-2).raw);
        const double slope = (hi - lo) / std::log(100.0);
        CAPTURE(alpha);
        CHECK(std::abs(slope / c.delta() - 1) < 0.05);
    }
}

TEST_CASE("relative outage reduction over one antenna")
{
    double last = 1.0;
    for (double alpha : {2.5, 3.0, 4.0, 5.0, 6.0}) {
        auto c = scenario(1, 1, kInfinity);
        c.alpha = alpha;
        const double r = delta_mrc_sa(c);
        CHECK(r < last);
        last = r;
    }
    for (double alpha : {3.5, 4.0, 5.0, 5.5}) {
        auto c = scenario(8, 8, kInfinity);
        c.alpha = alpha;
        CAPTURE(alpha);
        CHECK(delta_mrc_sa(c) > 0.2);
        CHECK(delta_mrc_sa(c) < 0.4);
    }
}

TEST_CASE("blind MRC matches the shared-interference outage at small T")
{
    auto c = scenario(4, 1.5, kInfinity);
    c.alpha = 3.5;
    for (double T : {1e-4, 1e-6}) {
        const double r = (1 - p_blind_asymptotic(c, T).raw) / (1 - p_mrc_fc(c, T).raw);
        CHECK(std::abs(r - 1) < 0.02);
    }
    const auto r = scenario(1, 1, kInfinity);
    CHECK((1 - p_blind_asymptotic(r, 1e-4).raw) / (1 - p_mrc_fc(r, 1e-4).raw) == doctest::Approx(1).epsilon(0.02));
}

TEST_CASE("mean SINR and diversity gains")
{
    // E[X] = 1 for an exponential variable
    CHECK(mean_sinr([](double T) { return std::exp(-T); }) == doctest::Approx(1.0).epsilon(1e-9));
    const auto same = [](double T) { return 1 / (1 + T * T); };
    CHECK(diversity_gain_db(same, same) == 0.0);

    // interference-free Rayleigh, two branches: E ratio 2 / (1 + 1/2)
    auto c = scenario(1, 1, 1.0);
    const auto mrc = [&](double T) { return p_noise_limited(c, T).p; };
    const auto sc = [&](double T) { return p_sc_noise_limited(c, T).p; };
    CHECK(diversity_gain_db(mrc, sc) == doctest::Approx(10 * std::log10(4.0 / 3.0)).epsilon(1e-8));

    for (double alpha : {2.5, 4.0}) {
        auto q = scenario(1, 1, kInfinity);
        q.alpha = alpha;
        q.d = 15;
        const double g = diversity_gain_db([&](double T) { return p_mrc_exact(q, T).p; },
                                           [&](double T) { return p_sc(q, T).p; });
        CHECK(g > 0.0);
        CHECK(g < 10 * std::log10(4.0 / 3.0));
    }
}

TEST_CASE("Chebyshev stage is converged at the default order")
{
    for (double m : {1.0, 2.0, 4.0})
        for (double tdb : {-5.0, 0.0, 5.0}) {
            const auto c = scenario(m, m);
            EvalSettings s;
            const double base = p_mrc_exact(c, db(tdb), s).p;
            s.cheb_p = c.md() + 8;
            CAPTURE(m);
            CAPTURE(tdb);
            CHECK(std::abs(p_mrc_exact(c, db(tdb), s).p - base) < 1e-7);
        }
    // the linear-variable interpolation agrees to its own accuracy
    EvalSettings lin;
    lin.log_variable = false;
    CHECK(std::abs(p_mrc_exact(scenario(2, 2), 1.0, lin).p - 0.565755883821015) < 1e-5);
}

TEST_CASE("settings and domain errors")
{
    const auto c = scenario(2, 2);
    EvalSettings s;
    s.cheb_p = 2;
    CHECK_THROWS_AS(p_mrc_exact(c, 1.0, s), DomainError);
    s = {};
    s.cheb_a = 1.1;
    CHECK_THROWS_AS(p_mrc_exact(c, 1.0, s), DomainError);
    s = {};
    s.quad_rel_tol = 0;
    CHECK_THROWS_AS(p_mrc_exact(c, 1.0, s), DomainError);
    CHECK_THROWS_AS(p_mrc_exact(c, -1.0), DomainError);
    CHECK_THROWS_AS(p_mrc_exact(scenario(1.5, 1), 1.0), DomainError);
}

TEST_CASE("transmission capacity")
{
    auto c = scenario(4, 4, db(6));
    const double T = 3;
    double last = 0;
    for (double eps : {0.05, 0.1, 0.2}) {
        const auto r = transmission_capacity(c, eps, T, ModelTag::exact);
        auto at = c;
        at.lambda = r.lambda_eps;
        CHECK(std::abs(p_mrc_exact(at, T).p - (1 - eps)) <= 1e-4);
        CHECK(r.capacity == doctest::Approx(r.lambda_eps * (1 - eps)));
        CHECK(r.capacity >= last);
        last = r.capacity;
    }
    // noise floor Q(2, 3/snr) is below 0.9 for Rayleigh
    CHECK_THROWS_AS(transmission_capacity(scenario(1, 1, db(6)), 0.1, T, ModelTag::exact), InfeasibleError);
    CHECK_NOTHROW(transmission_capacity(scenario(1, 1, db(6)), 0.3, T, ModelTag::exact));
    CHECK_THROWS_AS(transmission_capacity(c, 1.5, T, ModelTag::exact), DomainError);
}

TEST_CASE("fc deviation trends")
{
    // qualitative only: decreasing in alpha and T, dipping below one, and larger
    // when interferer fading is more variable
    const auto cfg = [](double alpha, double mi) {
        auto c = scenario(4, mi, db(10 * (4 - alpha)));
        c.alpha = alpha;
        return c;
    };
    double last = kInfinity;
    for (double alpha : {3.0, 4.0, 5.0}) {
        const double r = delta_fc(cfg(alpha, 1.5), db(-10));
        CHECK(r < last);
        last = r;
    }
    last = kInfinity;
    for (double tdb : {-10.0, -5.0, 0.0}) {
        const double r = delta_fc(cfg(3.0, 1.5), db(tdb));
        CHECK(r < last);
        last = r;
    }
    CHECK(delta_fc(cfg(3.0, 1.5), db(10)) < 1.0);
    CHECK(delta_fc(cfg(4.0, 1.5), db(-10)) > delta_fc(cfg(4.0, 4.0), db(-10)));
    CHECK(delta_fc(scenario(1, 1), 1.0) > 1.0);
}
