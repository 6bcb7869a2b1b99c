#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corrmrc/corrmrc.h"

#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace {

struct ConfigDeleter {
    void operator()(cm_config* c) const { cm_config_free(c); }
};
using Config = std::unique_ptr<cm_config, ConfigDeleter>;

Config make() { return Config(cm_config_new()); }

double get(const cm_config* c, const char* field)
{
    double v = std::nan("");
    REQUIRE(cm_config_get(c, field, &v) == CM_OK);
    return v;
}

} // namespace

TEST_CASE("config handles")
{
    auto c = make();
    REQUIRE(c);
    CHECK(get(c.get(), "lambda") == 1e-3);
    CHECK(get(c.get(), "alpha") == 4.0);
    CHECK(get(c.get(), "snr_db") == doctest::Approx(0.0));
    CHECK(get(c.get(), "n_branches") == 2.0);
    CHECK(get(c.get(), "log_variable") == 1.0);

    CHECK(cm_config_set(c.get(), "snr_db", 10.0) == CM_OK);
    CHECK(get(c.get(), "snr") == doctest::Approx(10.0));
    CHECK(cm_config_set(c.get(), "snr", std::numeric_limits<double>::infinity()) == CM_OK);
    CHECK(std::isinf(get(c.get(), "snr_db")));

    Config copy(cm_config_clone(c.get()));
    CHECK(cm_config_set(copy.get(), "d", 15.0) == CM_OK);
    CHECK(get(c.get(), "d") == 10.0);
    CHECK(get(copy.get(), "d") == 15.0);

    CHECK(cm_config_set(c.get(), "colour", 1.0) == CM_ERR_DOMAIN);
    CHECK(std::string(cm_last_error_field()) == "colour");
    CHECK(cm_config_set(c.get(), "m_d", 1.5) == CM_OK);
    CHECK(cm_config_validate(c.get()) == CM_ERR_DOMAIN);
    CHECK(std::string(cm_last_error_field()) == "m_d");
    CHECK(std::string(cm_last_error()).size() > 0);

    CHECK(cm_config_set(nullptr, "d", 1.0) == CM_ERR_NULL);
    CHECK(cm_config_get(c.get(), "d", nullptr) == CM_ERR_NULL);
    cm_config_free(nullptr);
    CHECK(std::string(cm_version()).size() > 0);
}

TEST_CASE("names")
{
    int m = -1;
    CHECK(cm_model_from_name("nc", &m) == CM_OK);
    CHECK(m == CM_MODEL_NC);
    CHECK(std::string(cm_model_name(CM_MODEL_SPECIAL)) == "special");
    CHECK(cm_model_from_name("bogus", &m) == CM_ERR_DOMAIN);
    CHECK(cm_mode_from_name("fc", &m) == CM_OK);
    CHECK(m == CM_MODE_FC);
    CHECK(cm_combiner_from_name("sc", &m) == CM_OK);
    CHECK(m == CM_COMBINER_SC);
}

TEST_CASE("success probabilities through the C interface")
{
    auto c = make();
    cm_result r{};
    REQUIRE(cm_success_probability(c.get(), CM_MODEL_EXACT, 1.0, &r) == CM_OK);
    CHECK(std::abs(r.p - 0.505770005225748) < 1e-8);
    CHECK(r.model == CM_MODEL_EXACT);
    CHECK(r.clamped == 0);

    cm_result s{};
    REQUIRE(cm_success_probability(c.get(), CM_MODEL_SPECIAL, 1.0, &s) == CM_OK);
    CHECK(std::abs(r.p - s.p) < 1e-6);

    CHECK(cm_success_probability(c.get(), CM_MODEL_EXACT, -1.0, &r) == CM_ERR_DOMAIN);
    CHECK(cm_success_probability(c.get(), 99, 1.0, &r) == CM_ERR_DOMAIN);
    CHECK(cm_success_probability(c.get(), CM_MODEL_EXACT, 1.0, nullptr) == CM_ERR_NULL);

    double dfc = 0;
    CHECK(cm_delta_fc(c.get(), 1.0, &dfc) == CM_OK);
    CHECK(dfc > 0.0);
}

TEST_CASE("asymptotic quantities")
{
    auto c = make();
    CHECK(cm_config_set(c.get(), "snr_db", std::numeric_limits<double>::infinity()) == CM_OK);
    double ratio = 0;
    CHECK(cm_delta_mrc_sa(c.get(), &ratio) == CM_OK);
    CHECK(ratio == doctest::Approx(0.5651621398).epsilon(1e-8));
    double ck[4] = {};
    size_t count = 0;
    CHECK(cm_asymptotic_c_k(c.get(), ck, 4, &count) == CM_OK);
    CHECK(count == 1);
    CHECK(ck[0] == doctest::Approx(0.753549519719537).epsilon(1e-9));
    cm_asymptotic a{};
    CHECK(cm_asymptotic_terms(c.get(), 1e-4, &a) == CM_OK);
    CHECK(a.mrc_gain_term / a.single_antenna_term == doctest::Approx(ratio));

    CHECK(cm_config_set(c.get(), "snr", 1.0) == CM_OK);
    CHECK(cm_delta_mrc_sa(c.get(), &ratio) == CM_ERR_DOMAIN);
    CHECK(std::string(cm_last_error_field()) == "snr");
}

TEST_CASE("transmission capacity status codes")
{
    auto c = make();
    CHECK(cm_config_set(c.get(), "snr_db", 6.0) == CM_OK);
    cm_capacity cap{};
    CHECK(cm_transmission_capacity(c.get(), CM_MODEL_EXACT, 0.1, 3.0, &cap) == CM_ERR_INFEASIBLE);
    REQUIRE(cm_transmission_capacity(c.get(), CM_MODEL_EXACT, 0.3, 3.0, &cap) == CM_OK);
    CHECK(std::abs(cap.p_at_lambda - 0.7) <= 1e-4);
    CHECK(cap.capacity == doctest::Approx(0.7 * cap.lambda_eps));
}

namespace {

double exp_curve(double T, void* user) { return std::exp(-T / *static_cast<double*>(user)); }

} // namespace

TEST_CASE("mean SINR and diversity gain")
{
    double two = 2.0, one = 1.0, g = 0;
    CHECK(cm_diversity_gain_db_fn(exp_curve, &two, exp_curve, &one, &g) == CM_OK);
    CHECK(g == doctest::Approx(10 * std::log10(2.0)).epsilon(1e-8));
    CHECK(cm_diversity_gain_db_fn(nullptr, nullptr, exp_curve, &one, &g) == CM_ERR_NULL);

    auto a = make();
    CHECK(cm_config_set(a.get(), "lambda", 1e-14) == CM_OK);
    double mean = 0;
    CHECK(cm_mean_sinr(a.get(), CM_MODEL_NOISE_LIMITED, &mean) == CM_OK);
    CHECK(mean == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(cm_diversity_gain_db(a.get(), CM_MODEL_NOISE_LIMITED, a.get(), CM_MODEL_NOISE_LIMITED, &g) == CM_OK);
    CHECK(g == 0.0);
}

TEST_CASE("simulation through the C interface")
{
    auto c = make();
    CHECK(cm_config_set(c.get(), "d", 5.0) == CM_OK);
    cm_sim_settings sim;
    cm_sim_settings_default(&sim);
    CHECK(sim.trials == 100000);
    CHECK(sim.n_branches == 2);
    sim.trials = 2000;
    sim.seed = 3;
    double radius = 0;
    CHECK(cm_region_radius(c.get(), &sim, &radius) == CM_OK);
    CHECK(radius > 100.0);

    const double ts[] = {0.5, 1.0, 2.0};
    cm_mc_estimate a[3], b[3];
    REQUIRE(cm_simulate(c.get(), &sim, ts, 3, a) == CM_OK);
    REQUIRE(cm_simulate(c.get(), &sim, ts, 3, b) == CM_OK);
    for (int i = 0; i < 3; ++i) {
        CHECK(a[i].mean == b[i].mean);
        CHECK(a[i].trials == 2000);
    }
    CHECK(a[0].mean >= a[1].mean);
    CHECK(a[1].mean >= a[2].mean);

    sim.mode = 7;
    CHECK(cm_simulate(c.get(), &sim, ts, 3, a) == CM_ERR_DOMAIN);
    CHECK(cm_simulate(c.get(), nullptr, ts, 3, a) == CM_ERR_NULL);
}
