#include "corrmrc/corrmrc.h"

#include "corrmrc/analytic.hpp"
#include "corrmrc/montecarlo.hpp"

#include <cmath>
#include <new>
#include <string>
#include <string_view>

struct cm_config {
    corrmrc::SystemConfig system;
    corrmrc::EvalSettings settings;
    int n_branches = 2;
};

namespace {

using corrmrc::ModelTag;

static_assert(static_cast<int>(ModelTag::exact) == CM_MODEL_EXACT);
static_assert(static_cast<int>(ModelTag::single) == CM_MODEL_SINGLE);
static_assert(static_cast<int>(ModelTag::noise_limited) == CM_MODEL_NOISE_LIMITED);
static_assert(static_cast<int>(corrmrc::CorrelationMode::nc) == CM_MODE_NC);
static_assert(static_cast<int>(corrmrc::Combiner::single) == CM_COMBINER_SINGLE);

thread_local std::string last_error;
thread_local std::string last_field;

cm_status fail(cm_status code, std::string message, std::string field = {})
{
    last_error = std::move(message);
    last_field = std::move(field);
    return code;
}

template <class F>
cm_status guarded(F&& f)
{
    try {
        last_error.clear();
        last_field.clear();
        f();
        return CM_OK;
    } catch (const corrmrc::DomainError& e) {
        return fail(CM_ERR_DOMAIN, e.what(), e.field());
    } catch (const corrmrc::InfeasibleError& e) {
        return fail(CM_ERR_INFEASIBLE, e.what());
    } catch (const corrmrc::NumericalError& e) {
        return fail(CM_ERR_NUMERICAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CM_ERR_INTERNAL, e.what());
    }
}

ModelTag to_model(int model)
{
    if (model < CM_MODEL_EXACT || model > CM_MODEL_SINGLE)
        throw corrmrc::DomainError("model", "unknown model id " + std::to_string(model));
    return static_cast<ModelTag>(model);
}

corrmrc::SimSettings to_sim(const cm_sim_settings& s)
{
    if (s.mode < CM_MODE_EXACT || s.mode > CM_MODE_NC)
        throw corrmrc::DomainError("mode", "unknown correlation mode id " + std::to_string(s.mode));
    if (s.combiner < CM_COMBINER_MRC || s.combiner > CM_COMBINER_SINGLE)
        throw corrmrc::DomainError("combiner", "unknown combiner id " + std::to_string(s.combiner));
    corrmrc::SimSettings out;
    out.trials = s.trials;
    out.region_radius = s.region_radius;
    out.seed = s.seed;
    out.mode = static_cast<corrmrc::CorrelationMode>(s.mode);
    out.combiner = static_cast<corrmrc::Combiner>(s.combiner);
    out.n_branches = s.n_branches;
    out.threads = s.threads;
    return out;
}

corrmrc::SuccessCurve curve_for(const cm_config& cfg, ModelTag model)
{
    return [cfg, model](double T) {
        if (T <= 0.0)
            return 1.0;
        return corrmrc::evaluate(model, cfg.system, T, cfg.settings, cfg.n_branches).p;
    };
}

#define CM_REQUIRE(ptr)                                                                                          \
    do {                                                                                                         \
        if (!(ptr))                                                                                              \
            return fail(CM_ERR_NULL, "argument '" #ptr "' is NULL", #ptr);                                       \
    } while (0)

} // namespace

extern "C" {

const char* cm_version(void) { return "1.0.0"; }
const char* cm_last_error(void) { return last_error.c_str(); }
const char* cm_last_error_field(void) { return last_field.c_str(); }

cm_config* cm_config_new(void) { return new (std::nothrow) cm_config{}; }

cm_config* cm_config_clone(const cm_config* cfg) { return cfg ? new (std::nothrow) cm_config(*cfg) : nullptr; }

void cm_config_free(cm_config* cfg) { delete cfg; }

cm_status cm_config_set(cm_config* cfg, const char* field, double value)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(field);
    return guarded([&] {
        const std::string_view f(field);
        auto& s = cfg->system;
        auto& e = cfg->settings;
        if (f == "lambda")
            s.lambda = value;
        else if (f == "alpha")
            s.alpha = value;
        else if (f == "d")
            s.d = value;
        else if (f == "m_d")
            s.m_d = value;
        else if (f == "m_i")
            s.m_i = value;
        else if (f == "snr")
            s.snr = value;
        else if (f == "snr_db")
            s.snr = corrmrc::db_to_linear(value);
        else if (f == "cheb_a")
            e.cheb_a = value;
        else if (f == "cheb_b")
            e.cheb_b = value;
        else if (f == "quad_rel_tol")
            e.quad_rel_tol = value;
        else if (f == "log_variable")
            e.log_variable = value != 0.0;
        else if (f == "cheb_p" || f == "n_branches") {
            if (!(value >= 0.0) || value != std::floor(value) || value > 1e6)
                throw corrmrc::DomainError(std::string(f), std::string(f) + " must be a nonnegative integer");
            (f == "cheb_p" ? e.cheb_p : cfg->n_branches) = static_cast<int>(value);
        } else
            throw corrmrc::DomainError(std::string(f), "unknown configuration field '" + std::string(f) + "'");
    });
}

cm_status cm_config_get(const cm_config* cfg, const char* field, double* value)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(field);
    CM_REQUIRE(value);
    return guarded([&] {
        const std::string_view f(field);
        const auto& s = cfg->system;
        const auto& e = cfg->settings;
        if (f == "lambda")
            *value = s.lambda;
        else if (f == "alpha")
            *value = s.alpha;
        else if (f == "d")
            *value = s.d;
        else if (f == "m_d")
            *value = s.m_d;
        else if (f == "m_i")
            *value = s.m_i;
        else if (f == "snr")
            *value = s.snr;
        else if (f == "snr_db")
            *value = corrmrc::linear_to_db(s.snr);
        else if (f == "cheb_a")
            *value = e.cheb_a;
        else if (f == "cheb_b")
            *value = e.cheb_b;
        else if (f == "cheb_p")
            *value = e.nodes_for(s);
        else if (f == "quad_rel_tol")
            *value = e.quad_rel_tol;
        else if (f == "log_variable")
            *value = e.log_variable ? 1.0 : 0.0;
        else if (f == "n_branches")
            *value = cfg->n_branches;
        else
            throw corrmrc::DomainError(std::string(f), "unknown configuration field '" + std::string(f) + "'");
    });
}

cm_status cm_config_validate(const cm_config* cfg)
{
    CM_REQUIRE(cfg);
    return guarded([&] {
        corrmrc::validate(cfg->system);
        corrmrc::validate(cfg->settings, cfg->system);
        if (cfg->n_branches < 1)
            throw corrmrc::DomainError("n_branches", "number of branches must be at least 1");
    });
}

cm_status cm_model_from_name(const char* name, int* model)
{
    CM_REQUIRE(name);
    CM_REQUIRE(model);
    return guarded([&] { *model = static_cast<int>(corrmrc::model_from_string(name)); });
}

const char* cm_model_name(int model)
{
    if (model < CM_MODEL_EXACT || model > CM_MODEL_SINGLE)
        return "unknown";
    return corrmrc::to_string(static_cast<ModelTag>(model)).data();
}

cm_status cm_mode_from_name(const char* name, int* mode)
{
    CM_REQUIRE(name);
    CM_REQUIRE(mode);
    return guarded([&] { *mode = static_cast<int>(corrmrc::mode_from_string(name)); });
}

cm_status cm_combiner_from_name(const char* name, int* combiner)
{
    CM_REQUIRE(name);
    CM_REQUIRE(combiner);
    return guarded([&] { *combiner = static_cast<int>(corrmrc::combiner_from_string(name)); });
}

cm_status cm_success_probability(const cm_config* cfg, int model, double T, cm_result* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(out);
    return guarded([&] {
        const auto r = corrmrc::evaluate(to_model(model), cfg->system, T, cfg->settings, cfg->n_branches);
        *out = cm_result{r.p, r.abs_err_est, r.raw, r.clamped ? 1 : 0, static_cast<int>(r.model)};
    });
}

cm_status cm_delta_fc(const cm_config* cfg, double T, double* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(out);
    return guarded([&] { *out = corrmrc::delta_fc(cfg->system, T, cfg->settings); });
}

cm_status cm_delta_mrc_sa(const cm_config* cfg, double* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(out);
    return guarded([&] { *out = corrmrc::delta_mrc_sa(cfg->system); });
}

cm_status cm_asymptotic_terms(const cm_config* cfg, double T, cm_asymptotic* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(out);
    return guarded([&] {
        const auto a = corrmrc::p_mrc_asymptotic(cfg->system, T);
        *out = cm_asymptotic{a.terms.single_antenna_term, a.terms.mrc_gain_term, a.terms.kappa, a.result.p};
    });
}

cm_status cm_asymptotic_c_k(const cm_config* cfg, double* values, size_t capacity, size_t* count)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(count);
    if (capacity > 0)
        CM_REQUIRE(values);
    return guarded([&] {
        const auto c = corrmrc::asymptotic_c_k(cfg->system);
        *count = c.size();
        for (size_t i = 0; i < c.size() && i < capacity; ++i)
            values[i] = c[i];
    });
}

cm_status cm_transmission_capacity(const cm_config* cfg, int model, double eps, double T, cm_capacity* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(out);
    return guarded([&] {
        const auto r =
            corrmrc::transmission_capacity(cfg->system, eps, T, to_model(model), cfg->settings, cfg->n_branches);
        *out = cm_capacity{r.capacity, r.lambda_eps, r.p_at_lambda, r.iterations};
    });
}

cm_status cm_mean_sinr(const cm_config* cfg, int model, double* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(out);
    return guarded([&] { *out = corrmrc::mean_sinr(curve_for(*cfg, to_model(model))); });
}

cm_status cm_diversity_gain_db(const cm_config* cfg_a, int model_a, const cm_config* cfg_b, int model_b, double* out)
{
    CM_REQUIRE(cfg_a);
    CM_REQUIRE(cfg_b);
    CM_REQUIRE(out);
    return guarded([&] {
        *out = corrmrc::diversity_gain_db(curve_for(*cfg_a, to_model(model_a)), curve_for(*cfg_b, to_model(model_b)));
    });
}

cm_status cm_diversity_gain_db_fn(cm_curve_fn curve_a, void* user_a, cm_curve_fn curve_b, void* user_b, double* out)
{
    CM_REQUIRE(curve_a);
    CM_REQUIRE(curve_b);
    CM_REQUIRE(out);
    return guarded([&] {
        *out = corrmrc::diversity_gain_db([&](double T) { return curve_a(T, user_a); },
                                          [&](double T) { return curve_b(T, user_b); });
    });
}

void cm_sim_settings_default(cm_sim_settings* sim)
{
    if (!sim)
        return;
    const corrmrc::SimSettings d;
    *sim = cm_sim_settings{d.trials, d.region_radius, d.seed, CM_MODE_EXACT, CM_COMBINER_MRC, d.n_branches, d.threads};
}

cm_status cm_region_radius(const cm_config* cfg, const cm_sim_settings* sim, double* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(sim);
    CM_REQUIRE(out);
    return guarded([&] { *out = corrmrc::effective_radius(corrmrc::validate(cfg->system), to_sim(*sim)); });
}

cm_status cm_simulate(const cm_config* cfg, const cm_sim_settings* sim, const double* thresholds, size_t n,
                      cm_mc_estimate* out)
{
    CM_REQUIRE(cfg);
    CM_REQUIRE(sim);
    if (n > 0) {
        CM_REQUIRE(thresholds);
        CM_REQUIRE(out);
    }
    return guarded([&] {
        const auto est = corrmrc::estimate_success(cfg->system, std::span<const double>(thresholds, n), to_sim(*sim));
        for (size_t i = 0; i < n; ++i)
            out[i] = cm_mc_estimate{est[i].mean, est[i].std_err, est[i].trials, est[i].seed};
    });
}

} // extern "C"
