#ifndef CORRMRC_H
#define CORRMRC_H

/* C interface to the corrmrc engines. All handles are opaque; every call
 * returns a cm_status and, on failure, leaves a message retrievable with
 * cm_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CM_API __declspec(dllexport)
#else
#define CM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CM_OK = 0,
    CM_ERR_DOMAIN = 1,     /* an input lies outside the formula's domain */
    CM_ERR_NUMERICAL = 2,  /* quadrature, series or root search failed */
    CM_ERR_INFEASIBLE = 3, /* outage target cannot be met */
    CM_ERR_NULL = 4,       /* a required pointer was NULL */
    CM_ERR_INTERNAL = 5
} cm_status;

typedef enum {
    CM_MODEL_EXACT = 0,
    CM_MODEL_FC,
    CM_MODEL_NC,
    CM_MODEL_ASYM,
    CM_MODEL_BLIND,
    CM_MODEL_SC,
    CM_MODEL_MMSE,
    CM_MODEL_NOISE_LIMITED,
    CM_MODEL_SPECIAL,
    CM_MODEL_SINGLE
} cm_model;

typedef enum { CM_MODE_EXACT = 0, CM_MODE_FC, CM_MODE_NC } cm_mode;
typedef enum { CM_COMBINER_MRC = 0, CM_COMBINER_SC, CM_COMBINER_SINGLE } cm_combiner;

typedef struct cm_config cm_config;

typedef struct {
    double p;       /* success probability clamped to [0,1] */
    double abs_err; /* absolute error estimate */
    double raw;     /* value before clamping */
    int clamped;
    int model;
} cm_result;

typedef struct {
    double single_antenna_term;
    double mrc_gain_term;
    double kappa;
    double p;
} cm_asymptotic;

typedef struct {
    double capacity;
    double lambda_eps;
    double p_at_lambda;
    int iterations;
} cm_capacity;

typedef struct {
    uint64_t trials;
    double region_radius; /* 0 selects the automatic radius */
    uint64_t seed;
    int mode;             /* cm_mode */
    int combiner;         /* cm_combiner */
    int n_branches;
    unsigned threads;     /* 0 uses the hardware concurrency */
} cm_sim_settings;

typedef struct {
    double mean;
    double std_err;
    uint64_t trials;
    uint64_t seed;
} cm_mc_estimate;

typedef double (*cm_curve_fn)(double T, void* user);

CM_API const char* cm_version(void);
CM_API const char* cm_last_error(void);
/* Name of the offending parameter for CM_ERR_DOMAIN, otherwise "". */
CM_API const char* cm_last_error_field(void);

/* Defaults: lambda 1e-3, alpha 4, d 10, m_d 1, m_i 1, snr 1, two branches. */
CM_API cm_config* cm_config_new(void);
CM_API cm_config* cm_config_clone(const cm_config* cfg);
CM_API void cm_config_free(cm_config* cfg);

/* Fields: lambda alpha d m_d m_i snr snr_db n_branches cheb_a cheb_b cheb_p
 * quad_rel_tol log_variable. snr and snr_db accept +inf. */
CM_API cm_status cm_config_set(cm_config* cfg, const char* field, double value);
CM_API cm_status cm_config_get(const cm_config* cfg, const char* field, double* value);
CM_API cm_status cm_config_validate(const cm_config* cfg);

CM_API cm_status cm_model_from_name(const char* name, int* model);
CM_API const char* cm_model_name(int model);
CM_API cm_status cm_mode_from_name(const char* name, int* mode);
CM_API cm_status cm_combiner_from_name(const char* name, int* combiner);

CM_API cm_status cm_success_probability(const cm_config* cfg, int model, double T, cm_result* out);
CM_API cm_status cm_delta_fc(const cm_config* cfg, double T, double* out);
CM_API cm_status cm_delta_mrc_sa(const cm_config* cfg, double* out);
CM_API cm_status cm_asymptotic_terms(const cm_config* cfg, double T, cm_asymptotic* out);
/* Writes min(capacity, m_d) values of C_k; *count receives m_d. */
CM_API cm_status cm_asymptotic_c_k(const cm_config* cfg, double* values, size_t capacity, size_t* count);
CM_API cm_status cm_transmission_capacity(const cm_config* cfg, int model, double eps, double T, cm_capacity* out);

CM_API cm_status cm_mean_sinr(const cm_config* cfg, int model, double* out);
CM_API cm_status cm_diversity_gain_db(const cm_config* cfg_a, int model_a, const cm_config* cfg_b, int model_b,
                                      double* out);
CM_API cm_status cm_diversity_gain_db_fn(cm_curve_fn curve_a, void* user_a, cm_curve_fn curve_b, void* user_b,
                                         double* out);

CM_API void cm_sim_settings_default(cm_sim_settings* sim);
CM_API cm_status cm_region_radius(const cm_config* cfg, const cm_sim_settings* sim, double* out);
CM_API cm_status cm_simulate(const cm_config* cfg, const cm_sim_settings* sim, const double* thresholds, size_t n,
                             cm_mc_estimate* out);

#ifdef __cplusplus
}
#endif

#endif
