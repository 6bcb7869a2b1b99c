#pragma once

// Success probabilities P(SINR >= T) for dual-branch MRC under correlated
// interference and the reference models around it. Inputs are linear units.

#include "corrmrc/core.hpp"

#include <functional>
#include <vector>

namespace corrmrc {

struct EvalSettings {
    double cheb_a = 0.8;
    double cheb_b = 1.2;
    int cheb_p = 0;            ///< 0 selects m_d + 5
    double quad_rel_tol = 1e-8;
    /// Interpolate V in log s on [log a, log b] (true) or in s on [a, b].
    bool log_variable = true;

    int nodes_for(const SystemConfig& cfg) const { return cheb_p > 0 ? cheb_p : cfg.md() + 5; }
};

/// Throws DomainError if the settings are unusable for this config.
void validate(const EvalSettings& settings, const SystemConfig& cfg);

/// Exact dual-branch MRC: per Chebyshev node s, integrate the m_d-th
/// t-derivative of the Laplace kernel over z; then differentiate the
/// interpolant in s. The z-integral is split at T.
SuccessResult p_mrc_exact(const SystemConfig& cfg, double T, const EvalSettings& settings = {});

/// Same pipeline with independent interference fields on the two branches.
SuccessResult p_mrc_nc(const SystemConfig& cfg, double T, const EvalSettings& settings = {});

/// Rayleigh, alpha = 4: a single elementary integral.
SuccessResult p_mrc_special_a4_m1(const SystemConfig& cfg, double T, const EvalSettings& settings = {});

/// N-branch MRC with one interference power shared by all branches.
SuccessResult p_mrc_fc(const SystemConfig& cfg, double T, int n_branches = 2);

/// Single receive antenna (the N = 1 case of every model).
SuccessResult p_single(const SystemConfig& cfg, double T);

/// Interference-free dual-branch MRC: Q(2 m_d, m_d T / snr).
SuccessResult p_noise_limited(const SystemConfig& cfg, double T);

/// Interference-free N-branch selection combining: 1 - (1 - Q(m_d, m_d T/snr))^N.
SuccessResult p_sc_noise_limited(const SystemConfig& cfg, double T, int n_branches = 2);

struct AsymptoticTerms {
    double single_antenna_term = 0.0;
    double mrc_gain_term = 0.0;
    double kappa = 0.0;
    std::vector<double> c_k;
};

struct AsymptoticResult {
    SuccessResult result;
    AsymptoticTerms terms;
};

/// Low-outage expansion without noise; both terms scale as T^delta.
AsymptoticResult p_mrc_asymptotic(const SystemConfig& cfg, double T);

/// The C_k integrals of the asymptotic expansion, k = 0..m_d-1.
std::vector<double> asymptotic_c_k(const SystemConfig& cfg);

/// Low-outage approximation for MRC with weights that ignore interference.
SuccessResult p_blind_asymptotic(const SystemConfig& cfg, double T, int n_branches = 2);

/// lambda (2 pi^2/alpha) d^2 csc(2 pi/alpha)
double sc_delta_constant(const SystemConfig& cfg);

/// prod_{i=1}^{n-1} (1 + x/i)
double diversity_polynomial(int n, double x);

/// Selection combining, Rayleigh, no noise.
SuccessResult p_sc(const SystemConfig& cfg, double T, int n_branches = 2);

/// MMSE combining, Rayleigh.
SuccessResult p_mmse(const SystemConfig& cfg, double T, int n_branches = 2);

using SuccessCurve = std::function<double(double)>;

/// E[SINR] = integral over T in (0, inf) of P(SINR >= T).
double mean_sinr(const SuccessCurve& curve, double rel_tol = 1e-8);

/// 10 log10(E[SINR_a] / E[SINR_b]).
double diversity_gain_db(const SuccessCurve& curve_a, const SuccessCurve& curve_b, double rel_tol = 1e-8);

/// (1 - P_fc) / (1 - P_exact).
double delta_fc(const SystemConfig& cfg, double T, const EvalSettings& settings = {});

/// Relative outage reduction of dual-branch MRC over one antenna in the
/// low-outage regime: mrc_gain_term / single_antenna_term.
double delta_mrc_sa(const SystemConfig& cfg);

/// Dispatch by model tag. n_branches is used by fc, blind, sc and mmse.
SuccessResult evaluate(ModelTag model, const SystemConfig& cfg, double T, const EvalSettings& settings = {},
                       int n_branches = 2);

struct CapacityResult {
    double capacity = 0.0;    ///< lambda_eps (1 - eps)
    double lambda_eps = 0.0;
    double p_at_lambda = 0.0; ///< success probability at lambda_eps
    int iterations = 0;
};

/// Largest density with success probability >= 1 - eps, by bisection in
/// log lambda. Throws InfeasibleError if even a vanishing density fails.
CapacityResult transmission_capacity(const SystemConfig& cfg, double eps, double T, ModelTag model,
                                     const EvalSettings& settings = {}, int n_branches = 2);

} // namespace corrmrc
