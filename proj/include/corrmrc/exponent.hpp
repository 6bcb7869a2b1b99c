#pragma once

// Interference exponents of the dual-branch model. A(z,s,t) couples both
// branches through one interferer field; B(z,s,t) treats the branches as
// seeing independent fields. z parametrises the split of the threshold
// between the branches, s and t are the Laplace variables of branch 1 and 2.

#include "corrmrc/core.hpp"

#include <vector>

namespace corrmrc {

struct ExponentDerivatives {
    double value = 0.0;            ///< exponent at (z, s, t=1)
    std::vector<double> t_derivs;  ///< d^n/dt^n at t=1 for n = 1..n_max
};

/// A(z,s,t). For z >= T the closed power law is used (including z == T).
double exponent_A(double z, double s, double t, double T, const SystemConfig& cfg);

/// A(z,s,1) and its t-derivatives at t=1 up to order n_max.
ExponentDerivatives exponent_A_t_derivs(double z, double s, double T, const SystemConfig& cfg, int n_max);

/// B(z,s,t) = c [(s (T-z)^+)^delta + (z t)^delta].
double exponent_B(double z, double s, double t, double T, const SystemConfig& cfg);

ExponentDerivatives exponent_B_t_derivs(double z, double s, double T, const SystemConfig& cfg, int n_max);

/// E[(s psi1 h1 + t psi2 h2)^delta] for h1, h2 ~ Gamma(m_i, 1/m_i) independent.
double frac_moment_H(double s, double t, double psi1, double psi2, const SystemConfig& cfg);

} // namespace corrmrc
