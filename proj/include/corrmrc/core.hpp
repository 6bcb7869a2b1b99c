#pragma once

// Scenario configuration and result types shared by the analytic engines and
// the Monte Carlo simulator.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace corrmrc {

/// Raised when an input lies outside the domain of a formula. `field()` names
/// the offending parameter so front ends can map it back to a flag.
class DomainError : public std::domain_error {
public:
    DomainError(std::string field, const std::string& what)
        : std::domain_error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when an iterative numerical procedure (series, quadrature,
/// root bracketing) fails to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double best_estimate = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), best_(best_estimate) {}

    double best_estimate() const noexcept { return best_; }

private:
    double best_;
};

/// The requested outage target cannot be met even without interferers.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Network scenario. All quantities are linear (SNR is not in dB).
struct SystemConfig {
    double lambda = 1e-3; ///< interferer density per unit area
    double alpha = 4.0;   ///< path-loss exponent, > 2
    double d = 10.0;      ///< desired-link distance
    double m_d = 1.0;     ///< Nakagami parameter of desired links, positive integer
    double m_i = 1.0;     ///< Nakagami parameter of interfering links, >= 1/2
    double snr = 1.0;     ///< average SNR at the receiver, may be +inf

    bool noise_free() const noexcept { return snr == kInfinity; }
    int md() const noexcept { return static_cast<int>(m_d); }
    double delta() const noexcept { return 2.0 / alpha; }

    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Throws DomainError naming the first violated constraint; otherwise returns
/// the config unchanged.
const SystemConfig& validate(const SystemConfig& config);

enum class ModelTag {
    exact,
    fc,
    nc,
    asym,
    blind,
    sc,
    mmse,
    noise_limited,
    special,
    single,
};

std::string_view to_string(ModelTag tag) noexcept;
ModelTag model_from_string(std::string_view name);

/// Success probability with numerical diagnostics.
struct SuccessResult {
    double p = 0.0;
    double abs_err_est = 0.0;
    ModelTag model = ModelTag::exact;
    bool clamped = false;    ///< raw value was outside [0,1]
    double raw = 0.0;        ///< value before clamping
};

/// Clamps `raw` into [0,1] and records whether clamping happened.
SuccessResult make_result(double raw, double abs_err_est, ModelTag model);

/// Monte Carlo estimate of a success probability.
struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

inline double db_to_linear(double db) { return db == kInfinity ? kInfinity : std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return x == kInfinity ? kInfinity : 10.0 * std::log10(x); }

} // namespace corrmrc
