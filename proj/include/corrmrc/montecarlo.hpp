#pragma once

// Monte Carlo estimator for the post-combiner SINR of an N-antenna receiver in
// a Poisson field of interferers with Nakagami fading.

#include "corrmrc/core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace corrmrc {

enum class CorrelationMode {
    exact, ///< one field, independent fading per antenna
    fc,    ///< one field, fading shared by all antennas
    nc,    ///< independent field per antenna
};

enum class Combiner { mrc, sc, single };

std::string_view to_string(CorrelationMode mode) noexcept;
std::string_view to_string(Combiner combiner) noexcept;
CorrelationMode mode_from_string(std::string_view name);
Combiner combiner_from_string(std::string_view name);

struct SimSettings {
    std::uint64_t trials = 100000;
    double region_radius = 0.0; ///< 0 selects the radius from the tail-bias rule
    std::uint64_t seed = 1;
    CorrelationMode mode = CorrelationMode::exact;
    Combiner combiner = Combiner::mrc;
    int n_branches = 2;
    unsigned threads = 0;       ///< 0 uses the hardware concurrency
};

/// Disk radius with mean truncated interference 2 pi lambda d^a R^(2-a)/(a-2)
/// at most 1e-4, and at least 20 d.
double auto_region_radius(const SystemConfig& cfg);

/// The radius a simulation will use after validation.
double effective_radius(const SystemConfig& cfg, const SimSettings& sim);

/// One realisation. Interferer positions enter only through their squared
/// distances to the receiver, so that is what is stored.
struct TrialDraw {
    std::vector<std::vector<double>> r2; ///< per antenna; identical lists unless NC
    std::vector<std::vector<double>> h;  ///< per antenna, aligned with r2
    std::vector<double> g;               ///< desired-link gain per antenna

    friend bool operator==(const TrialDraw&, const TrialDraw&) = default;
};

/// Reproducible draw from (seed, trial_index). Antenna 0 consumes the same
/// streams in every mode, so runs sharing a seed are coupled.
TrialDraw sample_trial(const SystemConfig& cfg, const SimSettings& sim, std::uint64_t trial_index);

/// Normalised interference d^alpha sum h |x|^-alpha seen by one antenna.
double interference(const TrialDraw& draw, std::size_t antenna, const SystemConfig& cfg);

/// sum_n g_n / (I_n + 1/snr)
double sinr_mrc(const TrialDraw& draw, const SystemConfig& cfg);

/// max_n g_n / (I_n + 1/snr)
double sinr_sc(const TrialDraw& draw, const SystemConfig& cfg);

/// Fraction of trials with SINR >= T, with binomial standard error.
McEstimate estimate_success(const SystemConfig& cfg, double T, const SimSettings& sim);

/// One simulation pass evaluated at several thresholds.
std::vector<McEstimate> estimate_success(const SystemConfig& cfg, std::span<const double> thresholds,
                                         const SimSettings& sim);

} // namespace corrmrc
