#include "corrmrc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace corrmrc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxMeanPoints = 5e6;

// Stream ids inside one trial.
constexpr std::uint64_t kPositions = 0;
constexpr std::uint64_t kDesired = 1;
constexpr std::uint64_t kFading = 16;           // + antenna
constexpr std::uint64_t kExtraPositions = 4096; // + antenna, NC only

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t id)
{
    return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(trial)) + id));
}

void validate(const SimSettings& sim)
{
    if (sim.trials < 1)
        throw DomainError("trials", "trials must be at least 1");
    if (sim.n_branches < 1)
        throw DomainError("n_branches", "number of branches must be at least 1");
    if (!(sim.region_radius >= 0.0) || !std::isfinite(sim.region_radius))
        throw DomainError("region_radius", "region radius must be finite and nonnegative");
}

std::vector<double> draw_positions(std::mt19937_64& rng, double mean, double radius)
{
    std::poisson_distribution<long long> count(mean);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long long n = mean > 0.0 ? count(rng) : 0;
    std::vector<double> r2(static_cast<std::size_t>(n));
    for (auto& x : r2)
        x = radius * radius * unit(rng);
    return r2;
}

std::vector<double> draw_gains(std::mt19937_64& rng, std::size_t n, double m)
{
    std::gamma_distribution<double> gamma(m, 1.0 / m);
    std::vector<double> out(n);
    for (auto& x : out)
        x = gamma(rng);
    return out;
}

template <class Visit>
void run_trials(const SystemConfig& cfg, const SimSettings& sim, Visit&& visit_range)
{
    unsigned threads = sim.threads ? sim.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, sim.trials));
    if (threads <= 1) {
        visit_range(0, sim.trials, 0u);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (sim.trials + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::uint64_t begin = w * chunk;
        const std::uint64_t end = std::min(sim.trials, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&, begin, end, w] { visit_range(begin, end, w); });
    }
    for (auto& t : pool)
        t.join();
    (void)cfg;
}

} // namespace

std::string_view to_string(CorrelationMode mode) noexcept
{
    switch (mode) {
    case CorrelationMode::exact:
        return "exact";
    case CorrelationMode::fc:
        return "fc";
    case CorrelationMode::nc:
        return "nc";
    }
    return "?";
}

std::string_view to_string(Combiner combiner) noexcept
{
    switch (combiner) {
    case Combiner::mrc:
        return "mrc";
    case Combiner::sc:
        return "sc";
    case Combiner::single:
        return "single";
    }
    return "?";
}

CorrelationMode mode_from_string(std::string_view name)
{
    if (name == "exact")
        return CorrelationMode::exact;
    if (name == "fc")
        return CorrelationMode::fc;
    if (name == "nc")
        return CorrelationMode::nc;
    throw DomainError("mode", "unknown correlation mode '" + std::string(name) + "' (expected exact, fc or nc)");
}

Combiner combiner_from_string(std::string_view name)
{
    if (name == "mrc")
        return Combiner::mrc;
    if (name == "sc")
        return Combiner::sc;
    if (name == "single")
        return Combiner::single;
    throw DomainError("combiner", "unknown combiner '" + std::string(name) + "' (expected mrc, sc or single)");
}

double auto_region_radius(const SystemConfig& cfg)
{
    validate(cfg);
    const double a = cfg.alpha;
    const double r = std::pow(2.0 * kPi * cfg.lambda * std::pow(cfg.d, a) / ((a - 2.0) * 1e-4), 1.0 / (a - 2.0));
    return std::max(r, 20.0 * cfg.d);
}

double effective_radius(const SystemConfig& cfg, const SimSettings& sim)
{
    validate(sim);
    const double r = sim.region_radius > 0.0 ? sim.region_radius : auto_region_radius(cfg);
    if (!std::isfinite(r) || cfg.lambda * kPi * r * r > kMaxMeanPoints)
        throw DomainError("region_radius", "simulation region would hold more than 5e6 interferers on average; "
                                           "set an explicit region radius");
    return r;
}

TrialDraw sample_trial(const SystemConfig& cfg, const SimSettings& sim, std::uint64_t trial_index)
{
    validate(cfg);
    const double radius = effective_radius(cfg, sim);
    const double mean = cfg.lambda * kPi * radius * radius;
    const auto n = static_cast<std::size_t>(sim.n_branches);

    TrialDraw draw;
    auto pos = stream(sim.seed, trial_index, kPositions);
    draw.r2.push_back(draw_positions(pos, mean, radius));
    for (std::size_t a = 1; a < n; ++a) {
        if (sim.mode == CorrelationMode::nc) {
            auto extra = stream(sim.seed, trial_index, kExtraPositions + a);
            draw.r2.push_back(draw_positions(extra, mean, radius));
        } else {
            draw.r2.push_back(draw.r2.front());
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        if (sim.mode == CorrelationMode::fc && a > 0) {
            draw.h.push_back(draw.h.front());
            continue;
        }
        auto fade = stream(sim.seed, trial_index, kFading + a);
        draw.h.push_back(draw_gains(fade, draw.r2[a].size(), cfg.m_i));
    }
    auto des = stream(sim.seed, trial_index, kDesired);
    draw.g = draw_gains(des, n, cfg.m_d);
    return draw;
}

double interference(const TrialDraw& draw, std::size_t antenna, const SystemConfig& cfg)
{
    const auto& r2 = draw.r2.at(antenna);
    const auto& h = draw.h.at(antenna);
    const double half = 0.5 * cfg.alpha;
    double acc = 0.0;
    if (half == 2.0) {
        for (std::size_t i = 0; i < r2.size(); ++i)
            acc += h[i] / (r2[i] * r2[i]);
    } else {
        for (std::size_t i = 0; i < r2.size(); ++i)
            acc += h[i] * std::pow(r2[i], -half);
    }
    return std::pow(cfg.d, cfg.alpha) * acc;
}

double sinr_mrc(const TrialDraw& draw, const SystemConfig& cfg)
{
    const double noise = cfg.noise_free() ? 0.0 : 1.0 / cfg.snr;
    double s = 0.0;
    for (std::size_t a = 0; a < draw.g.size(); ++a)
        s += draw.g[a] / (interference(draw, a, cfg) + noise);
    return s;
}

double sinr_sc(const TrialDraw& draw, const SystemConfig& cfg)
{
    const double noise = cfg.noise_free() ? 0.0 : 1.0 / cfg.snr;
    double best = 0.0;
    for (std::size_t a = 0; a < draw.g.size(); ++a)
        best = std::max(best, draw.g[a] / (interference(draw, a, cfg) + noise));
    return best;
}

std::vector<McEstimate> estimate_success(const SystemConfig& cfg, std::span<const double> thresholds,
                                         const SimSettings& sim)
{
    validate(cfg);
    validate(sim);
    for (double T : thresholds)
        if (!(T >= 0.0) || std::isnan(T))
            throw DomainError("T", "thresholds must be nonnegative");
    effective_radius(cfg, sim);

    SimSettings local = sim;
    if (sim.combiner == Combiner::single)
        local.n_branches = 1;
    const std::size_t nt = thresholds.size();
    const unsigned workers = sim.threads ? sim.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::vector<std::uint64_t>> hits(workers + 1, std::vector<std::uint64_t>(nt, 0));

    run_trials(cfg, local, [&](std::uint64_t begin, std::uint64_t end, unsigned w) {
        auto& mine = hits[w];
        for (std::uint64_t i = begin; i < end; ++i) {
            const auto draw = sample_trial(cfg, local, i);
            const double sinr = local.combiner == Combiner::sc ? sinr_sc(draw, cfg) : sinr_mrc(draw, cfg);
            for (std::size_t j = 0; j < nt; ++j)
                if (sinr >= thresholds[j])
                    ++mine[j];
        }
    });

    std::vector<McEstimate> out(nt);
    const double n = static_cast<double>(sim.trials);
    for (std::size_t j = 0; j < nt; ++j) {
        std::uint64_t total = 0;
        for (const auto& h : hits)
            total += h[j];
        const double p = static_cast<double>(total) / n;
        out[j] = McEstimate{p, std::sqrt(p * (1.0 - p) / n), sim.trials, sim.seed};
    }
    return out;
}

McEstimate estimate_success(const SystemConfig& cfg, double T, const SimSettings& sim)
{
    const double t[1] = {T};
    return estimate_success(cfg, std::span<const double>(t, 1), sim).front();
}

} // namespace corrmrc
