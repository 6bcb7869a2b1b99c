#include "corrmrc/core.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace corrmrc {

const SystemConfig& validate(const SystemConfig& c)
{
    if (!(c.lambda > 0.0) || !std::isfinite(c.lambda))
        throw DomainError("lambda", "lambda must be a positive finite density");
    if (!(c.alpha > 2.0) || !std::isfinite(c.alpha))
        throw DomainError("alpha", "alpha must exceed 2");
    if (!(c.d > 0.0) || !std::isfinite(c.d))
        throw DomainError("d", "d must be positive");
    if (!(c.m_d >= 1.0) || c.m_d != std::floor(c.m_d) || c.m_d > 1000.0)
        throw DomainError("m_d", "m_d must be a positive integer");
    if (!(c.m_i >= 0.5) || !std::isfinite(c.m_i))
        throw DomainError("m_i", "m_i must be at least 1/2");
    if (!(c.snr > 0.0))
        throw DomainError("snr", "snr must be positive (or +inf)");
    return c;
}

namespace {

constexpr std::array<std::pair<ModelTag, std::string_view>, 10> kModelNames{{
    {ModelTag::exact, "exact"},
    {ModelTag::fc, "fc"},
    {ModelTag::nc, "nc"},
    {ModelTag::asym, "asym"},
    {ModelTag::blind, "blind"},
    {ModelTag::sc, "sc"},
    {ModelTag::mmse, "mmse"},
    {ModelTag::noise_limited, "noise_limited"},
    {ModelTag::special, "special"},
    {ModelTag::single, "single"},
}};

} // namespace

std::string_view to_string(ModelTag tag) noexcept
{
    for (const auto& [t, name] : kModelNames)
        if (t == tag)
            return name;
    return "unknown";
}

ModelTag model_from_string(std::string_view name)
{
    for (const auto& [t, n] : kModelNames)
        if (n == name)
            return t;
    if (name == "noise")
        return ModelTag::noise_limited;
    throw DomainError("model", "unknown model '" + std::string(name) + "'");
}

SuccessResult make_result(double raw, double abs_err_est, ModelTag model)
{
    SuccessResult r;
    r.raw = raw;
    r.model = model;
    r.abs_err_est = std::isfinite(abs_err_est) ? std::fabs(abs_err_est) : abs_err_est;
    r.p = raw;
    if (raw < 0.0) {
        r.p = 0.0;
        r.clamped = true;
    } else if (raw > 1.0) {
        r.p = 1.0;
        r.clamped = true;
    }
    return r;
}

} // namespace corrmrc
