// corrmrc: sweep success probabilities, Monte Carlo estimates, transmission
// capacity and asymptotic terms from the command line. Output is CSV (or
// NDJSON with --json), one row per grid point in grid order.

#include "corrmrc/corrmrc.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

// Failure carrying the process exit code.
struct CliError {
    int code;
    std::string message;
};

std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

double parse_number(const std::string& text, const std::string& flag)
{
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "inf" || t == "+inf" || t == "infinity")
        return HUGE_VAL;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw CliError{2, flag + ": cannot parse '" + text + "' as a number"};
    }
}

// "v" or "start:stop:step" (stop inclusive).
std::vector<double> parse_range(const std::string& text, const std::string& flag)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');)
        parts.push_back(item);
    if (parts.size() == 1)
        return {parse_number(parts[0], flag)};
    if (parts.size() != 3)
        throw CliError{2, flag + ": expected a value or start:stop:step, got '" + text + "'"};
    const double start = parse_number(parts[0], flag);
    const double stop = parse_number(parts[1], flag);
    const double step = parse_number(parts[2], flag);
    if (!std::isfinite(start) || !std::isfinite(stop) || !(step > 0.0) || !std::isfinite(step))
        throw CliError{2, flag + ": range needs finite start/stop and a positive step"};
    if (start > stop)
        throw CliError{2, flag + ": range start exceeds stop"};
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (n > 1000000)
        throw CliError{2, flag + ": range has more than 1e6 points"};
    std::vector<double> out;
    for (long long i = 0; i < n; ++i)
        out.push_back(start + static_cast<double>(i) * step);
    return out;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(item);
    return out;
}

const std::map<std::string, std::string>& flag_names()
{
    static const std::map<std::string, std::string> m{
        {"lambda", "--lambda"},   {"alpha", "--alpha"},         {"d", "--d"},
        {"m_d", "--m-d"},         {"m_i", "--m-i"},             {"snr", "--snr-db"},
        {"snr_db", "--snr-db"},   {"T", "--t-db"},              {"eps", "--eps"},
        {"cheb_a", "--cheb-a"},   {"cheb_b", "--cheb-b"},       {"cheb_p", "--cheb-p"},
        {"quad_rel_tol", "--quad-tol"}, {"n_branches", "--n"}, {"model", "--model"},
        {"mode", "--mode"},       {"combiner", "--combiner"},   {"trials", "--trials"},
        {"region_radius", "--radius"}, {"psi", "--t-db"},
    };
    return m;
}

CliError from_status(cm_status st, const std::string& where)
{
    const std::string msg = cm_last_error();
    if (st == CM_ERR_DOMAIN) {
        const std::string field = cm_last_error_field();
        const auto it = flag_names().find(field);
        const std::string flag = it != flag_names().end() ? it->second : field;
        return {2, flag + ": " + msg};
    }
    return {1, where + ": " + msg};
}

void check(cm_status st, const std::string& where)
{
    if (st != CM_OK)
        throw from_status(st, where);
}

using ConfigPtr = std::unique_ptr<cm_config, decltype(&cm_config_free)>;

ConfigPtr clone(const cm_config* c) { return ConfigPtr(cm_config_clone(c), cm_config_free); }

struct Common {
    std::string lambda = "1e-3";
    std::string alpha = "4";
    std::string m;
    std::string m_d = "1";
    std::string m_i = "1";
    std::string t_db = "0";
    double d = 10.0;
    std::string snr_db = "0";
    int n = 2;
    int cheb_p = 0;
    double cheb_a = 0.8;
    double cheb_b = 1.2;
    double quad_tol = 1e-8;
    bool linear_cheb = false;
    unsigned threads = 0;
    std::string out;
    bool json = false;
};

void add_common(CLI::App* app, Common& c, bool with_t)
{
    app->add_option("--lambda", c.lambda, "interferer density (value or start:stop:step)");
    app->add_option("--alpha", c.alpha, "path-loss exponent (value or range)");
    app->add_option("--d", c.d, "desired-link distance");
    auto* m = app->add_option("--m", c.m, "sets m_d = m_i (value or range)");
    auto* md = app->add_option("--m-d", c.m_d, "Nakagami m of desired links (value or range)");
    auto* mi = app->add_option("--m-i", c.m_i, "Nakagami m of interferers (value or range)");
    m->excludes(md)->excludes(mi);
    app->add_option("--snr-db", c.snr_db, "average SNR in dB, or inf");
    if (with_t)
        app->add_option("--t-db", c.t_db, "SINR threshold in dB (value or range)");
    app->add_option("--n", c.n, "number of branches for fc, blind, sc, mmse")->check(CLI::PositiveNumber);
    app->add_option("--cheb-p", c.cheb_p, "Chebyshev node count (0: m_d + 5)");
    app->add_option("--cheb-a", c.cheb_a, "Chebyshev interval start");
    app->add_option("--cheb-b", c.cheb_b, "Chebyshev interval end");
    app->add_flag("--linear-cheb", c.linear_cheb, "interpolate in s instead of log s");
    app->add_option("--quad-tol", c.quad_tol, "relative quadrature tolerance");
    app->add_option("--threads", c.threads, "worker threads (0: all cores)");
    app->add_option("--out", c.out, "write to this file instead of stdout");
    app->add_flag("--json", c.json, "emit one JSON object per row");
}

struct Point {
    double lambda, alpha, m_d, m_i, t_db;
};

std::vector<Point> grid(const Common& c, bool with_t)
{
    const auto lambdas = parse_range(c.lambda, "--lambda");
    const auto alphas = parse_range(c.alpha, "--alpha");
    std::vector<std::pair<double, double>> ms;
    if (!c.m.empty()) {
        for (double v : parse_range(c.m, "--m"))
            ms.emplace_back(v, v);
    } else {
        for (double a : parse_range(c.m_d, "--m-d"))
            for (double b : parse_range(c.m_i, "--m-i"))
                ms.emplace_back(a, b);
    }
    const auto ts = with_t ? parse_range(c.t_db, "--t-db") : std::vector<double>{0.0};
    std::vector<Point> out;
    for (double l : lambdas)
        for (double a : alphas)
            for (const auto& [md, mi] : ms)
                for (double t : ts)
                    out.push_back({l, a, md, mi, t});
    return out;
}

ConfigPtr base_config(const Common& c)
{
    ConfigPtr cfg(cm_config_new(), cm_config_free);
    if (!cfg)
        throw CliError{1, "out of memory"};
    check(cm_config_set(cfg.get(), "d", c.d), "config");
    check(cm_config_set(cfg.get(), "snr_db", parse_number(c.snr_db, "--snr-db")), "config");
    check(cm_config_set(cfg.get(), "n_branches", c.n), "config");
    check(cm_config_set(cfg.get(), "cheb_p", c.cheb_p), "config");
    check(cm_config_set(cfg.get(), "cheb_a", c.cheb_a), "config");
    check(cm_config_set(cfg.get(), "cheb_b", c.cheb_b), "config");
    check(cm_config_set(cfg.get(), "quad_rel_tol", c.quad_tol), "config");
    check(cm_config_set(cfg.get(), "log_variable", c.linear_cheb ? 0.0 : 1.0), "config");
    return cfg;
}

void apply(cm_config* cfg, const Point& p)
{
    check(cm_config_set(cfg, "lambda", p.lambda), "config");
    check(cm_config_set(cfg, "alpha", p.alpha), "config");
    check(cm_config_set(cfg, "m_d", p.m_d), "config");
    check(cm_config_set(cfg, "m_i", p.m_i), "config");
}

class Sink {
public:
    Sink(const Common& c, std::vector<std::string> header) : json_(c.json), header_(std::move(header))
    {
        if (!c.out.empty()) {
            file_ = std::fopen(c.out.c_str(), "w");
            if (!file_)
                throw CliError{2, "--out: cannot open '" + c.out + "' for writing"};
            owned_ = true;
        }
        if (!json_)
            line(header_);
    }
    ~Sink()
    {
        std::fflush(file_);
        if (owned_)
            std::fclose(file_);
    }
    Sink(const Sink&) = delete;
    Sink& operator=(const Sink&) = delete;

    // Cells are preformatted; numeric cells become JSON numbers (or null).
    void row(const std::vector<std::string>& cells)
    {
        if (!json_) {
            line(cells);
            return;
        }
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& s = cells[i];
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (!s.empty() && end && *end == '\0')
                obj[header_[i]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
            else
                obj[header_[i]] = s;
        }
        std::fprintf(file_, "%s\n", obj.dump().c_str());
    }

private:
    void line(const std::vector<std::string>& cells)
    {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i)
            s += (i ? "," : "") + cells[i];
        std::fprintf(file_, "%s\n", s.c_str());
    }

    FILE* file_ = stdout;
    bool owned_ = false;
    bool json_;
    std::vector<std::string> header_;
};

const std::vector<std::string> kHeader{"model", "t_db", "lambda", "alpha", "d", "m_d", "m_i", "snr_db", "value", "err"};

std::vector<std::string> param_cells(const std::string& model, const Point& p, double t_db, double d, double snr_db)
{
    return {model, fmt(t_db), fmt(p.lambda), fmt(p.alpha), fmt(d), fmt(p.m_d), fmt(p.m_i), fmt(snr_db)};
}

// Evaluates task(i) for i < n on a pool; results are consumed in index order.
template <class Result, class Task>
std::vector<std::optional<Result>> run_pool(std::size_t n, unsigned threads, Task&& task,
                                            std::vector<std::optional<CliError>>& errors)
{
    std::vector<std::optional<Result>> results(n);
    errors.assign(n, std::nullopt);
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                results[i] = task(i);
            } catch (const CliError& e) {
                errors[i] = e;
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto& t : pool)
            t.join();
    }
    return results;
}

int cmd_eval(const Common& c, const std::vector<std::string>& models, bool with_delta)
{
    const auto points = grid(c, true);
    const auto base = base_config(c);
    std::vector<int> ids;
    for (const auto& name : models) {
        int id = 0;
        if (cm_model_from_name(name.c_str(), &id) != CM_OK)
            throw CliError{2, "--model: unknown model '" + name + "'"};
        ids.push_back(id);
    }
    double snr_db = 0.0;
    check(cm_config_get(base.get(), "snr_db", &snr_db), "config");

    using Rows = std::vector<std::vector<std::string>>;
    std::vector<std::optional<CliError>> errors;
    const auto results = run_pool<Rows>(points.size(), c.threads,
        [&](std::size_t i) {
            const auto& p = points[i];
            auto cfg = clone(base.get());
            apply(cfg.get(), p);
            const double T = std::pow(10.0, p.t_db / 10.0);
            Rows rows;
            for (std::size_t k = 0; k < ids.size(); ++k) {
                cm_result r{};
                check(cm_success_probability(cfg.get(), ids[k], T, &r), models[k] + " at t_db=" + fmt(p.t_db));
                auto cells = param_cells(cm_model_name(ids[k]), p, p.t_db, c.d, snr_db);
                cells.push_back(fmt(r.p));
                cells.push_back(fmt(r.abs_err));
                rows.push_back(std::move(cells));
            }
            if (with_delta) {
                double v = 0.0;
                check(cm_delta_fc(cfg.get(), T, &v), "delta_fc at t_db=" + fmt(p.t_db));
                auto cells = param_cells("delta_fc", p, p.t_db, c.d, snr_db);
                cells.push_back(fmt(v));
                cells.push_back("nan");
                rows.push_back(std::move(cells));
            }
            return rows;
        },
        errors);

    Sink sink(c, kHeader);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (errors[i])
            throw *errors[i];
        for (const auto& row : *results[i])
            sink.row(row);
    }
    return 0;
}

int cmd_simulate(const Common& c, const std::string& mode, const std::string& combiner, std::uint64_t trials,
                 std::uint64_t seed, double radius)
{
    const auto points = grid(c, true);
    const auto base = base_config(c);
    cm_sim_settings sim;
    cm_sim_settings_default(&sim);
    if (cm_mode_from_name(mode.c_str(), &sim.mode) != CM_OK)
        throw CliError{2, "--mode: unknown correlation mode '" + mode + "' (exact, fc, nc)"};
    if (cm_combiner_from_name(combiner.c_str(), &sim.combiner) != CM_OK)
        throw CliError{2, "--combiner: unknown combiner '" + combiner + "' (mrc, sc, single)"};
    if (trials < 1)
        throw CliError{2, "--trials: must be at least 1"};
    sim.trials = trials;
    sim.seed = seed;
    sim.region_radius = radius;
    sim.n_branches = c.n;
    sim.threads = c.threads;
    double snr_db = 0.0;
    check(cm_config_get(base.get(), "snr_db", &snr_db), "config");
    const std::string label = "mc_" + mode + (combiner == "mrc" ? "" : "_" + combiner);

    Sink sink(c, kHeader);
    // Thresholds of consecutive points sharing the other parameters are
    // evaluated in one simulation pass.
    for (std::size_t i = 0; i < points.size();) {
        std::size_t j = i;
        std::vector<double> ts;
        while (j < points.size() && points[j].lambda == points[i].lambda && points[j].alpha == points[i].alpha &&
               points[j].m_d == points[i].m_d && points[j].m_i == points[i].m_i) {
            ts.push_back(std::pow(10.0, points[j].t_db / 10.0));
            ++j;
        }
        auto cfg = clone(base.get());
        apply(cfg.get(), points[i]);
        std::vector<cm_mc_estimate> est(ts.size());
        check(cm_simulate(cfg.get(), &sim, ts.data(), ts.size(), est.data()), "simulate");
        for (std::size_t k = i; k < j; ++k) {
            auto cells = param_cells(label, points[k], points[k].t_db, c.d, snr_db);
            cells.push_back(fmt(est[k - i].mean));
            cells.push_back(fmt(est[k - i].std_err));
            sink.row(cells);
        }
        i = j;
    }
    return 0;
}

int cmd_tcap(const Common& c, const std::string& model, const std::string& eps_text, std::optional<double> t_linear)
{
    auto points = grid(c, false);
    const auto eps = parse_range(eps_text, "--eps");
    const auto base = base_config(c);
    int id = 0;
    if (cm_model_from_name(model.c_str(), &id) != CM_OK)
        throw CliError{2, "--model: unknown model '" + model + "'"};
    const auto t_db_values = t_linear ? std::vector<double>{10.0 * std::log10(*t_linear)} : parse_range(c.t_db, "--t-db");
    if (t_linear && !(*t_linear > 0.0))
        throw CliError{2, "--t: threshold must be positive"};
    double snr_db = 0.0;
    check(cm_config_get(base.get(), "snr_db", &snr_db), "config");

    struct Job {
        Point p;
        double eps;
        double t_db;
    };
    std::vector<Job> jobs;
    for (const auto& p : points)
        for (double t : t_db_values)
            for (double e : eps)
                jobs.push_back({p, e, t});

    std::vector<std::optional<CliError>> errors;
    const auto results = run_pool<std::vector<std::string>>(jobs.size(), c.threads,
        [&](std::size_t i) {
            const auto& job = jobs[i];
            auto cfg = clone(base.get());
            apply(cfg.get(), job.p);
            const double T = t_linear ? *t_linear : std::pow(10.0, job.t_db / 10.0);
            cm_capacity cap{};
            const cm_status st = cm_transmission_capacity(cfg.get(), id, job.eps, T, &cap);
            double lambda_eps = cap.lambda_eps;
            double capacity = cap.capacity;
            if (st == CM_ERR_INFEASIBLE) {
                std::fprintf(stderr, "warning: eps=%s: %s\n", fmt(job.eps).c_str(), cm_last_error());
                lambda_eps = capacity = std::nan("");
            } else {
                check(st, "tcap at eps=" + fmt(job.eps));
            }
            return std::vector<std::string>{cm_model_name(id), fmt(job.eps), fmt(job.t_db), fmt(job.p.alpha),
                                            fmt(c.d), fmt(job.p.m_d), fmt(job.p.m_i), fmt(snr_db),
                                            fmt(lambda_eps), fmt(capacity)};
        },
        errors);

    Sink sink(c, {"model", "eps", "t_db", "alpha", "d", "m_d", "m_i", "snr_db", "lambda_eps", "capacity"});
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (errors[i])
            throw *errors[i];
        sink.row(*results[i]);
    }
    return 0;
}

int cmd_asym(const Common& c)
{
    const auto points = grid(c, true);
    const auto base = base_config(c);
    Sink sink(c, {"quantity", "index", "value"});
    for (const auto& p : points) {
        auto cfg = clone(base.get());
        apply(cfg.get(), p);
        const double T = std::pow(10.0, p.t_db / 10.0);
        cm_asymptotic a{};
        check(cm_asymptotic_terms(cfg.get(), T, &a), "asym");
        double ratio = 0.0;
        check(cm_delta_mrc_sa(cfg.get(), &ratio), "asym");
        std::size_t count = 0;
        check(cm_asymptotic_c_k(cfg.get(), nullptr, 0, &count), "asym");
        std::vector<double> ck(count);
        check(cm_asymptotic_c_k(cfg.get(), ck.data(), ck.size(), &count), "asym");
        sink.row({"kappa", "0", fmt(a.kappa)});
        sink.row({"single_antenna_term", "0", fmt(a.single_antenna_term)});
        sink.row({"mrc_gain_term", "0", fmt(a.mrc_gain_term)});
        sink.row({"p", "0", fmt(a.p)});
        for (std::size_t k = 0; k < ck.size(); ++k)
            sink.row({"c_k", std::to_string(k), fmt(ck[k])});
        sink.row({"delta_mrc_sa", "0", fmt(ratio)});
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Success probability of dual-branch MRC under correlated interference"};
    app.require_subcommand(1);

    Common eval_c, cmp_c, sim_c, tcap_c, asym_c;
    std::string eval_model = "exact";
    std::string cmp_models = "exact,fc,nc";
    bool cmp_delta = false;
    std::string mode = "exact", combiner = "mrc";
    std::uint64_t trials = 100000, seed = 1;
    double radius = 0.0;
    std::string tcap_model = "exact", eps = "0.1";
    std::optional<double> t_linear;
    asym_c.snr_db = "inf";
    asym_c.t_db = "-30";

    auto* eval = app.add_subcommand("eval", "one model over a parameter grid");
    add_common(eval, eval_c, true);
    eval->add_option("--model", eval_model, "exact, fc, nc, special, single, noise_limited, asym, blind, sc, mmse");

    auto* cmp = app.add_subcommand("compare", "several models on a shared grid");
    add_common(cmp, cmp_c, true);
    cmp->add_option("--models", cmp_models, "comma-separated model list");
    cmp->add_flag("--delta-fc", cmp_delta, "add delta_fc = (1-P_fc)/(1-P_exact) rows");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate with standard error");
    add_common(sim, sim_c, true);
    sim->add_option("--mode", mode, "exact, fc or nc");
    sim->add_option("--combiner", combiner, "mrc, sc or single");
    sim->add_option("--trials", trials, "number of trials");
    sim->add_option("--seed", seed, "random seed");
    sim->add_option("--radius", radius, "simulation disk radius (0: automatic)");

    auto* tcap = app.add_subcommand("tcap", "transmission capacity over an outage-target sweep");
    add_common(tcap, tcap_c, true);
    tcap->add_option("--model", tcap_model, "model used for the success probability");
    tcap->add_option("--eps", eps, "outage target (value or range)");
    tcap->add_option("--t", t_linear, "threshold in linear units (overrides --t-db)");

    auto* asym = app.add_subcommand("asym", "low-outage expansion terms (defaults to --snr-db inf)");
    add_common(asym, asym_c, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (eval->parsed())
            return cmd_eval(eval_c, {eval_model}, false);
        if (cmp->parsed())
            return cmd_eval(cmp_c, split_list(cmp_models), cmp_delta);
        if (sim->parsed())
            return cmd_simulate(sim_c, mode, combiner, trials, seed, radius);
        if (tcap->parsed())
            return cmd_tcap(tcap_c, tcap_model, eps, t_linear);
        if (asym->parsed())
            return cmd_asym(asym_c);
    } catch (const CliError& e) {
        // report the flag the user actually typed when --m set both parameters
        std::string msg = e.message;
        const Common* used = eval->parsed() ? &eval_c : cmp->parsed() ? &cmp_c : sim->parsed() ? &sim_c
                           : tcap->parsed() ? &tcap_c : &asym_c;
        if (!used->m.empty() && (msg.starts_with("--m-d:") || msg.starts_with("--m-i:")))
            msg = "--m:" + msg.substr(6);
        std::fprintf(stderr, "error: %s\n", msg.c_str());
        return e.code;
    }
    return 2;
}
