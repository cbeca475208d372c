#pragma once

// Batch front end: JSON config, command dispatch, CSV tables and manifests.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dirac_hardy/dirac_hardy.hpp"

namespace dirac_hardy::experiment {

using json = nlohmann::ordered_json;

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> names{"verify-hardy",       "estimate-c", "solve-eigen", "resolvent-check",
                                                "domain-diagnostics", "sweep"};
    return names;
}

struct PotentialConfig
{
    /// coulomb, perturbed-coulomb or free.
    std::string type = "coulomb";
    std::optional<double> nu;
    double c1 = 0.0;
    double gamma_cap = 0.0;
};

struct GridConfig
{
    double r_min = 1e-6;
    double r_max = 60.0;
    std::size_t N = 4000;
    Scheme scheme = Scheme::log_uniform;
};

struct Tolerances
{
    double verdict = 1e-6;
    double gamma = 1e-8;
    double mu = 1e-7;
    double c = 1e-4;
    double roundtrip = 1e-8;
    double symmetry = 1e-10;
};

struct SweepConfig
{
    std::string axis;
    std::vector<double> values;
    std::string target = "eigen";
};

struct ExperimentConfig
{
    std::string command;
    PotentialConfig potential;
    GridConfig grid;
    std::vector<int> channels = default_channels();
    std::optional<double> c;
    std::vector<double> gammas;
    int kappa = -1;
    int k = 1;
    std::optional<std::pair<double, double>> window;
    Tolerances tolerances;
    std::string output_path;
    std::uint64_t seed = 1;
    std::size_t samples = 100;
    std::vector<double> cutoffs = default_cutoffs();
    std::optional<SweepConfig> sweep;
};

// --- parsing ---------------------------------------------------------------

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& what)
{
    throw Error(Errc::config_parse_error, "field '" + field + "': " + what);
}

[[noreturn]] inline void violation(const std::string& field, const std::string& what)
{
    throw Error(Errc::precondition_violation, "field '" + field + "': " + what);
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        parse_fail(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key))
            parse_fail(path.empty() ? key : path + "." + key, "unknown key");
}

inline std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

inline double number(const json& j, const std::string& field)
{
    if (!j.is_number())
        parse_fail(field, "expected a number, got " + j.dump());
    return j.get<double>();
}

inline long long integer(const json& j, const std::string& field)
{
    if (!j.is_number_integer())
        parse_fail(field, "expected an integer, got " + j.dump());
    return j.get<long long>();
}

inline std::string string(const json& j, const std::string& field)
{
    if (!j.is_string())
        parse_fail(field, "expected a string, got " + j.dump());
    return j.get<std::string>();
}

inline std::vector<double> numbers(const json& j, const std::string& field)
{
    std::vector<double> out;
    if (j.is_number()) {
        out.push_back(j.get<double>());
        return out;
    }
    if (!j.is_array())
        parse_fail(field, "expected a number or an array of numbers");
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

inline Scheme parse_scheme(const std::string& s, const std::string& field)
{
    if (s == "uniform")
        return Scheme::uniform;
    if (s == "log-uniform" || s == "log_uniform")
        return Scheme::log_uniform;
    parse_fail(field, "expected \"uniform\" or \"log-uniform\", got \"" + s + "\"");
}

} // namespace detail

/// Reads a config object. `command` (from the command line) wins; a
/// "command" key in the file must agree with it.
inline ExperimentConfig parse_config(const json& j, const std::string& command)
{
    using namespace detail;
    reject_unknown(j, "", {"command", "potential", "grid", "channels", "c", "gamma", "kappa", "k", "window",
                           "tolerances", "output_path", "seed", "samples", "cutoffs", "sweep"});
    ExperimentConfig cfg;
    cfg.command = command;
    if (j.contains("command") && string(j["command"], "command") != command)
        violation("command", "config names \"" + j["command"].get<std::string>() + "\" but the command line asks for \"" +
                                 command + "\"");
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
        violation("command", "unknown command \"" + command + "\"");

    if (j.contains("potential")) {
        const json& p = j["potential"];
        reject_unknown(p, "potential", {"type", "nu", "c1", "gamma_cap"});
        if (p.contains("type"))
            cfg.potential.type = string(p["type"], "potential.type");
        if (p.contains("nu"))
            cfg.potential.nu = number(p["nu"], "potential.nu");
        if (p.contains("c1"))
            cfg.potential.c1 = number(p["c1"], "potential.c1");
        if (p.contains("gamma_cap"))
            cfg.potential.gamma_cap = number(p["gamma_cap"], "potential.gamma_cap");
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, "grid", {"r_min", "r_max", "N", "scheme"});
        if (g.contains("r_min"))
            cfg.grid.r_min = number(g["r_min"], "grid.r_min");
        if (g.contains("r_max"))
            cfg.grid.r_max = number(g["r_max"], "grid.r_max");
        if (g.contains("N")) {
            const long long n = integer(g["N"], "grid.N");
            if (n < 0)
                violation("grid.N", "must be positive");
            cfg.grid.N = static_cast<std::size_t>(n);
        }
        if (g.contains("scheme"))
            cfg.grid.scheme = parse_scheme(string(g["scheme"], "grid.scheme"), "grid.scheme");
    }
    if (j.contains("channels")) {
        if (!j["channels"].is_array())
            parse_fail("channels", "expected an array of integers");
        cfg.channels.clear();
        for (std::size_t i = 0; i < j["channels"].size(); ++i)
            cfg.channels.push_back(static_cast<int>(integer(j["channels"][i], "channels[" + std::to_string(i) + "]")));
    }
    if (j.contains("c"))
        cfg.c = number(j["c"], "c");
    if (j.contains("gamma"))
        cfg.gammas = numbers(j["gamma"], "gamma");
    if (j.contains("kappa"))
        cfg.kappa = static_cast<int>(integer(j["kappa"], "kappa"));
    if (j.contains("k"))
        cfg.k = static_cast<int>(integer(j["k"], "k"));
    if (j.contains("window")) {
        const std::vector<double> w = numbers(j["window"], "window");
        if (w.size() != 2)
            parse_fail("window", "expected [gamma_lo, gamma_hi]");
        cfg.window = std::make_pair(w[0], w[1]);
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        reject_unknown(t, "tolerances", {"verdict", "gamma", "mu", "c", "roundtrip", "symmetry"});
        auto read = [&](const char* key, double& dst) {
            if (t.contains(key))
                dst = number(t[key], join("tolerances", key));
        };
        read("verdict", cfg.tolerances.verdict);
        read("gamma", cfg.tolerances.gamma);
        read("mu", cfg.tolerances.mu);
        read("c", cfg.tolerances.c);
        read("roundtrip", cfg.tolerances.roundtrip);
        read("symmetry", cfg.tolerances.symmetry);
    }
    if (j.contains("output_path"))
        cfg.output_path = string(j["output_path"], "output_path");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            parse_fail("seed", "expected a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("samples")) {
        const long long n = integer(j["samples"], "samples");
        if (n < 1)
            violation("samples", "must be >= 1");
        cfg.samples = static_cast<std::size_t>(n);
    }
    if (j.contains("cutoffs"))
        cfg.cutoffs = numbers(j["cutoffs"], "cutoffs");
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        reject_unknown(s, "sweep", {"axis", "values", "target"});
        SweepConfig sw;
        if (!s.contains("axis"))
            parse_fail("sweep.axis", "missing");
        sw.axis = string(s["axis"], "sweep.axis");
        if (s.contains("values"))
            sw.values = numbers(s["values"], "sweep.values");
        if (s.contains("target"))
            sw.target = string(s["target"], "sweep.target");
        cfg.sweep = sw;
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, const std::string& command)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::config_parse_error, "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::config_parse_error, path.string() + ": " + e.what());
    }
    return parse_config(j, command);
}

inline json to_json(const ExperimentConfig& cfg)
{
    json j;
    j["command"] = cfg.command;
    j["potential"] = {{"type", cfg.potential.type}};
    if (cfg.potential.nu)
        j["potential"]["nu"] = *cfg.potential.nu;
    if (cfg.potential.type == "perturbed-coulomb") {
        j["potential"]["c1"] = cfg.potential.c1;
        j["potential"]["gamma_cap"] = cfg.potential.gamma_cap;
    }
    j["grid"] = {{"r_min", cfg.grid.r_min},
                 {"r_max", cfg.grid.r_max},
                 {"N", cfg.grid.N},
                 {"scheme", to_string(cfg.grid.scheme)}};
    j["channels"] = cfg.channels;
    if (cfg.c)
        j["c"] = *cfg.c;
    if (!cfg.gammas.empty())
        j["gamma"] = cfg.gammas;
    j["kappa"] = cfg.kappa;
    j["k"] = cfg.k;
    if (cfg.window)
        j["window"] = {cfg.window->first, cfg.window->second};
    j["tolerances"] = {{"verdict", cfg.tolerances.verdict},     {"gamma", cfg.tolerances.gamma},
                       {"mu", cfg.tolerances.mu},               {"c", cfg.tolerances.c},
                       {"roundtrip", cfg.tolerances.roundtrip}, {"symmetry", cfg.tolerances.symmetry}};
    if (!cfg.output_path.empty())
        j["output_path"] = cfg.output_path;
    j["seed"] = cfg.seed;
    j["samples"] = cfg.samples;
    j["cutoffs"] = cfg.cutoffs;
    if (cfg.sweep)
        j["sweep"] = {{"axis", cfg.sweep->axis}, {"values", cfg.sweep->values}, {"target", cfg.sweep->target}};
    return j;
}

// --- building blocks -------------------------------------------------------

inline RadialPotential build_potential(const PotentialConfig& p)
{
    const bool coulomb = p.type == "coulomb";
    const bool perturbed = p.type == "perturbed-coulomb";
    if (p.type == "free") {
        if (p.nu || p.c1 != 0.0 || p.gamma_cap != 0.0)
            detail::violation("potential", "free takes no parameters");
        return make_free();
    }
    if (!coulomb && !perturbed)
        detail::violation("potential.type",
                          "expected \"coulomb\", \"perturbed-coulomb\" or \"free\", got \"" + p.type + "\"");
    if (!p.nu)
        detail::violation("potential.nu", "required for " + p.type);
    if (coulomb && (p.c1 != 0.0 || p.gamma_cap != 0.0))
        detail::violation("potential.c1", "coulomb takes only nu; use type perturbed-coulomb");
    try {
        return coulomb ? make_coulomb(*p.nu) : make_bounded_perturbed_coulomb(*p.nu, p.c1, p.gamma_cap);
    } catch (const Error& e) {
        if (e.code() == Errc::precondition_violation)
            throw;
        detail::violation(e.code() == Errc::coupling_out_of_range ? "potential.nu" : "potential", e.what());
    }
}

inline RadialGrid build_grid(const GridConfig& g)
{
    try {
        return dirac_hardy::build_grid(g.r_min, g.r_max, g.N, g.scheme);
    } catch (const Error& e) {
        detail::violation("grid", e.what());
    }
}

// --- CSV -------------------------------------------------------------------

inline std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt(long long x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(std::size_t x) { return std::to_string(x); }
inline std::string fmt(bool x) { return x ? "true" : "false"; }

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(const std::filesystem::path& path) const
    {
        std::ofstream out(path);
        if (!out)
            throw Error(Errc::precondition_violation, "cannot write " + path.string());
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                out << (i ? "," : "") << cells[i];
            out << '\n';
        };
        line(header);
        for (const auto& r : rows)
            line(r);
    }
};

struct Outcome
{
    Table table;
    /// 0 success or verdict holds, 2 verdict fails or no eigenvalue.
    int status = 0;
    std::string summary;
};

/// Worker count: DIRAC_HARDY_THREADS caps the hardware concurrency.
inline std::size_t worker_count(std::size_t jobs)
{
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const char* env = std::getenv("DIRAC_HARDY_THREADS");
    if (env && *env) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1)
            throw Error(Errc::precondition_violation, "DIRAC_HARDY_THREADS must be a positive integer");
        n = std::min(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs job(i) for i in [0, jobs) on a small pool. Results are written by
/// index, so output order never depends on scheduling.
inline void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& job)
{
    const std::size_t workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < jobs; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

// --- commands --------------------------------------------------------------

inline double require_c(const ExperimentConfig& cfg)
{
    if (!cfg.c)
        detail::violation("c", "required by " + cfg.command);
    return *cfg.c;
}

inline double single_gamma(const ExperimentConfig& cfg)
{
    if (cfg.gammas.size() != 1)
        detail::violation("gamma", "expected exactly one value for " + cfg.command);
    return cfg.gammas.front();
}

inline void check_channels(const ExperimentConfig& cfg)
{
    if (cfg.channels.empty())
        detail::violation("channels", "must not be empty");
    for (int k : cfg.channels)
        if (k == 0)
            detail::violation("channels", "kappa = 0 is not a channel");
}

inline Outcome run_verify_hardy(const ExperimentConfig& cfg)
{
    check_channels(cfg);
    const RadialPotential v = build_potential(cfg.potential);
    const RadialGrid g = build_grid(cfg.grid);
    const double c = require_c(cfg);
    HardyReport rep;
    try {
        rep = verify_hardy(v, c, cfg.channels, g, cfg.tolerances.verdict);
    } catch (const Error& e) {
        if (e.code() == Errc::range_violation)
            detail::violation("c", e.what());
        throw;
    }
    Outcome out;
    out.table.header = {"nu", "c", "kappa", "N", "mu1", "tolerance", "verdict"};
    for (std::size_t i = 0; i < rep.channels.size(); ++i)
        out.table.rows.push_back({fmt(v.nu), fmt(c), fmt(rep.channels[i]), fmt(g.size()),
                                  fmt(rep.mu1_per_channel[i]), fmt(rep.tolerance), to_string(rep.verdict)});
    out.status = rep.verdict == Verdict::holds ? 0 : 2;
    out.summary = std::string("verdict ") + to_string(rep.verdict) + ", min mu1 = " + fmt(rep.min_mu1()) +
                  " (channel " + fmt(rep.binding_channel()) + ")";
    return out;
}

inline Outcome run_estimate_c(const ExperimentConfig& cfg)
{
    check_channels(cfg);
    const RadialPotential v = build_potential(cfg.potential);
    const RadialGrid g = build_grid(cfg.grid);
    Outcome out;
    out.table.header = {"nu", "c1", "N", "c_estimate", "c_hint", "capped", "probes"};
    try {
        const CEstimate e = estimate_cV(v, g, cfg.tolerances.c, cfg.channels, cfg.tolerances.verdict);
        out.table.rows.push_back({fmt(v.nu), fmt(v.c1), fmt(g.size()), fmt(e.c),
                                  v.cV_hint ? fmt(*v.cV_hint) : std::string("nan"), fmt(e.capped), fmt(e.probes)});
        out.summary = "c estimate " + fmt(e.c);
    } catch (const Error& e) {
        if (e.code() != Errc::no_valid_c)
            throw;
        out.table.rows.push_back({fmt(v.nu), fmt(v.c1), fmt(g.size()), "nan",
                                  v.cV_hint ? fmt(*v.cV_hint) : std::string("nan"), "false", "0"});
        out.status = 2;
        out.summary = e.what();
    }
    return out;
}

inline SpectralOptions spectral_options(const ExperimentConfig& cfg)
{
    SpectralOptions o;
    o.tol_gamma = cfg.tolerances.gamma;
    o.tol_mu = cfg.tolerances.mu;
    if (cfg.window) {
        o.gamma_lo = cfg.window->first;
        o.gamma_hi = cfg.window->second;
    }
    return o;
}

inline std::optional<double> oracle_for(const RadialPotential& v, int kappa, int k)
{
    if (!v.is_pure_coulomb())
        return std::nullopt;
    return analytic_oracle(v.nu, kappa, k);
}

/// |E - E_oracle| / |E_oracle|, absolute when the oracle is 0.
inline double relative_error(double e, double oracle)
{
    const double err = std::abs(e - oracle);
    return oracle != 0.0 ? err / std::abs(oracle) : err;
}

inline Outcome run_solve_eigen(const ExperimentConfig& cfg)
{
    if (cfg.kappa == 0)
        detail::violation("kappa", "must be nonzero");
    if (cfg.k < 1)
        detail::violation("k", "must be >= 1");
    const RadialPotential v = build_potential(cfg.potential);
    const RadialGrid g = build_grid(cfg.grid);
    if (v.nu > std::abs(cfg.kappa))
        detail::violation("kappa", "coupling exceeds |kappa|");
    const std::optional<double> oracle = oracle_for(v, cfg.kappa, cfg.k);
    Outcome out;
    out.table.header = {"nu", "kappa", "k", "N", "E", "E_oracle", "rel_err", "gamma_lo", "gamma_hi", "mu_at_root", "flag"};
    const std::string o = oracle ? fmt(*oracle) : "nan";
    try {
        const SpectralResult r = find_eigenvalue(v, cfg.kappa, cfg.k, g, spectral_options(cfg));
        out.table.rows.push_back({fmt(v.nu), fmt(cfg.kappa), fmt(cfg.k), fmt(g.size()), fmt(r.E), o,
                                  oracle ? fmt(relative_error(r.E, *oracle)) : "nan", fmt(r.gamma_lo),
                                  fmt(r.gamma_hi), fmt(r.mu_at_root), r.endpoint ? "endpoint" : "interior"});
        out.summary = "E = " + fmt(r.E);
    } catch (const Error& e) {
        if (e.code() == Errc::window_invalid)
            detail::violation("window", e.what());
        if (e.code() != Errc::no_eigenvalue)
            throw;
        out.table.rows.push_back({fmt(v.nu), fmt(cfg.kappa), fmt(cfg.k), fmt(g.size()), "nan", o, "nan", "nan",
                                  "nan", "nan", "no-eigenvalue"});
        out.status = 2;
        out.summary = e.what();
    }
    return out;
}

inline Outcome run_resolvent_check(const ExperimentConfig& cfg)
{
    if (cfg.kappa == 0)
        detail::violation("kappa", "must be nonzero");
    if (cfg.gammas.empty())
        detail::violation("gamma", "required by resolvent-check");
    const RadialPotential v = build_potential(cfg.potential);
    const RadialGrid g = build_grid(cfg.grid);
    for (double gamma : cfg.gammas)
        if (!(gamma > v.Gamma))
            detail::violation("gamma", "every value must exceed sup V");

    // One generator, consumed sequentially, so the draws do not depend on
    // the thread count.
    std::mt19937_64 rng(cfg.seed);
    struct Rhs
    {
        std::vector<double> f1, f2;
    };
    std::vector<Rhs> rhs(cfg.samples);
    for (auto& r : rhs) {
        r.f1 = random_nodal(rng, g);
        r.f2 = random_samples(rng, g);
    }

    const std::size_t per = cfg.samples;
    const std::size_t jobs = per * cfg.gammas.size();
    std::vector<std::vector<std::string>> rows(jobs);
    std::vector<char> ok(jobs, 1);
    parallel_for(jobs, [&](std::size_t i) {
        const double gamma = cfg.gammas[i / per];
        const Rhs& a = rhs[i % per];
        const Rhs& b = rhs[(i + 1) % per];
        const ResolventResult p = solve_resolvent(a.f1, a.f2, v, gamma, cfg.kappa, g);
        const ResolventResult q = solve_resolvent(b.f1, b.f2, v, gamma, cfg.kappa, g);
        const double res = roundtrip_residual(p.pair, a.f1, a.f2, v, gamma, g);
        const double sym = symmetry_defect(p.pair, q.pair, v, gamma, g).defect;
        ok[i] = res <= cfg.tolerances.roundtrip && sym <= cfg.tolerances.symmetry;
        rows[i] = {fmt(i % per), fmt(gamma), fmt(cfg.kappa), fmt(g.size()), fmt(res), fmt(sym),
                   fmt(p.ill_conditioned)};
    });
    Outcome out;
    out.table.header = {"sample", "gamma", "kappa", "N", "roundtrip_residual", "symmetry_defect", "ill_conditioned"};
    out.table.rows = std::move(rows);
    const auto bad = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
    out.status = bad == 0 ? 0 : 2;
    out.summary = fmt(jobs - bad) + "/" + fmt(jobs) + " solves within tolerance";
    return out;
}

inline Outcome run_domain_diagnostics(const ExperimentConfig& cfg)
{
    if (cfg.kappa == 0)
        detail::violation("kappa", "must be nonzero");
    const RadialPotential v = build_potential(cfg.potential);
    const RadialGrid g = build_grid(cfg.grid);
    const double gamma = single_gamma(cfg);
    if (!(gamma > v.Gamma))
        detail::violation("gamma", "must exceed sup V");
    Outcome out;
    SpectralResult r;
    try {
        r = find_eigenvalue(v, cfg.kappa, cfg.k, g, spectral_options(cfg));
    } catch (const Error& e) {
        if (e.code() != Errc::no_eigenvalue)
            throw;
        out.status = 2;
        out.summary = e.what();
        out.table.header = {"cutoff"};
        return out;
    }
    const DomainDiagnostics d = domain_diagnostics({cfg.kappa, r.phi, r.chi}, v, gamma, cfg.cutoffs, g);
    out.table.header = {"nu",           "kappa",          "k",           "N",
                        "gamma",        "E",              "cutoff",      "r_inv_truncated",
                        "r_inv_integral", "r_inv_divergent", "log_slope", "log_slope_previous",
                        "slope_reference", "b_gamma",      "schur_defect", "residual_upper",
                        "residual_lower", "chain_applicable", "chain_lhs", "chain_rhs",
                        "chain_holds"};
    for (const auto& t : d.r_inv_truncated)
        out.table.rows.push_back({fmt(v.nu), fmt(cfg.kappa), fmt(cfg.k), fmt(g.size()), fmt(gamma), fmt(r.E),
                                  fmt(t.cutoff), fmt(t.value), fmt(d.r_inv_integral), fmt(d.r_inv_divergent),
                                  fmt(d.log_slope), fmt(d.log_slope_previous), fmt(d.slope_reference),
                                  fmt(d.b_gamma_value), fmt(d.schur_defect), fmt(d.residual_upper),
                                  fmt(d.residual_lower), fmt(d.chain_applicable), fmt(d.chain_lhs),
                                  fmt(d.chain_rhs), fmt(d.chain_holds)});
    out.status = d.chain_applicable && !d.chain_holds ? 2 : 0;
    out.summary = std::string("chain ") +
                  (d.chain_applicable ? (d.chain_holds ? "holds" : "fails") : "not applicable") +
                  ", log slope " + fmt(d.log_slope);
    return out;
}

inline Outcome run_sweep(const ExperimentConfig& cfg)
{
    if (!cfg.sweep)
        detail::violation("sweep", "required by sweep");
    const SweepConfig& sw = *cfg.sweep;
    if (sw.axis != "N" && sw.axis != "nu" && sw.axis != "gamma" && sw.axis != "c")
        detail::violation("sweep.axis", "expected one of N, nu, gamma, c; got \"" + sw.axis + "\"");
    if (sw.target != "eigen" && sw.target != "mu" && sw.target != "hardy")
        detail::violation("sweep.target", "expected one of eigen, mu, hardy; got \"" + sw.target + "\"");
    if (sw.values.empty())
        detail::violation("sweep.values", "axis list is empty");
    if (sw.axis == "N")
        for (double x : sw.values)
            if (x != std::floor(x) || x < 16)
                detail::violation("sweep.values", "N values must be integers >= 16");

    std::vector<double> values = sw.values;
    std::sort(values.begin(), values.end());

    // Validate every point before computing any of them.
    std::vector<ExperimentConfig> points;
    for (double x : values) {
        ExperimentConfig p = cfg;
        if (sw.axis == "nu" && p.potential.type == "free")
            detail::violation("sweep.axis", "the free potential has no coupling");
        if (sw.axis == "N")
            p.grid.N = static_cast<std::size_t>(x);
        else if (sw.axis == "nu")
            p.potential.nu = x;
        else if (sw.axis == "gamma")
            p.gammas = {x};
        else
            p.c = x;
        build_potential(p.potential);
        if (sw.target == "mu") {
            const double gamma = single_gamma(p);
            if (!(gamma > build_potential(p.potential).Gamma))
                detail::violation("gamma", "must exceed sup V");
            if (p.kappa == 0)
                detail::violation("kappa", "must be nonzero");
        } else if (sw.target == "hardy") {
            check_channels(p);
            const double c = require_c(p);
            if (!(c > -1.0 && c < 1.0))
                detail::violation("c", "must lie in (-1, 1)");
        } else if (p.kappa == 0 || p.k < 1) {
            detail::violation("kappa", "need kappa != 0 and k >= 1");
        }
        points.push_back(std::move(p));
    }
    for (const auto& p : points)
        build_grid(p.grid);

    struct Point
    {
        double result = std::nan("");
        double reference = std::nan("");
        double error = std::nan("");
        std::string verdict;
        std::size_t n = 0;
        bool failed = false;
    };
    std::vector<Point> res(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        const ExperimentConfig& p = points[i];
        const RadialPotential v = build_potential(p.potential);
        const RadialGrid g = build_grid(p.grid);
        Point& out = res[i];
        out.n = g.size();
        if (sw.target == "eigen") {
            try {
                const SpectralResult r = find_eigenvalue(v, p.kappa, p.k, g, spectral_options(p));
                out.result = r.E;
                if (const auto o = oracle_for(v, p.kappa, p.k)) {
                    out.reference = *o;
                    out.error = std::abs(r.E - *o);
                }
                out.verdict = r.endpoint ? "endpoint" : "interior";
            } catch (const Error& e) {
                if (e.code() != Errc::no_eigenvalue)
                    throw;
                out.verdict = "no-eigenvalue";
                out.failed = true;
            }
        } else if (sw.target == "mu") {
            const FormMatrix f = assemble_form(v, p.gammas.front(), p.kappa, g);
            const Eigenpair e = lowest_eigenpairs(f, 1).front();
            out.result = e.value;
            out.reference = hellmann_feynman_slope(f, e.vector);
            out.verdict = "ok";
        } else {
            const HardyReport r = verify_hardy(v, *p.c, p.channels, g, p.tolerances.verdict);
            out.result = r.min_mu1();
            out.reference = r.binding_channel();
            out.verdict = to_string(r.verdict);
            out.failed = r.verdict != Verdict::holds;
        }
    });

    Outcome out;
    out.table.header = {"axis", "value", "target", "N", "nu", "gamma", "c", "kappa", "k",
                        "result", "reference", "error", "ratio", "verdict"};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const ExperimentConfig& p = points[i];
        double ratio = std::nan("");
        if (sw.axis == "N" && i > 0 && res[i].error > 0.0)
            ratio = res[i - 1].error / res[i].error;
        out.table.rows.push_back({sw.axis, fmt(values[i]), sw.target, fmt(res[i].n), p.potential.nu ? fmt(*p.potential.nu) : "nan",
                                  p.gammas.size() == 1 ? fmt(p.gammas.front()) : "nan", p.c ? fmt(*p.c) : "nan",
                                  fmt(p.kappa), fmt(p.k), fmt(res[i].result), fmt(res[i].reference),
                                  fmt(res[i].error), fmt(ratio), res[i].verdict});
        if (res[i].failed)
            out.status = 2;
    }
    out.summary = fmt(points.size()) + " sweep points";
    return out;
}

inline Outcome dispatch(const ExperimentConfig& cfg)
{
    if (cfg.command == "verify-hardy")
        return run_verify_hardy(cfg);
    if (cfg.command == "estimate-c")
        return run_estimate_c(cfg);
    if (cfg.command == "solve-eigen")
        return run_solve_eigen(cfg);
    if (cfg.command == "resolvent-check")
        return run_resolvent_check(cfg);
    if (cfg.command == "domain-diagnostics")
        return run_domain_diagnostics(cfg);
    if (cfg.command == "sweep")
        return run_sweep(cfg);
    detail::violation("command", "unknown command \"" + cfg.command + "\"");
}

struct RunResult
{
    int exit_code = 0;
    std::filesystem::path csv;
    std::filesystem::path manifest;
    std::string summary;
};

/// Runs one experiment, writing <stem>.csv and <stem>.manifest.txt under
/// out_dir. The stem is output_path from the config, or the command name.
inline RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     const std::string& config_source = {})
{
    worker_count(1); // reject a bad DIRAC_HARDY_THREADS before any work
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = dispatch(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(out_dir);
    std::filesystem::path csv = out_dir / (cfg.output_path.empty() ? cfg.command + ".csv" : cfg.output_path);
    if (csv.extension() != ".csv")
        csv += ".csv";
    std::filesystem::create_directories(csv.parent_path());
    o.table.write(csv);

    std::filesystem::path manifest = csv;
    manifest.replace_extension(".manifest.txt");
    std::ofstream m(manifest);
    if (!m)
        throw Error(Errc::precondition_violation, "cannot write " + manifest.string());
    m << "command: " << cfg.command << '\n';
    m << "version: " << version << '\n';
    if (!config_source.empty())
        m << "config_source: " << config_source << '\n';
    m << "config: " << to_json(cfg).dump() << '\n';
    m << "mesh: N=" << cfg.grid.N << " r_min=" << fmt(cfg.grid.r_min) << " r_max=" << fmt(cfg.grid.r_max)
      << " scheme=" << to_string(cfg.grid.scheme) << '\n';
    m << "seed: " << cfg.seed << '\n';
    m << "result_file: " << csv.filename().string() << '\n';
    m << "rows: " << o.table.rows.size() << '\n';
    m << "exit_status: " << o.status << '\n';
    m << "summary: " << o.summary << '\n';
    m << "wall_time_s: " << fmt(wall) << '\n';
    return {o.status, csv, manifest, o.summary};
}

} // namespace dirac_hardy::experiment
