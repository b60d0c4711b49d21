#pragma once

#include "lpequiv/equivalence.hpp"
#include "lpequiv/instance.hpp"
#include "lpequiv/report.hpp"
#include "lpequiv/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lpequiv {

enum class OutputFormat { Json, Csv, Text };

/// Settings shared by every subcommand. Loaded from the JSON file named by
/// LPEQUIV_CONFIG (or --config); command-line flags take precedence.
struct RunConfig {
    Options options{};
    std::optional<double> radius_override;
    std::vector<double> p_values{0.05, 0.1, 0.13, 0.5, 0.8, 0.95, 1.0};
    std::vector<double> curve_p_values{0.1, 0.135, 0.8, 0.95, 1.0};
    CurveRange t_range{};
    OutputFormat output_format = OutputFormat::Json;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int usage = 2;
inline constexpr int bad_system = 3;
inline constexpr int blowup = 4;
inline constexpr int corank = 5;
} // namespace exit_code

inline int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidInput: return exit_code::usage;
    case ErrorKind::InconsistentSystem:
    case ErrorKind::ZeroRhs:
    case ErrorKind::NotUnderdetermined:
    case ErrorKind::DimensionMismatch: return exit_code::bad_system;
    case ErrorKind::BlowupLimit: return exit_code::blowup;
    case ErrorKind::CorankMismatch: return exit_code::corank;
    default: return exit_code::internal;
    }
}

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        const auto t = trim(tok);
        double v = 0.0;
        if (t.empty() || !parse_number(t, v)) throw Error(ErrorKind::InvalidInput, std::string("bad entry in ") + what);
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorKind::InvalidInput, std::string(what) + " is empty");
    return out;
}

inline CurveRange parse_t_range(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    CurveRange r;
    double steps = 0.0;
    if (parts.size() != 3 || !parse_number(trim(parts[0]), r.t_min) || !parse_number(trim(parts[1]), r.t_max) ||
        !parse_number(trim(parts[2]), steps) || steps != std::floor(steps) || steps < 2.0)
        throw Error(ErrorKind::InvalidInput, "t range must be MIN:MAX:STEPS with integer STEPS >= 2");
    r.steps = static_cast<std::size_t>(steps);
    if (!(r.t_min < r.t_max)) throw Error(ErrorKind::InvalidInput, "t range needs MIN < MAX");
    return r;
}

inline OutputFormat parse_format(const std::string& s)
{
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    if (s == "text") return OutputFormat::Text;
    throw Error(ErrorKind::InvalidInput, "unknown output format '" + s + "'");
}

} // namespace detail

inline void validate(const RunConfig& cfg)
{
    const auto& t = cfg.options.tol;
    for (double v : {t.feas_rel, t.rank, t.orth, t.zero_rel, t.dedup_rel, t.tie_rel})
        if (!(v > 0.0)) throw Error(ErrorKind::InvalidInput, "tolerances must be positive");
    if (!(cfg.t_range.t_min < cfg.t_range.t_max) || cfg.t_range.steps < 2)
        throw Error(ErrorKind::InvalidInput, "t range needs t_min < t_max and steps >= 2");
    if (cfg.radius_override && !(*cfg.radius_override > 0.0))
        throw Error(ErrorKind::InvalidInput, "radius must be positive");
}

/// Applies a JSON config document onto `cfg`. Unknown keys are rejected.
inline void apply_config_json(RunConfig& cfg, const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
    }
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "tolerances") {
                auto& t = cfg.options.tol;
                for (const auto& [tk, tv] : v.items()) {
                    if (tk == "feas") t.feas_rel = tv.get<double>();
                    else if (tk == "rank") t.rank = tv.get<double>();
                    else if (tk == "orth") t.orth = tv.get<double>();
                    else if (tk == "zero") t.zero_rel = tv.get<double>();
                    else if (tk == "dedup") t.dedup_rel = tv.get<double>();
                    else if (tk == "tie") t.tie_rel = tv.get<double>();
                    else throw Error(ErrorKind::Parse, "config: unknown tolerance '" + tk + "'");
                }
            } else if (k == "caps") {
                auto& c = cfg.options.caps;
                for (const auto& [ck, cv] : v.items()) {
                    if (ck == "n_max") c.n_max = cv.get<std::size_t>();
                    else if (ck == "d_max") c.d_max = cv.get<std::size_t>();
                    else if (ck == "fm_row_cap") c.fm_row_cap = cv.get<std::size_t>();
                    else if (ck == "subset_cap") c.subset_cap = cv.get<std::size_t>();
                    else throw Error(ErrorKind::Parse, "config: unknown cap '" + ck + "'");
                }
            } else if (k == "radius") {
                if (v.is_null()) cfg.radius_override.reset();
                else cfg.radius_override = v.get<double>();
            } else if (k == "p_values") {
                cfg.p_values = v.get<std::vector<double>>();
            } else if (k == "curve_p_values") {
                cfg.curve_p_values = v.get<std::vector<double>>();
            } else if (k == "t_range") {
                const auto r = v.get<std::vector<double>>();
                if (r.size() != 3 || r[2] < 2 || r[2] != std::floor(r[2]))
                    throw Error(ErrorKind::Parse, "config: t_range must be [min, max, steps]");
                cfg.t_range = {r[0], r[1], static_cast<std::size_t>(r[2])};
            } else if (k == "output_format") {
                cfg.output_format = detail::parse_format(v.get<std::string>());
            } else {
                throw Error(ErrorKind::Parse, "config: unknown key '" + k + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
    }
    validate(cfg);
}

inline void load_config_file(RunConfig& cfg, const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_config_json(cfg, ss.str());
}

inline Instance load_instance(const std::string& path, const Options& opt)
{
    auto inst = load_and_reduce(read_instance_file(path), opt);
    inst.name = path;
    return inst;
}

inline void cmd_analyze(const std::string& path, const RunConfig& cfg, std::ostream& out)
{
    const auto an = analyze_instance(load_instance(path, cfg.options), cfg.options);
    const auto cert = verify_equivalence(an, cfg.p_values, cfg.radius_override, cfg.options);
    if (cfg.output_format == OutputFormat::Text) write_analysis_text(out, an, cert);
    else write_analysis_json(out, an, cert);
}

/// p == nullopt solves the l_0 problem.
inline void cmd_solve(const std::string& path, std::optional<double> p, const RunConfig& cfg, std::ostream& out)
{
    const auto inst = load_instance(path, cfg.options);
    const auto param = decompose(inst, cfg.options);
    const bool text = cfg.output_format == OutputFormat::Text;
    if (!p) {
        const auto sols = solve_l0(param, cfg.options);
        if (text) {
            out << "l0 minimizers (k0 = " << (sols.empty() ? 0 : sols.front().l0) << ")\n";
            for (const auto& s : sols) {
                out << " ";
                for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ' ' << format_number(s.x(i));
                out << '\n';
            }
            return;
        }
        JsonWriter w(out);
        w.begin_object().field("problem", "l0").key("minimizers").begin_array();
        for (const auto& s : sols) write_sparse_solution(w, s);
        w.end_array().end_object().finish();
        return;
    }
    const auto sols = solve_lp_extreme(param, *p, cfg.radius_override, cfg.options);
    if (text) {
        out << "l_p minimizers (p = " << format_number(*p) << ")\n";
        for (const auto& s : sols) {
            out << " ";
            for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ' ' << format_number(s.x(i));
            out << "  objective " << format_number(s.objective) << (s.bound_warning ? "  [radius reached]" : "") << '\n';
        }
        return;
    }
    JsonWriter w(out);
    w.begin_object().field("problem", "lp").field("p", *p).key("minimizers").begin_array();
    for (const auto& s : sols) write_lp_solution(w, param, s, cfg.options.tol);
    w.end_array().end_object().finish();
}

inline void cmd_curve(const std::string& path, const RunConfig& cfg, std::ostream& out)
{
    const auto param = decompose(load_instance(path, cfg.options), cfg.options);
    write_curve_csv(out, param, cfg.curve_p_values, cfg.t_range, cfg.options.tol);
}

inline void cmd_scan(const std::string& path, const std::vector<double>& grid, const RunConfig& cfg, std::ostream& out)
{
    const auto scan = scan_pstar(load_instance(path, cfg.options), grid, cfg.radius_override, cfg.options);
    switch (cfg.output_format) {
    case OutputFormat::Json: write_scan_json(out, scan); break;
    case OutputFormat::Csv: write_scan_csv(out, scan); break;
    case OutputFormat::Text: write_scan_text(out, scan); break;
    }
}

/// Entry point shared by the executable and the tests. Returns the exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Certify and verify l_0 / l_p equivalence for small underdetermined systems", "lpequiv"};
    app.require_subcommand(1);

    std::string config_path;
    std::string format;
    app.add_option("--config", config_path, "JSON config file (default: $LPEQUIV_CONFIG)");
    app.add_option("--format", format, "json | text | csv");

    std::string file;
    std::optional<double> radius;
    std::string p_text, p_list_text, t_range_text, grid_text, out_path;
    std::optional<double> p_single;
    bool l0 = false;

    auto* analyze = app.add_subcommand("analyze", "full certificate and verification table");
    analyze->add_option("file", file, "instance file")->required();
    analyze->add_option("--radius", radius, "radius replacing r in the bound");
    analyze->add_option("--p", p_text, "comma-separated p values to verify");

    auto* solve = app.add_subcommand("solve", "all minimizers of the l_p or l_0 problem");
    solve->add_option("file", file, "instance file")->required();
    auto* p_opt = solve->add_option("--p", p_single, "exponent in (0, 1]");
    auto* l0_opt = solve->add_flag("--l0", l0, "solve the l_0 problem");
    p_opt->excludes(l0_opt);
    solve->add_option("--radius", radius, "box radius for the l_p search");

    auto* curve = app.add_subcommand("curve", "CSV of the l_p objective along a solution line");
    curve->add_option("file", file, "instance file")->required();
    curve->add_option("--p-list", p_list_text, "comma-separated p values");
    curve->add_option("--t-range", t_range_text, "MIN:MAX:STEPS");
    curve->add_option("--out", out_path, "output CSV path (default: stdout)");

    auto* scan = app.add_subcommand("scan", "equivalence table over a p grid");
    scan->add_option("file", file, "instance file")->required();
    scan->add_option("--p-grid", grid_text, "ascending comma-separated p grid");
    scan->add_option("--radius", radius, "radius replacing r in the bound");

    std::vector<const char*> argv{"lpequiv"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return exit_code::usage;
    }

    try {
        RunConfig cfg;
        if (config_path.empty())
            if (const char* env = std::getenv("LPEQUIV_CONFIG"); env && *env) config_path = env;
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (!format.empty()) cfg.output_format = detail::parse_format(format);
        if (radius) cfg.radius_override = radius;
        validate(cfg);

        if (analyze->parsed()) {
            if (!p_text.empty()) cfg.p_values = detail::parse_list(p_text, "--p");
            cmd_analyze(file, cfg, out);
        } else if (solve->parsed()) {
            if (!p_single && !l0) throw Error(ErrorKind::InvalidInput, "solve needs --p P or --l0");
            cmd_solve(file, l0 ? std::nullopt : p_single, cfg, out);
        } else if (curve->parsed()) {
            if (curve->count("--p-list")) cfg.curve_p_values = detail::parse_list(p_list_text, "--p-list");
            if (curve->count("--t-range")) cfg.t_range = detail::parse_t_range(t_range_text);
            if (out_path.empty() || out_path == "-") {
                cmd_curve(file, cfg, out);
            } else {
                std::ostringstream buf;
                cmd_curve(file, cfg, buf);
                std::ofstream f(out_path, std::ios::binary);
                if (!f) throw Error(ErrorKind::InvalidInput, "cannot write '" + out_path + "'");
                f << buf.str();
            }
        } else if (scan->parsed()) {
            const auto grid = scan->count("--p-grid") ? detail::parse_list(grid_text, "--p-grid") : cfg.p_values;
            cmd_scan(file, grid, cfg, out);
        }
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_code::internal;
    }
    return exit_code::ok;
}

} // namespace lpequiv
