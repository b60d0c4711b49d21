#pragma once

#include "lpequiv/equivalence.hpp"
#include "lpequiv/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lpequiv {

/// 17 significant digits: enough for every double to round-trip.
inline std::string format_number(double v)
{
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Minimal streaming JSON writer (two-space indentation, insertion order).
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(std::string_view k)
    {
        separator();
        write_string(k);
        out_ << ": ";
        pending_key_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return raw(format_number(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(std::size_t v) { return raw(std::to_string(v)); }
    JsonWriter& value(long v) { return raw(std::to_string(v)); }
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& value(std::string_view v)
    {
        begin_value();
        write_string(v);
        return *this;
    }
    JsonWriter& value(const Vector& v)
    {
        begin_value();
        out_ << '[';
        for (Eigen::Index i = 0; i < v.size(); ++i) out_ << (i ? ", " : "") << format_number(v(i));
        out_ << ']';
        return *this;
    }
    JsonWriter& value(const std::vector<std::size_t>& v)
    {
        begin_value();
        out_ << '[';
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? ", " : "") << v[i];
        out_ << ']';
        return *this;
    }
    JsonWriter& value(const std::vector<double>& v)
    {
        begin_value();
        out_ << '[';
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? ", " : "") << format_number(v[i]);
        out_ << ']';
        return *this;
    }

    template <typename T>
    JsonWriter& field(std::string_view k, const T& v)
    {
        key(k);
        return value(v);
    }

    void finish() { out_ << '\n'; }

private:
    JsonWriter& raw(const std::string& text)
    {
        begin_value();
        out_ << text;
        return *this;
    }
    void begin_value()
    {
        if (pending_key_) {
            pending_key_ = false;
            return;
        }
        separator();
    }
    void separator()
    {
        if (first_.empty()) return;
        if (!first_.back()) out_ << ',';
        first_.back() = false;
        out_ << '\n' << std::string(2 * first_.size(), ' ');
    }
    JsonWriter& open(char c)
    {
        begin_value();
        out_ << c;
        first_.push_back(true);
        return *this;
    }
    JsonWriter& close(char c)
    {
        const bool empty = first_.back();
        first_.pop_back();
        if (!empty) out_ << '\n' << std::string(2 * first_.size(), ' ');
        out_ << c;
        return *this;
    }
    void write_string(std::string_view s)
    {
        out_ << '"';
        for (char ch : s) {
            switch (ch) {
            case '"': out_ << "\\\""; break;
            case '\\': out_ << "\\\\"; break;
            case '\n': out_ << "\\n"; break;
            case '\t': out_ << "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out_ << buf;
                } else {
                    out_ << ch;
                }
            }
        }
        out_ << '"';
    }

    std::ostream& out_;
    std::vector<bool> first_;
    bool pending_key_ = false;
};

inline void write_certificate(JsonWriter& w, const EquivalenceCertificate& cert)
{
    w.begin_object()
        .field("k0", cert.k0)
        .field("r0", cert.r0)
        .field("r1", cert.r1)
        .field("r_used", cert.r_used)
        .field("r_m", cert.r_m)
        .field("p_bound", cert.p_bound)
        .field("capped", cert.capped)
        .field("radius_source", to_string(cert.radius_source));
    w.key("verifications").begin_array();
    for (const auto& v : cert.verifications) {
        w.begin_object()
            .field("p", v.p)
            .field("holds", v.holds)
            .field("lp_l0", v.lp_l0)
            .field("minimizers", v.minimizers)
            .field("contained", v.contained)
            .field("below_bound", v.below_bound)
            .field("chain_ok", v.chain_ok)
            .end_object();
    }
    w.end_array().end_object();
}

inline void write_sparse_solution(JsonWriter& w, const SparseSolution& s)
{
    w.begin_object().field("x", s.x).field("support", s.support).field("l0", s.l0).field("residual", s.residual).end_object();
}

inline void write_lp_solution(JsonWriter& w, const SolutionParam& param, const LpSolution& s, const Tolerances& tol)
{
    const auto support = detail::support_of(s.x, tol);
    w.begin_object()
        .field("x", s.x)
        .field("support", support)
        .field("l0", support.size())
        .field("objective", s.objective)
        .field("residual", param.residual(s.x))
        .field("radius_used", s.radius_used)
        .field("bound_warning", s.bound_warning)
        .field("vertex_certificate", s.vertex_certificate)
        .end_object();
}

/// Full report for one instance: reduced system, decomposition, sparsest
/// solutions, radii and the certificate with its verification table.
inline void write_analysis_json(std::ostream& out, const Analysis& an, const EquivalenceCertificate& cert)
{
    JsonWriter w(out);
    w.begin_object();
    w.key("instance")
        .begin_object()
        .field("name", std::string_view(an.instance.name))
        .field("m", static_cast<std::size_t>(an.instance.rows()))
        .field("n", static_cast<std::size_t>(an.instance.cols()))
        .field("corank", static_cast<std::size_t>(an.instance.corank()));
    std::vector<std::size_t> kept(an.instance.kept_rows.begin(), an.instance.kept_rows.end());
    w.field("kept_rows", kept).end_object();
    w.field("x_ls", an.param.x_ls);
    w.key("null_basis").begin_array();
    for (Eigen::Index j = 0; j < an.param.corank(); ++j) w.value(Vector(an.param.null_basis.col(j)));
    w.end_array();
    w.field("k0", cert.k0);
    w.key("sparsest_solutions").begin_array();
    for (const auto& s : an.sparsest) write_sparse_solution(w, s);
    w.end_array();
    w.key("radii").begin_object().field("r0", an.radii.r0).field("r1", an.radii.r1).field("r", an.radii.r).end_object();
    w.key("certificate");
    write_certificate(w, cert);
    w.end_object().finish();
}

inline void write_analysis_text(std::ostream& out, const Analysis& an, const EquivalenceCertificate& cert)
{
    auto vec = [](const Vector& v) {
        std::string s = "(";
        for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v(i));
        return s + ")";
    };
    out << "system: m = " << an.instance.rows() << ", n = " << an.instance.cols()
        << ", corank = " << an.instance.corank() << '\n';
    out << "x_ls = " << vec(an.param.x_ls) << '\n';
    out << "k0 = " << cert.k0 << '\n';
    for (const auto& s : an.sparsest) out << "  sparsest: " << vec(s.x) << '\n';
    out << "r0 = " << format_number(cert.r0) << ", r1 = " << format_number(cert.r1)
        << ", r_used = " << format_number(cert.r_used) << " (" << to_string(cert.radius_source) << ")\n";
    out << "r_m = " << format_number(cert.r_m) << '\n';
    out << "p_bound = " << format_number(cert.p_bound) << (cert.capped ? " (capped)" : "") << '\n';
    for (const auto& v : cert.verifications)
        out << "  p = " << format_number(v.p) << ": " << (v.holds ? "holds" : "fails") << ", lp_l0 = " << v.lp_l0
            << (v.contained ? "" : ", outside B_inf(r_used)") << '\n';
}

inline void write_scan_text(std::ostream& out, const ScanResult& scan)
{
    out << "p holds lp_l0 contained below_bound\n";
    for (const auto& v : scan.certificate.verifications)
        out << format_number(v.p) << ' ' << (v.holds ? "yes" : "no") << ' ' << v.lp_l0 << ' '
            << (v.contained ? "yes" : "no") << ' ' << (v.below_bound ? "yes" : "no") << '\n';
    out << "p_bound " << format_number(scan.certificate.p_bound) << '\n';
    out << "holds_through " << (scan.holds_through ? format_number(*scan.holds_through) : "none") << '\n';
    out << "first_failure " << (scan.first_failure ? format_number(*scan.first_failure) : "none") << '\n';
}

inline void write_scan_csv(std::ostream& out, const ScanResult& scan)
{
    out << "p,holds,lp_l0,contained,below_bound\n";
    for (const auto& v : scan.certificate.verifications)
        out << format_number(v.p) << ',' << (v.holds ? 1 : 0) << ',' << v.lp_l0 << ',' << (v.contained ? 1 : 0) << ','
            << (v.below_bound ? 1 : 0) << '\n';
}

inline void write_scan_json(std::ostream& out, const ScanResult& scan)
{
    JsonWriter w(out);
    w.begin_object().key("certificate");
    write_certificate(w, scan.certificate);
    w.key("holds_through");
    if (scan.holds_through) w.value(*scan.holds_through);
    else w.value(std::nan(""));
    w.key("first_failure");
    if (scan.first_failure) w.value(*scan.first_failure);
    else w.value(std::nan(""));
    w.end_object().finish();
}

struct CurveRange {
    double t_min = -0.5;
    double t_max = 2.0;
    std::size_t steps = 250;
};

/// Values of sum |x_i(t)|^p along a corank-1 solution line.
///
/// t is the value of the first coordinate that varies along the line. Rows
/// are the steps+1 uniform samples followed by the in-range breakpoints
/// (where some component vanishes), marked in the trailing `kind` column.
inline void write_curve_csv(std::ostream& out, const SolutionParam& param, const std::vector<double>& p_list,
                            const CurveRange& range, const Tolerances& tol = {})
{
    if (param.corank() != 1) throw Error(ErrorKind::CorankMismatch, "curve needs a corank-1 system");
    if (p_list.empty()) throw Error(ErrorKind::InvalidInput, "empty p list");
    for (double p : p_list) detail::require_exponent(p);
    if (!(range.t_min < range.t_max) || range.steps < 2)
        throw Error(ErrorKind::InvalidInput, "t range needs t_min < t_max and steps >= 2");

    const auto nvec = param.null_basis.col(0);
    Eigen::Index pivot = 0;
    while (std::abs(nvec(pivot)) <= 1e-8) ++pivot;
    auto point_at = [&](double t) -> Vector { return param.x_ls + ((t - param.x_ls(pivot)) / nvec(pivot)) * nvec; };

    out << 't';
    for (double p : p_list) {
        char buf[40];
        std::snprintf(buf, sizeof buf, ",f_%g", p);
        out << buf;
    }
    out << ",kind\n";
    auto emit = [&](double t, const Vector& x, const char* kind) {
        out << format_number(t);
        for (double p : p_list) out << ',' << format_number(lp_objective(x, p));
        out << ',' << kind << '\n';
    };
    for (std::size_t s = 0; s <= range.steps; ++s) {
        const double t = range.t_min + (range.t_max - range.t_min) * static_cast<double>(s) / static_cast<double>(range.steps);
        emit(t, point_at(t), "sample");
    }
    double last = std::nan("");
    for (double c : corank1_breakpoints(param)) {
        Vector x = param.x_ls + c * nvec;
        const double eps = tol.zero(detail::inf_norm(x));
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (std::abs(x(i)) <= eps) x(i) = 0.0;
        const double t = x(pivot);
        if (t < range.t_min || t > range.t_max) continue;
        if (std::abs(t - last) <= 1e-12 * (1.0 + std::abs(t))) continue;
        last = t;
        emit(t, x, "breakpoint");
    }
}

} // namespace lpequiv
