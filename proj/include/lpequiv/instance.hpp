#pragma once

#include "lpequiv/config.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lpequiv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A validated underdetermined system Ax = b: full row rank, m < n, b != 0.
struct Instance {
    Matrix a;
    Vector b;
    std::string name;
    std::vector<Eigen::Index> kept_rows;  // rows of the raw input that survived reduction

    Eigen::Index rows() const { return a.rows(); }
    Eigen::Index cols() const { return a.cols(); }
    Eigen::Index corank() const { return a.cols() - a.rows(); }
};

namespace detail {

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Number of R diagonal entries above `threshold` in a column-pivoted QR of m.
inline Eigen::Index numerical_rank(const Matrix& m, double threshold)
{
    if (m.size() == 0) return 0;
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    Eigen::Index rank = 0;
    const auto diag = qr.matrixQR().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (std::abs(diag(i)) > threshold) ++rank;
    return rank;
}

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view s, double& out)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

} // namespace detail

/// Parses a decimal literal or an exact fraction "p/q" into a double.
/// Returns false on malformed input or a zero denominator.
inline bool parse_number(std::string_view token, double& out)
{
    const auto slash = token.find('/');
    if (slash == std::string_view::npos) return detail::parse_double(token, out);
    double num = 0.0, den = 0.0;
    if (!detail::parse_double(token.substr(0, slash), num)) return false;
    if (!detail::parse_double(token.substr(slash + 1), den) || den == 0.0) return false;
    out = num / den;
    return std::isfinite(out);
}

/// Raw (unreduced) system as read from the text format.
struct RawSystem {
    Matrix a;
    Vector b;
};

/// Reads the instance text format:
///   '#' starts a comment; first line "m n"; m rows of n entries; one line of m
///   rhs entries. Entries may be decimals or "p/q" fractions.
/// Throws Error{Parse} with the offending line number.
inline RawSystem parse_instance_text(std::string_view text)
{
    struct Line {
        std::size_t number;
        std::vector<std::string> tokens;
    };
    std::vector<Line> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find('\n', pos);
        if (next == std::string_view::npos) next = text.size();
        ++line_no;
        auto line = text.substr(pos, next - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (!line.empty()) {
            std::istringstream ss{std::string(line)};
            Line l{line_no, {}};
            for (std::string tok; ss >> tok;) l.tokens.push_back(tok);
            lines.push_back(std::move(l));
        }
        pos = next + 1;
    }

    auto fail = [](std::size_t at, const std::string& msg) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(at) + ": " + msg);
    };
    if (lines.empty()) fail(line_no, "missing header \"m n\"");

    const auto& header = lines.front();
    if (header.tokens.size() != 2) fail(header.number, "header must be \"m n\"");
    long m = 0, n = 0;
    {
        auto parse_dim = [&](const std::string& tok, long& out) {
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
            if (ec != std::errc{} || ptr != tok.data() + tok.size() || out < 1)
                fail(header.number, "invalid dimension '" + tok + "'");
        };
        parse_dim(header.tokens[0], m);
        parse_dim(header.tokens[1], n);
    }
    if (lines.size() < static_cast<std::size_t>(m) + 2)
        fail(lines.back().number, "expected " + std::to_string(m) + " matrix rows and a rhs line");
    if (lines.size() > static_cast<std::size_t>(m) + 2)
        fail(lines[m + 2].number, "unexpected trailing content");

    RawSystem raw{Matrix(m, n), Vector(m)};
    auto read_row = [&](const Line& l, long expected, auto&& store) {
        if (static_cast<long>(l.tokens.size()) != expected)
            fail(l.number, "expected " + std::to_string(expected) + " entries, found " +
                               std::to_string(l.tokens.size()));
        for (long j = 0; j < expected; ++j) {
            double v = 0.0;
            if (!parse_number(l.tokens[j], v)) fail(l.number, "invalid number '" + l.tokens[j] + "'");
            store(j, v);
        }
    };
    for (long i = 0; i < m; ++i)
        read_row(lines[i + 1], n, [&](long j, double v) { raw.a(i, j) = v; });
    read_row(lines[m + 1], m, [&](long j, double v) { raw.b(j) = v; });
    return raw;
}

inline RawSystem read_instance_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_instance_text(ss.str());
}

/// Drops linearly dependent rows (keeping the earliest independent ones, in
/// input order) and validates the standing assumptions on the system.
inline Instance load_and_reduce(const Matrix& raw_a, const Vector& raw_b, const Options& opt = {})
{
    const auto m0 = raw_a.rows();
    const auto n = raw_a.cols();
    if (m0 < 1 || n < 2) throw Error(ErrorKind::InvalidInput, "need m >= 1 rows and n >= 2 columns");
    if (raw_b.size() != m0) throw Error(ErrorKind::DimensionMismatch, "rhs length differs from row count");
    if (!raw_a.allFinite() || !raw_b.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite entry");

    // Rank threshold is relative to the leading pivot of the whole matrix.
    Eigen::ColPivHouseholderQR<Matrix> full(raw_a.transpose());
    const double scale = full.matrixQR().size() ? std::abs(full.matrixQR()(0, 0)) : 0.0;
    const double threshold = opt.tol.rank * scale;

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < m0; ++i) {
        Matrix trial(n, static_cast<Eigen::Index>(kept.size()) + 1);
        for (std::size_t k = 0; k < kept.size(); ++k) trial.col(k) = raw_a.row(kept[k]).transpose();
        trial.col(trial.cols() - 1) = raw_a.row(i).transpose();
        if (detail::numerical_rank(trial, threshold) == trial.cols()) kept.push_back(i);
    }

    Instance inst;
    const auto m = static_cast<Eigen::Index>(kept.size());
    inst.a.resize(m, n);
    inst.b.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        inst.a.row(k) = raw_a.row(kept[k]);
        inst.b(k) = raw_b(kept[k]);
    }
    inst.kept_rows = kept;

    const Vector x = m > 0 ? Vector(inst.a.completeOrthogonalDecomposition().solve(inst.b))
                           : Vector(Vector::Zero(n));
    if (const double resid = detail::inf_norm(raw_a * x - raw_b);
        resid > opt.tol.feas(detail::inf_norm(raw_b)))
        throw Error(ErrorKind::InconsistentSystem,
                    "rank of [A b] exceeds rank of A (residual " + std::to_string(resid) + ")");
    if (m == 0 || detail::inf_norm(inst.b) == 0.0) throw Error(ErrorKind::ZeroRhs, "b = 0");
    if (m >= n)
        throw Error(ErrorKind::NotUnderdetermined,
                    "reduced system has m = " + std::to_string(m) + " >= n = " + std::to_string(n));
    return inst;
}

inline Instance load_and_reduce(const RawSystem& raw, const Options& opt = {})
{
    return load_and_reduce(raw.a, raw.b, opt);
}

} // namespace lpequiv
