#pragma once

#include "lpequiv/config.hpp"
#include "lpequiv/decomposition.hpp"
#include "lpequiv/instance.hpp"
#include "lpequiv/polytope.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace lpequiv {

namespace detail {

inline void require_exponent(double p)
{
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidInput, "p must lie in (0, 1]");
}

inline std::vector<std::size_t> support_of(const Vector& x, const Tolerances& tol)
{
    const double eps = tol.zero(inf_norm(x));
    std::vector<std::size_t> s;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x(i)) > eps) s.push_back(static_cast<std::size_t>(i));
    return s;
}

inline Matrix columns(const Matrix& a, const std::vector<std::size_t>& cols)
{
    Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(static_cast<Eigen::Index>(cols[k]));
    return out;
}

} // namespace detail

/// sum |x_i|^p, with 0^p = 0.
inline double lp_objective(const Vector& x, double p)
{
    detail::require_exponent(p);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) != 0.0) sum += std::pow(std::abs(x(i)), p);
    return sum;
}

struct SparseSolution {
    Vector x;
    std::vector<std::size_t> support;
    std::size_t l0 = 0;
    double residual = 0.0;
};

inline SparseSolution make_sparse_solution(const SolutionParam& param, Vector x, const Tolerances& tol = {})
{
    SparseSolution s;
    s.support = detail::support_of(x, tol);
    s.l0 = s.support.size();
    s.residual = param.residual(x);
    s.x = std::move(x);
    return s;
}

/// Every sparsest solution of Ax = b: supports are tried by increasing size
/// (lexicographic within a size) and the search stops at the first size with
/// a consistent least-squares fit.
inline std::vector<SparseSolution> solve_l0(const SolutionParam& param, const Options& opt = {})
{
    const auto m = param.a.rows();
    const auto n = param.dim();
    const double feas = param.feas_tol(opt.tol);
    std::vector<SparseSolution> out;
    for (Eigen::Index k = 1; k <= m && out.empty(); ++k) {
        detail::for_each_subset(static_cast<std::size_t>(n), static_cast<std::size_t>(k),
                                [&](const std::vector<std::size_t>& cols) {
            const Matrix sub = detail::columns(param.a, cols);
            const Vector coef = sub.colPivHouseholderQr().solve(param.b);
            Vector x = Vector::Zero(n);
            for (std::size_t j = 0; j < cols.size(); ++j) x(static_cast<Eigen::Index>(cols[j])) = coef(static_cast<Eigen::Index>(j));
            if (param.residual(x) <= feas) out.push_back(make_sparse_solution(param, std::move(x), opt.tol));
        });
    }
    return out;
}

inline std::vector<SparseSolution> solve_l0(const Instance& inst, const Options& opt = {})
{
    return solve_l0(decompose(inst, opt), opt);
}

/// Basic solutions: x supported on m linearly independent columns.
inline std::vector<Vector> basic_solutions(const SolutionParam& param, const Options& opt = {})
{
    const auto m = param.a.rows();
    const auto n = param.dim();
    std::vector<Vector> out;
    detail::for_each_subset(static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                            [&](const std::vector<std::size_t>& cols) {
        Eigen::ColPivHouseholderQR<Matrix> qr(detail::columns(param.a, cols));
        qr.setThreshold(opt.tol.rank);
        if (qr.rank() < m) return;
        const Vector coef = qr.solve(param.b);
        Vector x = Vector::Zero(n);
        for (std::size_t j = 0; j < cols.size(); ++j) x(static_cast<Eigen::Index>(cols[j])) = coef(static_cast<Eigen::Index>(j));
        out.push_back(std::move(x));
    });
    return out;
}

/// Largest sup-norm over all basic solutions. Every l_p minimizer with
/// 0 < p <= 1 lies in the box of this radius.
inline double basic_solution_radius(const SolutionParam& param, const Options& opt = {})
{
    double r = 0.0;
    for (const auto& x : basic_solutions(param, opt)) r = std::max(r, detail::inf_norm(x));
    return r;
}

/// ||x||_p = (sum |x_i|^p)^{1/p}; may be +inf when it overflows.
inline double lp_norm(const Vector& x, double p)
{
    const double s = lp_objective(x, p);
    return s == 0.0 ? 0.0 : std::exp(std::log(s) / p);
}

/// Inverts z = |x|: tries sign patterns on supp(z) (all positive first, then
/// by increasing binary code of the negated set) and returns the first one
/// that solves Ax = b.
inline Vector recover_sign(const Vector& z, const SolutionParam& param, const Options& opt = {})
{
    if (z.size() != param.dim()) throw Error(ErrorKind::DimensionMismatch, "modulus vector length mismatch");
    if ((z.array() < 0.0).any()) throw Error(ErrorKind::InvalidInput, "modulus vector has negative entries");
    const auto support = detail::support_of(z, opt.tol);
    if (support.size() >= 63) throw Error(ErrorKind::BlowupLimit, "support too large for sign enumeration");
    const double feas = param.feas_tol(opt.tol);
    const std::uint64_t patterns = std::uint64_t{1} << support.size();
    Vector x = Vector::Zero(param.dim());
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        for (std::size_t k = 0; k < support.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(support[k]);
            x(i) = (mask >> k) & 1U ? -z(i) : z(i);
        }
        if (param.residual(x) <= feas) return x;
    }
    throw Error(ErrorKind::SignRecoveryFailure, "no sign pattern of the modulus vector solves Ax = b");
}

struct LpSolution {
    double p = 1.0;
    Vector x;
    double objective = 0.0;
    Vector z;
    std::vector<std::size_t> vertex_certificate;
    double radius_used = 0.0;
    bool bound_warning = false;  // some |x_i| reached the box radius
};

/// Breakpoints of a corank-1 solution line x_ls + c N: the values of c at
/// which some component vanishes, ascending.
inline std::vector<double> corank1_breakpoints(const SolutionParam& param)
{
    if (param.corank() != 1) throw Error(ErrorKind::CorankMismatch, "solution set is not a line");
    std::vector<double> c;
    const auto nvec = param.null_basis.col(0);
    for (Eigen::Index i = 0; i < param.dim(); ++i)
        if (std::abs(nvec(i)) > 1e-12) c.push_back(-param.x_ls(i) / nvec(i));
    std::sort(c.begin(), c.end());
    return c;
}

/// Exact l_p minimization on a solution line. The objective is concave
/// between consecutive breakpoints and coercive, so a breakpoint is optimal.
inline LpSolution solve_lp_corank1(const SolutionParam& param, double p, const Options& opt = {})
{
    detail::require_exponent(p);
    const auto breaks = corank1_breakpoints(param);
    LpSolution best;
    best.p = p;
    best.objective = std::numeric_limits<double>::infinity();
    for (double c : breaks) {
        Vector x = param.x_ls + c * param.null_basis.col(0);
        // the component that defines this breakpoint is zero exactly in exact arithmetic
        const double eps = opt.tol.zero(detail::inf_norm(x));
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (std::abs(x(i)) <= eps) x(i) = 0.0;
        const double f = lp_objective(x, p);
        if (f < best.objective) {
            best.objective = f;
            best.x = std::move(x);
        }
    }
    best.z = best.x.cwiseAbs();
    best.radius_used = detail::inf_norm(best.x);
    return best;
}

inline LpSolution solve_lp_corank1(const Instance& inst, double p, const Options& opt = {})
{
    return solve_lp_corank1(decompose(inst, opt), p, opt);
}

/// Default box radius for l_p minimization: min(||x_ls||_p, 2 R_basic).
/// Both are bounds on every minimizer; the second stays finite as p -> 0.
inline double lp_radius(const SolutionParam& param, double p, const Options& opt = {})
{
    detail::require_exponent(p);
    return std::min(lp_norm(param.x_ls, p), 2.0 * basic_solution_radius(param, opt));
}

/// All global l_p minimizers that are vertices of G(r), r the box radius.
///
/// Concave minimization over the polytope G(r) attains its minimum at an
/// extreme point, so scoring sum z_i^p over the enumerated vertices is exact.
/// Ties within tol.tie_rel are all returned, in vertex order.
inline std::vector<LpSolution> solve_lp_extreme(const SolutionParam& param, double p,
                                                std::optional<double> radius_override = std::nullopt,
                                                const Options& opt = {})
{
    detail::require_exponent(p);
    const double r = radius_override ? *radius_override : lp_radius(param, p, opt);
    detail::require_radius(r);
    const auto verts = g_vertices(param, r, opt);

    std::vector<double> score(verts.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < verts.size(); ++k) {
        score[k] = lp_objective(verts.points[k], p);
        best = std::min(best, score[k]);
    }
    std::vector<LpSolution> out;
    for (std::size_t k = 0; k < verts.size(); ++k) {
        if (score[k] - best > opt.tol.tie_rel * best) continue;
        LpSolution s;
        s.p = p;
        s.z = verts.points[k];
        s.x = recover_sign(s.z, param, opt);
        s.objective = lp_objective(s.x, p);
        s.vertex_certificate = verts.active_sets[k];
        s.radius_used = r;
        s.bound_warning = detail::inf_norm(s.x) >= r - opt.tol.feas(r);
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<LpSolution> solve_lp_extreme(const Instance& inst, double p,
                                                std::optional<double> radius_override = std::nullopt,
                                                const Options& opt = {})
{
    return solve_lp_extreme(decompose(inst, opt), p, radius_override, opt);
}

} // namespace lpequiv
