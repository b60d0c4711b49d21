#pragma once

#include "lpequiv/config.hpp"
#include "lpequiv/instance.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace lpequiv {

/// Affine parameterization of the solution set {x : Ax = b} = {x_ls + N c}.
///
/// x_ls is the least-norm solution A^T (A A^T)^{-1} b, which lies in the row
/// space of A; the columns of `null_basis` form an orthonormal basis of N(A).
/// A copy of the (reduced) system is kept so residuals can be checked without
/// carrying the Instance around.
struct SolutionParam {
    Matrix a;
    Vector b;
    Vector x_ls;
    Matrix null_basis;

    Eigen::Index dim() const { return x_ls.size(); }
    Eigen::Index corank() const { return null_basis.cols(); }

    double residual(const Vector& x) const { return detail::inf_norm(a * x - b); }
    double feas_tol(const Tolerances& tol) const { return tol.feas(detail::inf_norm(b)); }
};

inline SolutionParam decompose(const Instance& inst, const Options& opt = {})
{
    const auto m = inst.rows();
    const auto n = inst.cols();
    const auto d = n - m;

    // A^T = Q [R; 0]; the first m columns of Q span R(A^T), the rest span N(A).
    Eigen::HouseholderQR<Matrix> qr(inst.a.transpose());
    const Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();

    double pivot_scale = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) pivot_scale = std::max(pivot_scale, std::abs(r(i, i)));
    for (Eigen::Index i = 0; i < m; ++i)
        if (!(std::abs(r(i, i)) > opt.tol.rank * pivot_scale))
            throw Error(ErrorKind::NumericalRankFailure, "cannot certify rank " + std::to_string(m));

    SolutionParam param;
    param.a = inst.a;
    param.b = inst.b;
    const Vector y = r.transpose().triangularView<Eigen::Lower>().solve(inst.b);
    param.x_ls = q.leftCols(m) * y;
    param.null_basis = q.rightCols(d);

    // Sign convention: the first non-negligible entry of every null column is positive.
    for (Eigen::Index j = 0; j < d; ++j) {
        auto col = param.null_basis.col(j);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(col(i)) > 1e-8) {
                if (col(i) < 0) col *= -1.0;
                break;
            }
        }
    }

    const double a_scale = inst.a.cwiseAbs().maxCoeff();
    const double feas = param.feas_tol(opt.tol);
    const bool ok_ls = param.residual(param.x_ls) <= feas;
    const bool ok_null = d == 0 || (inst.a * param.null_basis).cwiseAbs().maxCoeff() <= opt.tol.feas(a_scale);
    const bool ok_orth = d == 0 ||
        ((param.null_basis.transpose() * param.null_basis - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <=
             opt.tol.orth &&
         (param.null_basis.transpose() * param.x_ls).cwiseAbs().maxCoeff() <=
             opt.tol.orth * (1.0 + detail::inf_norm(param.x_ls)));
    if (!(ok_ls && ok_null && ok_orth))
        throw Error(ErrorKind::NumericalRankFailure, "factorization failed its residual checks");
    return param;
}

/// x = x_ls + N c.
inline Vector solution_at(const SolutionParam& param, const Vector& c)
{
    if (c.size() != param.corank())
        throw Error(ErrorKind::DimensionMismatch,
                    "expected " + std::to_string(param.corank()) + " null coordinates, got " +
                        std::to_string(c.size()));
    if (!c.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite null coordinates");
    return param.x_ls + param.null_basis * c;
}

/// Null coordinates of a solution x: c = N^T (x - x_ls).
inline Vector coordinates_of(const SolutionParam& param, const Vector& x)
{
    if (x.size() != param.dim()) throw Error(ErrorKind::DimensionMismatch, "solution length mismatch");
    return param.null_basis.transpose() * (x - param.x_ls);
}

} // namespace lpequiv
