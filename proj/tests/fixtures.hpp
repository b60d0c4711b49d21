#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the polytope or solver code paths it is used to check.

#include "lpequiv/lpequiv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace lpequiv::testing {

inline Matrix example1_matrix()
{
    Matrix a(3, 4);
    a << -20.0 / 29.0, 1.0, 31.0 / 87.0, 0.0,
         0.0, 1.0, 8.0 / 15.0, 1.0,
         60.0 / 29.0, 0.0, 463.0 / 435.0, -1.0;
    return a;
}

inline Vector example1_rhs() { return (Vector(3) << 1.0, 2.0, 3.0).finished(); }

inline Instance example1() { return load_and_reduce(example1_matrix(), example1_rhs()); }

/// The hand parameterization of the Example-1 solution line, x_1 = t.
inline Vector example1_point(double t)
{
    return (Vector(4) << t, -4.0 / 27.0 + 40.0 / 27.0 * t, 29.0 / 9.0 * (1.0 - 20.0 / 29.0 * t),
            58.0 / 135.0 * (1.0 - 20.0 / 29.0 * t))
        .finished();
}

inline Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Random valid instance with small-rational entries k/q, k in [-3, 3],
/// q in {1, 2, 3}. Retries until the system passes validation with the
/// requested shape.
inline Instance random_instance(std::mt19937& rng, Eigen::Index m, Eigen::Index n)
{
    std::uniform_int_distribution<int> num(-3, 3);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> rhs(-4, 4);
    for (;;) {
        Matrix a(m, n);
        Vector b(m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) a(i, j) = static_cast<double>(num(rng)) / den(rng);
        for (Eigen::Index i = 0; i < m; ++i) b(i) = rhs(rng);
        try {
            auto inst = load_and_reduce(a, b);
            if (inst.rows() == m) return inst;
        } catch (const Error&) {
        }
    }
}

/// Random instance with continuous entries (generic position).
inline Instance random_generic_instance(std::mt19937& rng, Eigen::Index m, Eigen::Index n)
{
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        Matrix a(m, n);
        Vector b(m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
        for (Eigen::Index i = 0; i < m; ++i) b(i) = u(rng);
        try {
            auto inst = load_and_reduce(a, b);
            if (inst.rows() == m) return inst;
        } catch (const Error&) {
        }
    }
}

/// Minimum support size over all 2^n column subsets (least squares per subset).
inline std::size_t powerset_l0(const Matrix& a, const Vector& b, double tol)
{
    const auto n = a.cols();
    std::size_t best = static_cast<std::size_t>(n) + 1;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < n; ++j)
            if (mask & (1u << j)) cols.push_back(j);
        Matrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
        const Vector coef = sub.completeOrthogonalDecomposition().solve(b);
        if ((sub * coef - b).cwiseAbs().maxCoeff() <= tol) best = std::min(best, cols.size());
    }
    return best;
}

/// Support-size-k feasibility (any support of exactly size k).
inline bool some_support_of_size(const Matrix& a, const Vector& b, std::size_t k, double tol)
{
    const auto n = a.cols();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < n; ++j)
            if (mask & (1u << j)) cols.push_back(j);
        Matrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
        const Vector coef = sub.completeOrthogonalDecomposition().solve(b);
        if ((sub * coef - b).cwiseAbs().maxCoeff() <= tol) return true;
    }
    return false;
}

/// phi(z) = min over c of max_i (|x_ls + N c|_i - z_i), computed exactly:
/// the minimum of a max of 2n affine pieces in (c, t) is attained where d+1
/// pieces are equal, so all (d+1)-subsets are tried. z is in the modulus
/// set {z : exists x, Ax=b, |x| <= z} iff phi(z) <= 0.
inline double modulus_gap(const SolutionParam& param, const Vector& z)
{
    const auto n = param.dim();
    const auto d = param.corank();
    // piece k: s_k (x_ls_i + N_i c) - z_i with (i, s_k) = (k / 2, +-1)
    const auto pieces = 2 * n;
    auto piece_coef = [&](Eigen::Index k) -> Vector { return (k % 2 ? -1.0 : 1.0) * param.null_basis.row(k / 2).transpose(); };
    auto piece_off = [&](Eigen::Index k) { return (k % 2 ? -1.0 : 1.0) * param.x_ls(k / 2) - z(k / 2); };
    auto phi_at = [&](const Vector& c) {
        double v = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < pieces; ++k) v = std::max(v, piece_coef(k).dot(c) + piece_off(k));
        return v;
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(d + 1));
    // enumerate (d+1)-subsets
    std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start, Eigen::Index depth) {
        if (depth == d + 1) {
            // unknowns (c, t): coef_k . c - t = -off_k
            Matrix m(d + 1, d + 1);
            Vector rhs(d + 1);
            for (Eigen::Index r = 0; r <= d; ++r) {
                m.row(r).head(d) = piece_coef(idx[r]).transpose();
                m(r, d) = -1.0;
                rhs(r) = -piece_off(idx[r]);
            }
            Eigen::FullPivLU<Matrix> lu(m);
            if (!lu.isInvertible()) return;
            const Vector sol = lu.solve(rhs);
            best = std::min(best, phi_at(sol.head(d)));
            return;
        }
        for (Eigen::Index k = start; k < pieces; ++k) {
            idx[depth] = k;
            rec(k + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

/// True when z lies in [0, r]^n and phi(z) <= tol.
inline bool in_g_oracle(const SolutionParam& param, const Vector& z, double r, double tol)
{
    if ((z.array() < -tol).any() || (z.array() > r + tol).any()) return false;
    return modulus_gap(param, z) <= tol;
}

/// Whether v is a convex combination of `others`. By Farkas, v lies outside
/// the hull exactly when some a has a.(p_j - v) <= -1 for every p_j, which
/// is decided by Fourier-Motzkin in the dimension of v.
inline bool in_convex_hull(const std::vector<Vector>& others, const Vector& v, const Options& opt = {})
{
    if (others.empty()) return false;
    HPolyhedron sep;
    sep.dim = v.size();
    for (const auto& p : others) sep.add(p - v, -1.0, RowOrigin::Derived);
    return !feasible(sep, opt);
}

/// Best objective over a uniform grid of `count` points on the corank-1 line,
/// c in [lo, hi].
inline double line_grid_min(const SolutionParam& param, double p, double lo, double hi, int count)
{
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < count; ++s) {
        const double c = lo + (hi - lo) * s / (count - 1);
        const Vector x = param.x_ls + c * param.null_basis.col(0);
        double f = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) f += std::pow(std::abs(x(i)), p);
        best = std::min(best, f);
    }
    return best;
}

// Lambda with z fixed: a polyhedron in the null coordinates c only.
inline HPolyhedron fix_z(const HPolyhedron& lifted, const Vector& z)
{
    const auto n = z.size();
    HPolyhedron out;
    out.dim = lifted.dim - n;
    for (const auto& row : lifted.rows) out.add(row.h.tail(out.dim), row.gamma - row.h.head(n).dot(z), row.origin);
    return out;
}

} // namespace lpequiv::testing
