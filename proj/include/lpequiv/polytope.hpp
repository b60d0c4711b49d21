#pragma once

#include "lpequiv/config.hpp"
#include "lpequiv/decomposition.hpp"
#include "lpequiv/polyhedron.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

namespace lpequiv {

namespace detail {

inline void require_radius(double r)
{
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidInput, "radius must be positive and finite");
}

inline void require_caps(const SolutionParam& param, const Options& opt)
{
    if (static_cast<std::size_t>(param.dim()) > opt.caps.n_max ||
        static_cast<std::size_t>(param.corank()) > opt.caps.d_max)
        throw Error(ErrorKind::BlowupLimit, "instance exceeds size caps (n = " + std::to_string(param.dim()) +
                                                ", d = " + std::to_string(param.corank()) + ")");
}

} // namespace detail

/// Lifted polyhedron in (z, c) in R^{n+d}:
///   -z - N c <= x_ls,   -z + N c <= -x_ls,   0 <= z <= r.
/// The first two families say |x_ls + N c| <= z componentwise.
inline HPolyhedron build_lambda(const SolutionParam& param, double r)
{
    detail::require_radius(r);
    const auto n = param.dim();
    const auto d = param.corank();
    HPolyhedron poly;
    poly.dim = n + d;
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector h = Vector::Zero(n + d);
        h(i) = -1.0;
        h.tail(d) = -param.null_basis.row(i).transpose();
        poly.add(h, param.x_ls(i), RowOrigin::Lambda);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector h = Vector::Zero(n + d);
        h(i) = -1.0;
        h.tail(d) = param.null_basis.row(i).transpose();
        poly.add(h, -param.x_ls(i), RowOrigin::Lambda);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector h = Vector::Zero(n + d);
        h(i) = -1.0;
        poly.add(h, 0.0, RowOrigin::Box);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector h = Vector::Zero(n + d);
        h(i) = 1.0;
        poly.add(h, r, RowOrigin::Box);
    }
    return poly;
}

/// G(r) = {z in [0, r]^n : some solution x of Ax = b has |x| <= z},
/// as the projection of build_lambda onto z.
inline HPolyhedron g_of_r(const SolutionParam& param, double r, const Options& opt = {})
{
    detail::require_caps(param, opt);
    const auto lifted = build_lambda(param, r);
    std::vector<Eigen::Index> c_vars;
    for (Eigen::Index j = 0; j < param.corank(); ++j) c_vars.push_back(param.dim() + j);
    return fm_eliminate(lifted, c_vars, opt);
}

/// {x : Ax = b, |x_i| <= r}: rows e_1, -e_1, e_2, -e_2, ... against r, then
/// the equalities as the pairs A x <= b, -A x <= -b.
inline HPolyhedron omega_of_r(const SolutionParam& param, double r)
{
    detail::require_radius(r);
    const auto n = param.dim();
    HPolyhedron poly;
    poly.dim = n;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vector h = Vector::Zero(n);
            h(i) = sign;
            poly.add(h, r, RowOrigin::Box);
        }
    }
    for (Eigen::Index k = 0; k < param.a.rows(); ++k) poly.add(param.a.row(k).transpose(), param.b(k), RowOrigin::Affine);
    for (Eigen::Index k = 0; k < param.a.rows(); ++k)
        poly.add(-param.a.row(k).transpose(), -param.b(k), RowOrigin::Affine);
    return poly;
}

/// Extreme points of G(r).
///
/// Every vertex of G(r) is the image of a vertex (z, c) of the lifted
/// polytope. At such a vertex c is pinned by d independent equations
/// x_i(c) in {0, r, -r}, and each z_i is |x_i(c)| or r. Those candidates are
/// generated directly and kept when they are vertices of the projected
/// H-representation (feasible, active rows of rank n).
inline VertexSet g_vertices(const SolutionParam& param, double r, const Options& opt = {})
{
    detail::require_radius(r);
    auto g = g_of_r(param, r, opt);
    const auto n = param.dim();
    const auto d = param.corank();
    const auto& tol = opt.tol;
    const double box_tol = tol.feas(r);

    // Solution points at vertices of the hyperplane arrangement, inside the box.
    std::vector<Vector> anchors;
    const double levels[3] = {0.0, r, -r};
    Matrix sub(d, d);
    Vector rhs(d);
    detail::for_each_subset(static_cast<std::size_t>(n), static_cast<std::size_t>(d),
                            [&](const std::vector<std::size_t>& coords) {
        for (std::size_t k = 0; k < coords.size(); ++k)
            sub.row(static_cast<Eigen::Index>(k)) = param.null_basis.row(static_cast<Eigen::Index>(coords[k]));
        Eigen::FullPivLU<Matrix> lu(sub);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        std::size_t combos = 1;
        for (Eigen::Index k = 0; k < d; ++k) combos *= 3;
        for (std::size_t code = 0; code < combos; ++code) {
            std::size_t rest = code;
            for (std::size_t k = 0; k < coords.size(); ++k) {
                rhs(static_cast<Eigen::Index>(k)) = levels[rest % 3] - param.x_ls(static_cast<Eigen::Index>(coords[k]));
                rest /= 3;
            }
            const Vector x = param.x_ls + param.null_basis * lu.solve(rhs);
            if (!x.allFinite() || x.cwiseAbs().maxCoeff() > r + box_tol) continue;
            if (!detail::near_any(anchors, x, tol)) anchors.push_back(x);
        }
    });

    std::vector<Vector> found;
    for (const auto& x : anchors) {
        const double zero_tol = tol.zero(x.cwiseAbs().maxCoeff());
        Vector base(n);
        std::vector<Eigen::Index> free_coords;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ax = std::abs(x(i));
            if (ax >= r - box_tol) {
                base(i) = r;
            } else {
                base(i) = ax <= zero_tol ? 0.0 : ax;
                free_coords.push_back(i);
            }
        }
        const std::size_t masks = std::size_t{1} << free_coords.size();
        for (std::size_t mask = 0; mask < masks; ++mask) {
            Vector z = base;
            for (std::size_t k = 0; k < free_coords.size(); ++k)
                if (mask & (std::size_t{1} << k)) z(free_coords[k]) = r;
            if (detail::near_any(found, z, tol) || !contains(g, z, tol)) continue;
            if (rank_of_rows(g, active_rows(g, z, tol)) == n) found.push_back(z);
        }
    }
    return detail::finish_vertex_set(std::move(found), std::move(g), tol);
}

} // namespace lpequiv
