#pragma once

#include "lpequiv/config.hpp"
#include "lpequiv/instance.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

namespace lpequiv {

enum class RowOrigin { Box, Lambda, Affine, Derived };

inline const char* to_string(RowOrigin origin)
{
    switch (origin) {
    case RowOrigin::Box: return "box";
    case RowOrigin::Lambda: return "lambda";
    case RowOrigin::Affine: return "affine";
    case RowOrigin::Derived: return "derived";
    }
    return "?";
}

/// <h, x> <= gamma
struct HalfSpace {
    Vector h;
    double gamma = 0.0;
    RowOrigin origin = RowOrigin::Derived;
};

/// {x in R^dim : <h_k, x> <= gamma_k for every row k}.
///
/// `known_empty` is set when a constant contradiction 0 <= gamma < 0 has been
/// derived; such a row is kept as the emptiness certificate.
struct HPolyhedron {
    Eigen::Index dim = 0;
    std::vector<HalfSpace> rows;
    bool known_empty = false;

    std::size_t size() const { return rows.size(); }

    void add(Vector h, double gamma, RowOrigin origin)
    {
        if (h.size() != dim) throw Error(ErrorKind::DimensionMismatch, "row length differs from polyhedron dim");
        if (!h.allFinite() || !std::isfinite(gamma)) throw Error(ErrorKind::InvalidInput, "non-finite row");
        rows.push_back({std::move(h), gamma, origin});
    }
};

namespace detail {

// Slack allowance for a row evaluated at x, scaled by the magnitudes involved.
inline double row_tolerance(const HalfSpace& row, const Vector& x, double rel)
{
    return rel * (1.0 + std::abs(row.gamma) + row.h.cwiseProduct(x).cwiseAbs().sum());
}

inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap)
{
    if (k > n) return 0;
    k = std::min(k, n - k);
    long double result = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (result > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<std::uint64_t>(std::llround(result));
}

// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn)
{
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
        fn(static_cast<const std::vector<std::size_t>&>(idx));
        if (k == 0) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline bool lex_less(const Vector& a, const Vector& b)
{
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

class Ancestry {
public:
    Ancestry() = default;
    Ancestry(std::size_t universe, std::size_t bit) : words_((universe + 63) / 64, 0)
    {
        words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
    Ancestry operator|(const Ancestry& other) const
    {
        Ancestry out = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] |= other.words_[i];
        return out;
    }
    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct WorkRow {
    Vector h;
    double gamma;
    RowOrigin origin;
    Ancestry ancestry;
};

constexpr double kCoefZero = 1e-12;

// Scales h to unit max-norm. Returns false when h is numerically zero.
inline bool normalize(WorkRow& row)
{
    const double s = row.h.size() ? row.h.cwiseAbs().maxCoeff() : 0.0;
    if (s <= kCoefZero) {
        row.h.setZero();
        return false;
    }
    row.h /= s;
    row.gamma /= s;
    for (Eigen::Index i = 0; i < row.h.size(); ++i)
        if (std::abs(row.h(i)) <= kCoefZero) row.h(i) = 0.0;
    return true;
}

// Keeps, for each normalized direction, only the tightest row.
inline void drop_parallel_duplicates(std::vector<WorkRow>& rows)
{
    std::stable_sort(rows.begin(), rows.end(), [](const WorkRow& a, const WorkRow& b) {
        if (lex_less(a.h, b.h)) return true;
        if (lex_less(b.h, a.h)) return false;
        return a.gamma < b.gamma;
    });
    std::vector<WorkRow> kept;
    kept.reserve(rows.size());
    for (auto& row : rows) {
        if (!kept.empty() && (kept.back().h - row.h).cwiseAbs().maxCoeff() <= kCoefZero) {
            if (row.gamma < kept.back().gamma) kept.back() = std::move(row);
            continue;
        }
        kept.push_back(std::move(row));
    }
    rows = std::move(kept);
}

} // namespace detail

/// Fourier-Motzkin projection onto the coordinates not listed in `drop_vars`.
///
/// Remaining coordinates keep their relative order. Pruning is syntactic:
/// rows are scaled to unit max-norm, parallel duplicates keep the tightest
/// offset, and a derived row whose ancestor set exceeds (eliminated + 1)
/// original rows is discarded (it is implied by the others). A derived
/// constant contradiction marks the result empty.
inline HPolyhedron fm_eliminate(const HPolyhedron& poly, std::vector<Eigen::Index> drop_vars,
                                const Options& opt = {})
{
    std::sort(drop_vars.begin(), drop_vars.end());
    if (std::adjacent_find(drop_vars.begin(), drop_vars.end()) != drop_vars.end())
        throw Error(ErrorKind::InvalidInput, "duplicate variable in elimination list");
    for (auto v : drop_vars)
        if (v < 0 || v >= poly.dim) throw Error(ErrorKind::InvalidInput, "elimination index out of range");

    const std::size_t universe = poly.rows.size();
    std::vector<detail::WorkRow> rows;
    bool empty = poly.known_empty;
    for (std::size_t k = 0; k < poly.rows.size(); ++k) {
        detail::WorkRow row{poly.rows[k].h, poly.rows[k].gamma, poly.rows[k].origin,
                            detail::Ancestry(universe, k)};
        if (!detail::normalize(row)) {
            if (row.gamma < -opt.tol.feas_rel) empty = true;
            continue;
        }
        rows.push_back(std::move(row));
    }
    detail::drop_parallel_duplicates(rows);

    std::vector<Eigen::Index> pending = drop_vars;
    std::size_t eliminated = 0;
    while (!pending.empty() && !empty) {
        // Pick the variable with the smallest pos*neg product (ties: lowest index).
        std::size_t best = 0;
        std::size_t best_cost = SIZE_MAX;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            std::size_t pos = 0, neg = 0;
            for (const auto& r : rows) {
                if (r.h(pending[k]) > 0) ++pos;
                else if (r.h(pending[k]) < 0) ++neg;
            }
            const std::size_t cost = pos * neg;
            if (cost < best_cost) {
                best_cost = cost;
                best = k;
            }
        }
        const Eigen::Index var = pending[best];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
        ++eliminated;

        std::vector<const detail::WorkRow*> pos, neg;
        std::vector<detail::WorkRow> next;
        for (const auto& r : rows) {
            if (r.h(var) > 0) pos.push_back(&r);
            else if (r.h(var) < 0) neg.push_back(&r);
            else next.push_back(r);
        }
        for (const auto* p : pos) {
            for (const auto* q : neg) {
                auto ancestry = p->ancestry | q->ancestry;
                if (ancestry.count() > eliminated + 1) continue;
                const double wp = -q->h(var);
                const double wq = p->h(var);
                detail::WorkRow row{wp * p->h + wq * q->h, wp * p->gamma + wq * q->gamma, RowOrigin::Derived,
                                    std::move(ancestry)};
                row.h(var) = 0.0;
                if (!detail::normalize(row)) {
                    const double slack = opt.tol.feas_rel * (1.0 + std::abs(wp * p->gamma) + std::abs(wq * q->gamma));
                    if (row.gamma < -slack) empty = true;
                    continue;
                }
                next.push_back(std::move(row));
            }
            if (next.size() > opt.caps.fm_row_cap)
                throw Error(ErrorKind::BlowupLimit,
                            "Fourier-Motzkin row count exceeds " + std::to_string(opt.caps.fm_row_cap));
        }
        detail::drop_parallel_duplicates(next);
        rows = std::move(next);
    }

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < poly.dim; ++i)
        if (!std::binary_search(drop_vars.begin(), drop_vars.end(), i)) keep.push_back(i);

    HPolyhedron out;
    out.dim = static_cast<Eigen::Index>(keep.size());
    if (empty) {
        out.known_empty = true;
        out.rows.push_back({Vector::Zero(out.dim), -1.0, RowOrigin::Derived});
        return out;
    }
    for (const auto& r : rows) {
        Vector h(out.dim);
        for (std::size_t k = 0; k < keep.size(); ++k) h(static_cast<Eigen::Index>(k)) = r.h(keep[k]);
        out.rows.push_back({std::move(h), r.gamma, r.origin});
    }
    return out;
}

/// Exact emptiness test by eliminating every variable.
inline bool feasible(const HPolyhedron& poly, const Options& opt = {})
{
    std::vector<Eigen::Index> all(static_cast<std::size_t>(poly.dim));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    return !fm_eliminate(poly, all, opt).known_empty;
}

/// True when x satisfies every row up to the relative feasibility tolerance.
inline bool contains(const HPolyhedron& poly, const Vector& x, const Tolerances& tol = {})
{
    if (poly.known_empty) return false;
    for (const auto& row : poly.rows)
        if (row.h.dot(x) - row.gamma > detail::row_tolerance(row, x, tol.feas_rel)) return false;
    return true;
}

/// Indices of rows satisfied with equality (within tolerance) at x.
inline std::vector<std::size_t> active_rows(const HPolyhedron& poly, const Vector& x, const Tolerances& tol = {})
{
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < poly.rows.size(); ++k) {
        const auto& row = poly.rows[k];
        if (std::abs(row.h.dot(x) - row.gamma) <= detail::row_tolerance(row, x, tol.feas_rel)) active.push_back(k);
    }
    return active;
}

inline Eigen::Index rank_of_rows(const HPolyhedron& poly, const std::vector<std::size_t>& which, double rel = 1e-9)
{
    if (which.empty()) return 0;
    Matrix m(static_cast<Eigen::Index>(which.size()), poly.dim);
    for (std::size_t k = 0; k < which.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = poly.rows[which[k]].h;
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(rel);
    return qr.rank();
}

struct VertexSet {
    std::vector<Vector> points;
    std::vector<std::vector<std::size_t>> active_sets;
    HPolyhedron source;

    std::size_t size() const { return points.size(); }
};

namespace detail {

// Sorts points lexicographically, coordinates within the dedup tolerance
// counting as equal, and attaches active sets from `source`.
inline VertexSet finish_vertex_set(std::vector<Vector> points, HPolyhedron source, const Tolerances& tol)
{
    std::sort(points.begin(), points.end(), [&](const Vector& a, const Vector& b) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (std::abs(a(i) - b(i)) <= tol.dedup(std::max(std::abs(a(i)), std::abs(b(i))))) continue;
            return a(i) < b(i);
        }
        return false;
    });
    VertexSet out;
    out.active_sets.reserve(points.size());
    for (const auto& p : points) out.active_sets.push_back(active_rows(source, p, tol));
    out.points = std::move(points);
    out.source = std::move(source);
    return out;
}

inline bool near_any(const std::vector<Vector>& found, const Vector& x, const Tolerances& tol)
{
    const double eps = tol.dedup(x.cwiseAbs().maxCoeff());
    return std::any_of(found.begin(), found.end(),
                       [&](const Vector& v) { return (v - x).cwiseAbs().maxCoeff() <= eps; });
}

} // namespace detail

/// All extreme points of a bounded polyhedron by active-set enumeration:
/// every q-subset of rows with rank q is solved and kept when feasible.
/// Output is lexicographically ordered; throws Unbounded when the recession
/// cone is nontrivial.
inline VertexSet enumerate_vertices(const HPolyhedron& poly, const Options& opt = {})
{
    const auto q = static_cast<std::size_t>(poly.dim);
    const std::size_t rows = poly.rows.size();
    if (q == 0) throw Error(ErrorKind::InvalidInput, "polyhedron has dimension 0");
    if (poly.known_empty) return detail::finish_vertex_set({}, poly, opt.tol);

    Matrix h(static_cast<Eigen::Index>(rows), poly.dim);
    Vector g(static_cast<Eigen::Index>(rows));
    for (std::size_t k = 0; k < rows; ++k) {
        h.row(static_cast<Eigen::Index>(k)) = poly.rows[k].h;
        g(static_cast<Eigen::Index>(k)) = poly.rows[k].gamma;
    }
    if (rows < q || Eigen::ColPivHouseholderQR<Matrix>(h).setThreshold(1e-10).rank() < static_cast<Eigen::Index>(q))
        throw Error(ErrorKind::Unbounded, "row matrix has rank below the dimension");

    const std::uint64_t cap = opt.caps.subset_cap;
    if (detail::binomial_capped(rows, q, cap) > cap || detail::binomial_capped(rows, q - 1, cap) > cap)
        throw Error(ErrorKind::BlowupLimit, "too many row subsets for exact vertex enumeration");

    // Recession cone {y : Hy <= 0}: with rank(H) = q it is pointed, so it is
    // nontrivial iff some extreme ray exists, i.e. a direction fixed by q-1
    // independent rows that satisfies all the others.
    const Vector row_norms = h.rowwise().norm();
    detail::for_each_subset(rows, q - 1, [&](const std::vector<std::size_t>& idx) {
        Vector dir;
        if (q == 1) {
            dir = Vector::Ones(1);
        } else {
            Matrix sub(static_cast<Eigen::Index>(q - 1), poly.dim);
            for (std::size_t k = 0; k < idx.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = h.row(idx[k]);
            Eigen::FullPivLU<Matrix> lu(sub);
            lu.setThreshold(1e-10);
            if (lu.rank() != static_cast<Eigen::Index>(q - 1)) return;
            dir = lu.kernel().col(0).normalized();
        }
        for (double sign : {1.0, -1.0}) {
            const Vector hy = sign * (h * dir);
            bool ray = true;
            for (Eigen::Index k = 0; k < hy.size() && ray; ++k) ray = hy(k) <= 1e-10 * row_norms(k);
            if (ray) throw Error(ErrorKind::Unbounded, "polyhedron has a recession direction");
        }
    });

    std::vector<Vector> found;
    Matrix sub(poly.dim, poly.dim);
    Vector rhs(poly.dim);
    detail::for_each_subset(rows, q, [&](const std::vector<std::size_t>& idx) {
        for (std::size_t k = 0; k < q; ++k) {
            sub.row(static_cast<Eigen::Index>(k)) = h.row(idx[k]);
            rhs(static_cast<Eigen::Index>(k)) = g(idx[k]);
        }
        Eigen::FullPivLU<Matrix> lu(sub);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        const Vector x = lu.solve(rhs);
        if (!x.allFinite() || !contains(poly, x, opt.tol)) return;
        if (!detail::near_any(found, x, opt.tol)) found.push_back(x);
    });
    return detail::finish_vertex_set(std::move(found), poly, opt.tol);
}

/// Debug text: one row per line, "h_1 ... h_q <= gamma" with 17 significant digits.
inline std::string dump(const HPolyhedron& poly)
{
    std::string out;
    char buf[64];
    for (const auto& row : poly.rows) {
        for (Eigen::Index i = 0; i < row.h.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g ", row.h(i));
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "<= %.17g\n", row.gamma);
        out += buf;
    }
    return out;
}

} // namespace lpequiv
