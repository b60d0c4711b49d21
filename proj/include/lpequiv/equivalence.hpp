#pragma once

#include "lpequiv/config.hpp"
#include "lpequiv/decomposition.hpp"
#include "lpequiv/instance.hpp"
#include "lpequiv/polytope.hpp"
#include "lpequiv/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace lpequiv {

struct Radii {
    double r0 = 0.0;  // bounds the sparsest solutions
    double r1 = 0.0;  // n * ||x_ls||_inf
    double r = 0.0;   // max(r0, r1)
};

inline Radii compute_radii(const SolutionParam& param, const std::vector<SparseSolution>& sparsest)
{
    Radii out;
    out.r1 = static_cast<double>(param.dim()) * detail::inf_norm(param.x_ls);
    for (const auto& s : sparsest) out.r0 = std::max(out.r0, detail::inf_norm(s.x));
    out.r = std::max(out.r0, out.r1);
    return out;
}

inline Radii compute_radii(const Instance& inst, const Options& opt = {})
{
    const auto param = decompose(inst, opt);
    return compute_radii(param, solve_l0(param, opt));
}

/// Smallest nonzero coordinate over all extreme points of G(r).
inline double compute_rm(const SolutionParam& param, double r, const Options& opt = {})
{
    const auto verts = g_vertices(param, r, opt);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : verts.points) {
        const double eps = opt.tol.zero(detail::inf_norm(z));
        for (Eigen::Index i = 0; i < z.size(); ++i)
            if (z(i) > eps) best = std::min(best, z(i));
    }
    if (!std::isfinite(best)) throw Error(ErrorKind::NoNonzeroCoordinate, "every vertex of G(r) is zero");
    return best;
}

inline double compute_rm(const Instance& inst, double r, const Options& opt = {})
{
    return compute_rm(decompose(inst, opt), r, opt);
}

enum class RadiusSource { Formula, Override };

inline const char* to_string(RadiusSource s)
{
    return s == RadiusSource::Override ? "override" : "paper_formula";
}

struct Verification {
    double p = 0.0;
    bool holds = false;           // every minimizer is as sparse as the sparsest solution
    std::size_t lp_l0 = 0;        // largest l_0 count among the minimizers
    std::size_t minimizers = 0;
    bool contained = true;        // every minimizer lies in B_inf(r_used)
    bool below_bound = false;     // p < p_bound
    bool chain_ok = false;        // (r_used / r_m)^p k0 < k0 + 1
};

struct EquivalenceCertificate {
    std::size_t k0 = 0;
    double r0 = 0.0;
    double r1 = 0.0;
    double r_used = 0.0;
    double r_m = 0.0;
    double p_bound = 1.0;
    bool capped = false;
    RadiusSource radius_source = RadiusSource::Formula;
    std::vector<Verification> verifications;
};

/// Everything the certificate needs, computed once per instance.
struct Analysis {
    Instance instance;
    SolutionParam param;
    std::vector<SparseSolution> sparsest;
    Radii radii;
};

inline Analysis analyze_instance(const Instance& inst, const Options& opt = {})
{
    Analysis a{inst, decompose(inst, opt), {}, {}};
    a.sparsest = solve_l0(a.param, opt);
    a.radii = compute_radii(a.param, a.sparsest);
    return a;
}

/// Lower bound on the equivalence constant:
///   p_bound = [ln(k0 + 1) - ln k0] / [ln r - ln r_m], capped at 1.
///
/// r_m is taken over the vertices of G(r1). The override replaces r in the
/// denominator only; when r <= r_m (up to rounding) every p in (0, 1] qualifies and the bound
/// is 1 with `capped` set.
inline EquivalenceCertificate compute_bound(const Analysis& an, std::optional<double> radius_override = std::nullopt,
                                            const Options& opt = {})
{
    EquivalenceCertificate cert;
    cert.k0 = an.sparsest.empty() ? 0 : an.sparsest.front().l0;
    cert.r0 = an.radii.r0;
    cert.r1 = an.radii.r1;
    if (radius_override) {
        detail::require_radius(*radius_override);
        cert.r_used = *radius_override;
        cert.radius_source = RadiusSource::Override;
    } else {
        cert.r_used = an.radii.r;
    }
    cert.r_m = compute_rm(an.param, an.radii.r1, opt);
    const double denom = std::log(cert.r_used) - std::log(cert.r_m);
    if (denom <= opt.tol.tie_rel) {
        cert.capped = true;
        cert.p_bound = 1.0;
    } else {
        const double k0 = static_cast<double>(cert.k0);
        cert.p_bound = std::min(1.0, std::log1p(1.0 / k0) / denom);
    }
    return cert;
}

inline EquivalenceCertificate compute_bound(const Instance& inst, std::optional<double> radius_override = std::nullopt,
                                            const Options& opt = {})
{
    return compute_bound(analyze_instance(inst, opt), radius_override, opt);
}

inline Verification verify_at(const Analysis& an, const EquivalenceCertificate& cert, double p, const Options& opt = {})
{
    Verification v;
    v.p = p;
    const auto sols = solve_lp_extreme(an.param, p, std::nullopt, opt);
    v.minimizers = sols.size();
    v.holds = !sols.empty();
    const double box = cert.r_used + opt.tol.feas(cert.r_used);
    for (const auto& s : sols) {
        const auto l0 = detail::support_of(s.x, opt.tol).size();
        v.lp_l0 = std::max(v.lp_l0, l0);
        if (l0 != cert.k0) v.holds = false;
        if (detail::inf_norm(s.x) > box) v.contained = false;
    }
    v.below_bound = p < cert.p_bound;
    const double k0 = static_cast<double>(cert.k0);
    v.chain_ok = std::pow(cert.r_used / cert.r_m, p) * k0 < k0 + 1.0;
    return v;
}

inline EquivalenceCertificate verify_equivalence(const Analysis& an, const std::vector<double>& p_list,
                                                 std::optional<double> radius_override = std::nullopt,
                                                 const Options& opt = {})
{
    if (p_list.empty()) throw Error(ErrorKind::InvalidInput, "empty p list");
    auto cert = compute_bound(an, radius_override, opt);
    for (double p : p_list) cert.verifications.push_back(verify_at(an, cert, p, opt));
    return cert;
}

inline EquivalenceCertificate verify_equivalence(const Instance& inst, const std::vector<double>& p_list,
                                                 std::optional<double> radius_override = std::nullopt,
                                                 const Options& opt = {})
{
    return verify_equivalence(analyze_instance(inst, opt), p_list, radius_override, opt);
}

struct ScanResult {
    EquivalenceCertificate certificate;
    /// Largest grid p such that every grid point up to it holds.
    std::optional<double> holds_through;
    /// Smallest grid p that fails. Grid points above it may hold again.
    std::optional<double> first_failure;
};

inline ScanResult scan_pstar(const Analysis& an, const std::vector<double>& grid,
                             std::optional<double> radius_override = std::nullopt, const Options& opt = {})
{
    if (grid.empty()) throw Error(ErrorKind::InvalidInput, "empty p grid");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        detail::require_exponent(grid[k]);
        if (k > 0 && !(grid[k] > grid[k - 1])) throw Error(ErrorKind::InvalidInput, "p grid must be ascending");
    }
    ScanResult out{verify_equivalence(an, grid, radius_override, opt), std::nullopt, std::nullopt};
    for (const auto& v : out.certificate.verifications) {
        if (!v.holds) {
            out.first_failure = v.p;
            break;
        }
        out.holds_through = v.p;
    }
    return out;
}

inline ScanResult scan_pstar(const Instance& inst, const std::vector<double>& grid,
                             std::optional<double> radius_override = std::nullopt, const Options& opt = {})
{
    return scan_pstar(analyze_instance(inst, opt), grid, radius_override, opt);
}

} // namespace lpequiv
