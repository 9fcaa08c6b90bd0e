#pragma once

#include "invfd/problems.hpp"
#include "invfd/stencil.hpp"  // SchemeName

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace invfd {

/// Uniform 1-D grid with ghost layers. Grid index i runs over
/// [-ghost_depth, n_points + ghost_depth); x_i = x0 + i h.
struct Grid1D {
    double x0 = 0;
    double h = 0;
    int n_points = 0;
    int ghost_depth = 2;

    Grid1D(double x0_, double h_, int n, int ghost = 2)
        : x0(x0_), h(h_), n_points(n), ghost_depth(ghost) {
        if (h <= 0) throw std::invalid_argument("Grid1D: h must be positive");
        if (n_points < 5) throw std::invalid_argument("Grid1D: need at least 5 points");
        if (ghost_depth < 2)
            throw std::invalid_argument("Grid1D: ghost_depth must be >= 2 (delta^4 stencil)");
    }

    double x_at(int i) const { return x0 + i * h; }
    int storage_size() const { return n_points + 2 * ghost_depth; }
    int slot(int i) const { return i + ghost_depth; }
};

struct InstabilityError : std::runtime_error {
    int index;
    double time;
    InstabilityError(int i, double t)
        : std::runtime_error("non-finite field value at grid index " + std::to_string(i) +
                             ", t = " + std::to_string(t)),
          index(i), time(t) {}
};

/// Discrete solution state u^n_i over a grid, ghosts included.
struct Field {
    std::vector<double> values;
    double time = 0;

    Field() = default;
    Field(const Grid1D& g, double t = 0) : values(g.storage_size(), 0.0), time(t) {}

    double& at(const Grid1D& g, int i) { return values[g.slot(i)]; }
    double at(const Grid1D& g, int i) const { return values[g.slot(i)]; }

    void require_finite(const Grid1D& g) const {
        for (int i = -g.ghost_depth; i < g.n_points + g.ghost_depth; ++i)
            if (!std::isfinite(at(g, i))) throw InstabilityError(i, time);
    }
};

// ---------------------------------------------------------------------------
// Hildebrand operators (undivided; schemes divide by powers of h explicitly)

enum class DiscreteOp {
    Delta,       // u_{i+1} - u_i, the central difference at i+1/2
    Mu,          // (u_{i+1} + u_i)/2, the average at i+1/2
    DeltaPlus,   // u_{i+1} - u_i at i
    DeltaMinus,  // u_i - u_{i-1} at i
    Shift,       // E^alpha: u_{i+alpha}
    Delta2,      // u_{i+1} - 2u_i + u_{i-1}
    Delta3,      // delta^3 at i+1/2: u_{i+2} - 3u_{i+1} + 3u_i - u_{i-1}
    Delta4,      // u_{i+2} - 4u_{i+1} + 6u_i - 4u_{i-1} + u_{i-2}
    MuDelta,     // (u_{i+1} - u_{i-1})/2
    MuDelta3,    // (u_{i+2} - 2u_{i+1} + 2u_{i-1} - u_{i-2})/2
};

/// Value of the operator applied to f. The half-point operators Delta, Mu,
/// Delta3 are centered at i + 1/2; the rest land on the integer point i.
/// alpha is the Shift offset and is ignored by the other kinds.
inline double discrete_op(DiscreteOp kind, const Field& f, const Grid1D& g, int i,
                          int alpha = 0) {
    int lo, hi;
    switch (kind) {
        case DiscreteOp::Delta: case DiscreteOp::Mu: case DiscreteOp::DeltaPlus: lo = 0; hi = 1; break;
        case DiscreteOp::DeltaMinus: lo = -1; hi = 0; break;
        case DiscreteOp::Shift: lo = hi = alpha; break;
        case DiscreteOp::Delta2: case DiscreteOp::MuDelta: lo = -1; hi = 1; break;
        case DiscreteOp::Delta3: lo = -1; hi = 2; break;
        case DiscreteOp::Delta4: case DiscreteOp::MuDelta3: lo = -2; hi = 2; break;
    }
    if (i + lo < -g.ghost_depth || i + hi >= g.n_points + g.ghost_depth)
        throw std::out_of_range("discrete_op: stencil exceeds available ghost range at i = " +
                                std::to_string(i));
    auto v = [&](int k) { return f.at(g, i + k); };
    switch (kind) {
        case DiscreteOp::Delta: return v(1) - v(0);
        case DiscreteOp::Mu: return 0.5 * (v(1) + v(0));
        case DiscreteOp::DeltaPlus: return v(1) - v(0);
        case DiscreteOp::DeltaMinus: return v(0) - v(-1);
        case DiscreteOp::Shift: return v(alpha);
        case DiscreteOp::Delta2: return v(1) - 2 * v(0) + v(-1);
        case DiscreteOp::Delta3: return v(2) - 3 * v(1) + 3 * v(0) - v(-1);
        case DiscreteOp::Delta4: return v(2) - 4 * v(1) + 6 * v(0) - 4 * v(-1) + v(-2);
        case DiscreteOp::MuDelta: return 0.5 * (v(1) - v(-1));
        case DiscreteOp::MuDelta3: return 0.5 * (v(2) - 2 * v(1) + 2 * v(-1) - v(-2));
    }
    throw std::invalid_argument("discrete_op: unknown kind");
}

// ---------------------------------------------------------------------------
// Artificial-viscosity specification

/// C is either the built-in family kappa t (t u - x)^2 u_x^2 or identically
/// zero (the high-order scheme). An anchored CSpec freezes the derived Omega
/// profile at reference steps (h0, tau0): C_eff = tau u^2/2 - (h/h0)^2
/// (tau0 u^2/2 - C_family), so refining (h, tau) keeps Omega fixed. Used by
/// step-refinement studies; plain runs leave the anchor unset.
struct CSpec {
    enum class Form { Family, Zero };

    Form form = Form::Zero;
    double kappa = 0;
    std::optional<std::pair<double, double>> anchor;  // (h0, tau0)

    static CSpec zero() { return {}; }
    static CSpec family(double kappa = -0.01) { return {Form::Family, kappa, {}}; }

    double family_value(double x, double t, double u, double ux) const {
        if (form == Form::Zero) return 0.0;
        double w = t * u - x;
        return kappa * t * w * w * ux * ux;
    }

    double effective_c(double x, double t, double u, double ux, double h, double tau) const {
        double cf = family_value(x, t, u, ux);
        if (!anchor) return cf;
        auto [h0, tau0] = *anchor;
        double r = h / h0;
        return tau * u * u / 2 - r * r * (tau0 * u * u / 2 - cf);
    }
};

struct StepParams {
    double tau = 0;
    double nu = 0;
    CSpec cspec;
    std::function<double(double x, double t)> source;  // optional manufactured forcing

    StepParams(double tau_, double nu_, CSpec c = CSpec::zero())
        : tau(tau_), nu(nu_), cspec(std::move(c)) {
        if (tau <= 0) throw std::invalid_argument("StepParams: tau must be positive");
        if (nu < 0) throw std::invalid_argument("StepParams: nu must be nonnegative");
    }
};

/// Omega such that C = tau u^2/2 - h^2 Omega holds exactly at the evaluation
/// point (x at the geometric half point, u and u_x the half-point values).
inline double compute_omega(double x, double t, double u_half, double ux_half,
                            const StepParams& p, double h) {
    if (h <= 0) throw std::invalid_argument("compute_omega: h must be positive");
    double c = p.cspec.effective_c(x, t, u_half, ux_half, h, p.tau);
    return (p.tau * u_half * u_half / 2 - c) / (h * h);
}

/// Endpoint/ghost data source: x and t to boundary value.
using BoundaryProvider = std::function<double(double x, double t)>;

namespace detail {

/// Write endpoint + ghost values at time t_new from the boundary provider.
inline void fill_boundary(Field& f, const Grid1D& g, const BoundaryProvider& bc,
                          double t_new) {
    for (int i = -g.ghost_depth; i <= 0; ++i) f.at(g, i) = bc(g.x_at(i), t_new);
    for (int i = g.n_points - 1; i < g.n_points + g.ghost_depth; ++i)
        f.at(g, i) = bc(g.x_at(i), t_new);
}

inline double flux(double u) { return 0.5 * u * u; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Explicit steppers

namespace detail {

inline void step_ftcs(const Field& f, Field& out, const StepParams& p, const Grid1D& g) {
    const double h = g.h, tau = p.tau, nu = p.nu;
    for (int i = 1; i < g.n_points - 1; ++i) {
        auto u = [&](int k) { return f.at(g, i + k); };
        double conv = (flux(u(1)) - flux(u(-1))) / (2 * h);
        double diff = nu * (u(1) - 2 * u(0) + u(-1)) / (h * h);
        double rhs = conv - diff;
        if (p.source) rhs -= p.source(g.x_at(i), f.time);
        out.at(g, i) = u(0) - tau * rhs;
    }
}

inline void step_lax_wendroff(const Field& f, Field& out, const StepParams& p,
                              const Grid1D& g) {
    const double h = g.h, tau = p.tau, nu = p.nu;
    for (int i = 1; i < g.n_points - 1; ++i) {
        auto u = [&](int k) { return f.at(g, i + k); };
        auto fl = [&](int k) { return flux(u(k)); };
        double uhp = 0.5 * (u(0) + u(1)), uhm = 0.5 * (u(-1) + u(0));
        double d4 = u(2) - 4 * u(1) + 6 * u(0) - 4 * u(-1) + u(-2);
        // delta^2 of the mu-averaged half-point values at i +- 1/2
        double d2hp = 0.5 * (u(2) - u(1) - u(0) + u(-1));
        double d2hm = 0.5 * (u(1) - u(0) - u(-1) + u(-2));
        double mud3f = 0.5 * (fl(2) - 2 * fl(1) + 2 * fl(-1) - fl(-2));
        double A = -tau / (2 * h * h) * (uhp * (fl(1) - fl(0)) - uhm * (fl(0) - fl(-1)))
                   - nu * nu * tau / 2 * d4 / (h * h * h * h)
                   + nu * tau / (2 * h * h * h) * (uhp * d2hp - uhm * d2hm)
                   + nu * tau / 2 * mud3f / (h * h * h);
        double conv = (fl(1) - fl(-1)) / (2 * h);
        double diff = nu * (u(1) - 2 * u(0) + u(-1)) / (h * h);
        double rhs = conv - diff + A;
        if (p.source) rhs -= p.source(g.x_at(i), f.time + tau / 2);
        out.at(g, i) = u(0) - tau * rhs;
    }
}

/// Invariant scheme; the high-order scheme is the same update with C = 0.
inline void step_invariant(const Field& f, Field& out, const StepParams& p, const Grid1D& g) {
    const double h = g.h, tau = p.tau, nu = p.nu, t = f.time;
    for (int i = 1; i < g.n_points - 1; ++i) {
        auto u = [&](int k) { return f.at(g, i + k); };
        auto fl = [&](int k) { return flux(u(k)); };
        double mudf = 0.5 * (fl(1) - fl(-1));
        double mud3f = 0.5 * (fl(2) - 2 * fl(1) + 2 * fl(-1) - fl(-2));
        double d2 = u(1) - 2 * u(0) + u(-1);
        double d4 = u(2) - 4 * u(1) + 6 * u(0) - 4 * u(-1) + u(-2);
        double flux4 = (mudf - mud3f / 6) / h;
        double visc4 = nu * (d2 - d4 / 12) / (h * h);

        double x = g.x_at(i);
        double uhp = 0.5 * (u(0) + u(1)), uhm = 0.5 * (u(-1) + u(0));
        double uxp = (u(1) - u(0)) / h, uxm = (u(0) - u(-1)) / h;
        double omp = compute_omega(x + h / 2, t, uhp, uxp, p, h);
        double omm = compute_omega(x - h / 2, t, uhm, uxm, p, h);
        // undivided forward/backward differences
        double omega_term = omp * (u(1) - u(0)) - omm * (u(0) - u(-1));

        double mud2hp = 0.5 * (u(2) - u(1) - u(0) + u(-1));
        double mud2hm = 0.5 * (u(1) - u(0) - u(-1) + u(-2));
        double corr = nu * tau / 2 * (uhp * mud2hp - uhm * mud2hm) / (h * h * h)
                      - nu * nu * tau / 2 * d4 / (h * h * h * h)
                      + nu * tau / 2 * mud3f / (h * h * h);

        double rhs = flux4 - visc4 - omega_term + corr;
        if (p.source) rhs -= p.source(x, t);
        out.at(g, i) = u(0) - tau * rhs;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Crank-Nicolson nonlinear solve

struct CNConvergenceError : std::runtime_error {
    double last_residual;
    explicit CNConvergenceError(double r)
        : std::runtime_error("Crank-Nicolson Newton iteration failed to converge; "
                             "max-norm residual " + std::to_string(r)),
          last_residual(r) {}
};

struct CNResult {
    Field field;
    int iterations = 0;
};

/// Advance one Crank-Nicolson level: damped Newton on the strict-interior
/// unknowns with a tridiagonal Jacobian and direct elimination. The returned
/// field satisfies the nonlinear system with max-norm residual <= tol.
/// Endpoints and ghosts are taken from bc at the new time level.
inline CNResult solve_cn_level(const Field& f, const StepParams& p, const Grid1D& g,
                               const BoundaryProvider& bc, double tol = 1e-12,
                               int max_iter = 50) {
    if (tol <= 0) throw std::invalid_argument("solve_cn_level: tol must be positive");
    const double h = g.h, tau = p.tau, nu = p.nu;
    const double t_new = f.time + tau;
    const int m = g.n_points - 2;  // strict interior unknowns

    Field v = f;
    v.time = t_new;
    detail::fill_boundary(v, g, bc, t_new);

    auto phi = [&](const Field& w, int i) {
        auto u = [&](int k) { return w.at(g, i + k); };
        return (detail::flux(u(1)) - detail::flux(u(-1))) / (2 * h) -
               nu * (u(1) - 2 * u(0) + u(-1)) / (h * h);
    };
    std::vector<double> rhs_old(m);
    for (int i = 1; i < g.n_points - 1; ++i) rhs_old[i - 1] = phi(f, i);

    auto residual = [&](const Field& w, std::vector<double>& r) {
        double worst = 0;
        for (int i = 1; i < g.n_points - 1; ++i) {
            double ri = (w.at(g, i) - f.at(g, i)) / tau + 0.5 * (phi(w, i) + rhs_old[i - 1]);
            if (p.source) ri -= p.source(g.x_at(i), f.time + tau / 2);
            r[i - 1] = ri;
            worst = std::max(worst, std::abs(ri));
        }
        return worst;
    };

    std::vector<double> r(m), lower(m), diag(m), upper(m), rhs(m), sol(m);
    double rn = residual(v, r);
    int iterations = 0;
    while (rn > tol) {
        if (++iterations > max_iter) throw CNConvergenceError(rn);
        for (int i = 1; i < g.n_points - 1; ++i) {
            int k = i - 1;
            diag[k] = 1.0 / tau + nu / (h * h);
            lower[k] = -0.5 * v.at(g, i - 1) / (2 * h) - 0.5 * nu / (h * h);
            upper[k] = 0.5 * v.at(g, i + 1) / (2 * h) - 0.5 * nu / (h * h);
            rhs[k] = -r[k];
        }
        // Thomas elimination (first/last off-diagonals hit fixed boundary values)
        for (int k = 1; k < m; ++k) {
            double w = lower[k] / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        sol[m - 1] = rhs[m - 1] / diag[m - 1];
        for (int k = m - 2; k >= 0; --k) sol[k] = (rhs[k] - upper[k] * sol[k + 1]) / diag[k];

        double lambda = 1.0;
        std::vector<double> rt(m);
        while (true) {
            Field trial = v;
            for (int i = 1; i < g.n_points - 1; ++i) trial.at(g, i) += lambda * sol[i - 1];
            double rtn = residual(trial, rt);
            if (rtn < rn || lambda < 1e-4) {
                v = std::move(trial);
                r = rt;
                rn = rtn;
                break;
            }
            lambda *= 0.5;
        }
    }
    return {std::move(v), iterations};
}

// ---------------------------------------------------------------------------
// Unified stepper

/// One time step of the named scheme: interior updated per scheme, endpoint
/// and ghost values overwritten from bc at t + tau. Throws InstabilityError
/// if a non-finite value is produced.
inline Field step(SchemeName scheme, const Field& f, const StepParams& p, const Grid1D& g,
                  const BoundaryProvider& bc) {
    Field out = f;
    out.time = f.time + p.tau;
    switch (scheme) {
        case SchemeName::Ftcs:
            detail::step_ftcs(f, out, p, g);
            break;
        case SchemeName::LaxWendroff:
            detail::step_lax_wendroff(f, out, p, g);
            break;
        case SchemeName::CrankNicolson:
            out = solve_cn_level(f, p, g, bc).field;
            break;
        case SchemeName::Invariant:
            detail::step_invariant(f, out, p, g);
            break;
        case SchemeName::HighOrder: {
            StepParams pz = p;
            pz.cspec = CSpec::zero();
            detail::step_invariant(f, out, pz, g);
            break;
        }
    }
    detail::fill_boundary(out, g, bc, out.time);
    out.require_finite(g);
    return out;
}

// ---------------------------------------------------------------------------
// Problem assembly

/// One experiment's problem description: the fixed domain, the reference
/// solution (possibly transported to another frame), and the horizon.
struct ProblemSetup {
    double x_min = 0.0;
    double x_max = 40.0;
    double t_final = 20.0;
    ReferenceSolution reference;
    FrameTransform frame;  // already applied to `reference`; kept for reporting

    ProblemSetup(ReferenceSolution ref, FrameTransform ft = FrameTransform::identity(),
                 double tf = 20.0)
        : t_final(tf), reference(std::move(ref)), frame(ft) {
        if (t_final < 0) throw std::invalid_argument("ProblemSetup: t_final must be >= 0");
    }
};

/// Initial field (ghosts included) sampled from the reference at t = 0, plus
/// the Dirichlet/ghost boundary provider returning reference values at any
/// (x, t).
inline std::pair<Field, BoundaryProvider> build_problem(const ProblemSetup& setup,
                                                        const Grid1D& grid) {
    if (grid.x_at(0) != setup.x_min ||
        std::abs(grid.x_at(grid.n_points - 1) - setup.x_max) > 1e-9)
        throw std::invalid_argument("build_problem: grid does not span the domain");
    Field f(grid, 0.0);
    for (int i = -grid.ghost_depth; i < grid.n_points + grid.ghost_depth; ++i)
        f.at(grid, i) = setup.reference(grid.x_at(i), 0.0).u;
    ReferenceSolution ref = setup.reference;
    BoundaryProvider bc = [ref](double x, double t) { return ref(x, t).u; };
    return {std::move(f), std::move(bc)};
}

/// Max |Omega tau| over the interior half points; the pointwise stability
/// monitor input for the invariant-family schemes.
inline double max_abs_omega_tau(const Field& f, const StepParams& p, const Grid1D& g) {
    double worst = 0;
    for (int i = 1; i < g.n_points - 1; ++i) {
        auto u = [&](int k) { return f.at(g, i + k); };
        double x = g.x_at(i);
        double uhp = 0.5 * (u(0) + u(1)), uxp = (u(1) - u(0)) / g.h;
        double om = compute_omega(x + g.h / 2, f.time, uhp, uxp, p, g.h);
        worst = std::max(worst, std::abs(om * p.tau));
    }
    return worst;
}

}  // namespace invfd
