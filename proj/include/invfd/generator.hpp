#pragma once

#include "invfd/diffpoly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace invfd {

/// Infinitesimal generator acting on (x, t, u, h, tau, nu):
///   xi1 d/dx + xi2 d/dt + eta d/du + zeta1 d/dh + zeta2 d/dtau + theta d/dnu.
/// xi1, xi2, eta may depend on {x, t, u}; zeta1, zeta2 also on {h, tau};
/// theta only on {nu}.
struct Generator {
    std::string name;
    DiffPoly xi1, xi2, eta, zeta1, zeta2, theta;
};

/// Prolongation of a generator to derivative coordinates: sigma[(a,b)] is the
/// coefficient of d/du_{(a,b)}, built by the standard recursion
///   sigma^{(x)} = D_x eta - u_x D_x xi1 - u_t D_x xi2   (t analogous),
///   sigma^{(J,k)} = D_k sigma^{(J)} - u_{(J,x)} D_k xi1 - u_{(J,t)} D_k xi2.
struct Prolongation {
    Generator base;
    std::map<std::pair<int, int>, DiffPoly> sigmas;  // (a,b) -> sigma, a+b >= 1

    const DiffPoly& sigma(int a, int b) const {
        auto it = sigmas.find({a, b});
        if (it == sigmas.end())
            throw std::invalid_argument("Prolongation: sigma(" + std::to_string(a) + "," +
                                        std::to_string(b) + ") not computed");
        return it->second;
    }
};

inline Prolongation prolong(const Generator& g, int max_total_order) {
    if (max_total_order < 1)
        throw std::invalid_argument("prolong: max_total_order must be >= 1");
    Prolongation p{g, {}};
    const DiffPoly dx_xi1 = total_derivative(g.xi1, Dir::X);
    const DiffPoly dx_xi2 = total_derivative(g.xi2, Dir::X);
    const DiffPoly dt_xi1 = total_derivative(g.xi1, Dir::T);
    const DiffPoly dt_xi2 = total_derivative(g.xi2, Dir::T);
    auto sig = [&](int a, int b) -> const DiffPoly& {
        if (a == 0 && b == 0) return g.eta;
        return p.sigmas.at({a, b});
    };
    for (int order = 1; order <= max_total_order; ++order) {
        for (int a = order; a >= 0; --a) {
            int b = order - a;
            DiffPoly s;
            if (a >= 1) {
                s = total_derivative(sig(a - 1, b), Dir::X)
                    - poly::u(a, b) * dx_xi1 - poly::u(a - 1, b + 1) * dx_xi2;
            } else {
                s = total_derivative(sig(0, b - 1), Dir::T)
                    - poly::u(1, b - 1) * dt_xi1 - poly::u(0, b) * dt_xi2;
            }
            p.sigmas.emplace(std::make_pair(a, b), std::move(s));
        }
    }
    return p;
}

/// Apply the prolonged generator to a differential polynomial:
///   xi1 dp/dx + xi2 dp/dt + eta dp/du + sum sigma^{(a,b)} dp/du_{(a,b)}
///   + zeta1 dp/dh + zeta2 dp/dtau + theta dp/dnu.
/// `order` must cover every derivative coordinate appearing in p.
inline DiffPoly lie_apply(const Generator& g, const DiffPoly& p, int order) {
    const int needed = p.max_u_order();
    if (order < needed) {
        // find the uncovered coordinate for the error message
        std::string worst;
        for (const auto& [m, c] : p.terms())
            for (const auto& [sym, e] : m.factors())
                if (sym.is_u() && sym.order() > order) worst = sym.str();
        throw std::invalid_argument("lie_apply: prolongation order " + std::to_string(order) +
                                    " does not cover " + worst);
    }
    Prolongation pr = prolong(g, std::max(order, 1));
    DiffPoly r = DiffPoly::mul(g.xi1, partial(p, Sym::x()))
               + DiffPoly::mul(g.xi2, partial(p, Sym::t()))
               + DiffPoly::mul(g.eta, partial(p, Sym::u(0, 0)))
               + DiffPoly::mul(g.zeta1, partial(p, Sym::h()))
               + DiffPoly::mul(g.zeta2, partial(p, Sym::tau()))
               + DiffPoly::mul(g.theta, partial(p, Sym::nu()));
    for (const auto& [ab, sigma] : pr.sigmas) {
        DiffPoly d = partial(p, Sym::u(ab.first, ab.second));
        if (!d.is_zero()) r += DiffPoly::mul(sigma, d);
    }
    return r;
}

/// Optional weighted truncation spec for on-shell residuals.
struct GridTrunc {
    int w_tau = 1;
    int max_order = 0;
};

/// On-shell invariance residual: apply the generator to p, substitute the
/// relation p = 0 solved for u_t, eliminate remaining time derivatives with
/// the leading Burgers relation, optionally truncate in (h, tau). Zero iff p
/// is invariant under g at the modeled order.
inline DiffPoly onshell_residual(const Generator& g, const DiffPoly& p,
                                 std::optional<GridTrunc> trunc = std::nullopt) {
    Rational ut_coeff = p.linear_coefficient(Sym::u(0, 1));
    if (ut_coeff.is_zero())
        throw std::invalid_argument("onshell_residual: p is not solvable for u_t "
                                    "(no lone u_t monomial)");
    DiffPoly pn = p * (Rational(1) / ut_coeff);
    DiffPoly rhs = poly::u(0, 1) - pn;  // u_t = rhs on shell
    if (rhs.contains(Sym::u(0, 1)))
        throw std::invalid_argument("onshell_residual: u_t appears nonlinearly in p");
    DiffPoly q = lie_apply(g, pn, pn.max_u_order());
    q = substitute(q, Sym::u(0, 1), rhs);
    q = eliminate_time(q);
    if (trunc) q = truncate_grid_order(q, trunc->w_tau, trunc->max_order);
    return q;
}

// ---------------------------------------------------------------------------
// Built-in generator sets

enum class GeneratorSet { Burgers6, Fda4, Invariant6 };

/// The standard generator sets with exact coefficients.
inline std::vector<Generator> builtin_generators(GeneratorSet set) {
    using namespace poly;
    const DiffPoly zero;
    switch (set) {
        case GeneratorSet::Burgers6:
            return {
                {"L1_space_translation", c(1), zero, zero, zero, zero, zero},
                {"L2_time_translation", zero, c(1), zero, zero, zero, zero},
                {"L3_dilatation", x(), c(2) * t(), -u(), zero, zero, zero},
                {"L4_projective", x() * t(), t() * t(), x() - u() * t(), zero, zero, zero},
                {"L5_galilean", t(), zero, c(1), zero, zero, zero},
                {"L6_dilatation", zero, -t(), u(), zero, zero, nu()},
            };
        case GeneratorSet::Fda4:
            return {
                {"L1_space_translation", c(1), zero, zero, zero, zero, zero},
                {"L2_time_translation", zero, c(1), zero, zero, zero, zero},
                {"L3p_dilatation", x(), c(2) * t(), -u(), h(), c(2) * tau(), zero},
                {"L4p_dilatation", zero, -t(), u(), zero, -tau(), nu()},
            };
        case GeneratorSet::Invariant6:
            // one generator per parameter (a, b, c, d, e, f) of the stated
            // six-parameter family
            return {
                {"a_space_translation", c(1), zero, zero, zero, zero, zero},
                {"b_dilatation", x(), c(2) * t(), -u(), h(), c(2) * tau(), zero},
                {"c_galilean", t(), zero, c(1), zero, zero, zero},
                {"d_projective", t() * x(), t() * t(), x() - t() * u(), zero, zero, zero},
                {"e_time_translation", zero, c(1), zero, zero, zero, zero},
                {"f_dilatation", zero, -t(), u(), zero, -tau(), nu()},
            };
    }
    throw std::invalid_argument("builtin_generators: unknown set");
}

// ---------------------------------------------------------------------------
// Determining-constraint report for the artificial-viscosity coefficient C

struct CConstraintRow {
    std::string subgroup;
    std::vector<DiffPoly> residuals;  // one per listed PDE (projective has 4)
    bool all_zero() const {
        for (const auto& r : residuals)
            if (!r.is_zero()) return false;
        return true;
    }
};

/// Evaluate the six listed linear PDE constraints on a candidate C.
/// C must be a polynomial in {x, t, h, tau, u, u_x, u_xx}.
inline std::vector<CConstraintRow> c_constraint_residuals(const DiffPoly& C) {
    for (const auto& [m, c] : C.terms())
        for (const auto& [sym, e] : m.factors())
            if (sym.is_u() && sym.b >= 1)
                throw std::invalid_argument(
                    "c_constraint_residuals: C must not contain time derivatives of u");

    const Sym sx = Sym::x(), st = Sym::t(), snu = Sym::nu(), sh = Sym::h(), stau = Sym::tau();
    const Sym su = Sym::u(0, 0), sux = Sym::u(1, 0), suxx = Sym::u(2, 0);
    auto d = [&](const Sym& s) { return partial(C, s); };
    using namespace poly;

    std::vector<CConstraintRow> rows;
    rows.push_back({"space_translation", {d(sx)}});
    rows.push_back({"time_translation", {d(st)}});
    rows.push_back({"dilatation",
                    {x() * d(sx) + c(2) * t() * d(st) - u() * d(su) + h() * d(sh) +
                     c(2) * tau() * d(stau)}});
    rows.push_back({"projective",
                    {d(sx), d(su), d(suxx), t() * t() * d(st) + c(2) * d(sux)}});
    rows.push_back({"galilean", {d(su) + t() * d(sx)}});
    rows.push_back({"dilatation6",
                    {-(t() * d(st)) + u() * d(su) + nu() * d(snu) - tau() * d(stau)}});
    return rows;
}

}  // namespace invfd
