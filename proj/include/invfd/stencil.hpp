#pragma once

#include "invfd/diffpoly.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invfd {

/// Grid shift of a field value: u(x + p h, t + q tau). Half-integer shifts
/// are allowed (denominators 1 or 2 only).
struct Shift {
    Rational p, q;

    Shift(Rational p_, Rational q_) : p(std::move(p_)), q(std::move(q_)) {
        auto half_integral = [](const Rational& r) {
            return boost::multiprecision::denominator((r * Rational(2)).backend()) == 1;
        };
        if (!half_integral(p) || !half_integral(q))
            throw std::invalid_argument("Shift: p, q must have denominator 1 or 2");
    }

    friend bool operator<(const Shift& a, const Shift& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.q < b.q;
    }
    friend bool operator==(const Shift& a, const Shift& b) {
        return a.p == b.p && a.q == b.q;
    }
};

/// Formal finite-difference expression: polynomial in shifted field values
/// with DiffPoly coefficients over {x, t, nu, h, tau}. Coefficients may carry
/// exact negative powers of h and tau (1/tau, 1/h^2, ...); a consistent
/// scheme's Taylor expansion clears them.
class Stencil {
public:
    using FactorList = std::vector<std::pair<Shift, int>>;  // sorted, powers > 0
    using TermMap = std::map<FactorList, DiffPoly>;

    Stencil() = default;
    explicit Stencil(DiffPoly scalar) { add_term({}, std::move(scalar)); }

    /// Single shifted value u(x + p h, t + q tau).
    static Stencil value(Rational p, Rational q) {
        Stencil s;
        s.add_term({{Shift(std::move(p), std::move(q)), 1}}, DiffPoly(1));
        return s;
    }

    const TermMap& terms() const { return terms_; }

    void add_term(FactorList f, DiffPoly coeff) {
        if (coeff.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(std::move(f), coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Stencil operator-() const {
        Stencil r;
        for (const auto& [f, c] : terms_) r.terms_.emplace(f, -c);
        return r;
    }
    Stencil& operator+=(const Stencil& o) {
        for (const auto& [f, c] : o.terms_) add_term(f, c);
        return *this;
    }
    Stencil& operator-=(const Stencil& o) {
        for (const auto& [f, c] : o.terms_) add_term(f, -c);
        return *this;
    }
    friend Stencil operator+(Stencil a, const Stencil& b) { return a += b; }
    friend Stencil operator-(Stencil a, const Stencil& b) { return a -= b; }

    friend Stencil operator*(const Stencil& a, const Stencil& b) {
        Stencil r;
        for (const auto& [fa, ca] : a.terms_)
            for (const auto& [fb, cb] : b.terms_)
                r.add_term(merge(fa, fb), DiffPoly::mul(ca, cb));
        return r;
    }
    friend Stencil operator*(const Stencil& a, const DiffPoly& c) {
        Stencil r;
        for (const auto& [f, cf] : a.terms_) r.add_term(f, DiffPoly::mul(cf, c));
        return r;
    }
    friend Stencil operator*(const DiffPoly& c, const Stencil& a) { return a * c; }
    friend Stencil operator*(const Stencil& a, const Rational& c) {
        return a * DiffPoly(c);
    }

    bool time_advancing() const {
        for (const auto& [f, c] : terms_)
            for (const auto& [sh, e] : f)
                if (Rational(0) < sh.q) return true;
        return false;
    }

private:
    static FactorList merge(const FactorList& a, const FactorList& b) {
        FactorList r;
        auto i = a.begin(); auto j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (i->first < j->first) r.push_back(*i++);
            else if (j->first < i->first) r.push_back(*j++);
            else { r.push_back({i->first, i->second + j->second}); ++i; ++j; }
        }
        r.insert(r.end(), i, a.end());
        r.insert(r.end(), j, b.end());
        return r;
    }

    TermMap terms_;
};

// ---------------------------------------------------------------------------
// Taylor expansion

namespace detail {

/// Series of u(x + p h, t + q tau) with the given per-monomial admission test.
inline DiffPoly shifted_series(const Shift& sh, const std::function<bool(int, int)>& admit) {
    DiffPoly s;
    // admit(a, b) is monotone in a and b; scan until a row/column is rejected
    for (int a = 0;; ++a) {
        if (!admit(a, 0)) break;
        for (int b = 0;; ++b) {
            if (!admit(a, b)) break;
            Rational coeff = sh.p.pow(a) * sh.q.pow(b) /
                             (factorial(a) * factorial(b));
            if (!coeff.is_zero()) {
                Monomial m = Monomial(Sym::u(a, b))
                                 .times(Monomial(Sym::h(), a))
                                 .times(Monomial(Sym::tau(), b));
                s.add_term(std::move(m), coeff);
            }
        }
    }
    return s;
}

}  // namespace detail

/// Replace each shifted value by its Taylor series about (x, t), truncated at
/// total derivative order K, and expand the stencil polynomial.
inline DiffPoly taylor_expand(const Stencil& st, int K) {
    if (K < 2) throw std::invalid_argument("taylor_expand: K must be >= 2");
    DiffPoly out;
    auto admit = [K](int a, int b) { return a + b <= K; };
    std::map<std::pair<std::string, std::string>, DiffPoly> cache;
    auto series_for = [&](const Shift& sh) {
        auto key = std::make_pair(sh.p.str(), sh.q.str());
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        DiffPoly s = detail::shifted_series(sh, admit);
        cache.emplace(key, s);
        return s;
    };
    for (const auto& [factors, coeff] : st.terms()) {
        DiffPoly prod(1);
        for (const auto& [sh, e] : factors) prod = DiffPoly::mul(prod, series_for(sh).pow(e));
        out += DiffPoly::mul(prod, coeff);
    }
    return out;
}

/// Weighted-filtered expansion used by differential_approximation: per term,
/// factors are expanded and multiplied keeping only monomials whose weighted
/// (h, tau) degree stays within the term's clearing budget.
inline DiffPoly expand_weighted(const Stencil& st, int w_tau, int max_order) {
    DiffPoly out;
    for (const auto& [factors, coeff] : st.terms()) {
        int denom_weight = 0;
        for (const auto& [m, c] : coeff.terms())
            denom_weight = std::max(denom_weight, -m.grid_degree(w_tau));
        const int cut = max_order + denom_weight;
        auto admit = [&](int a, int b) { return a + w_tau * b <= cut; };
        DiffPoly prod(1);
        for (const auto& [sh, e] : factors) {
            DiffPoly s = detail::shifted_series(sh, admit);
            for (int k = 0; k < e; ++k) prod = DiffPoly::mul(prod, s, cut, w_tau);
        }
        out += truncate_grid_order(DiffPoly::mul(prod, coeff), w_tau, max_order);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scheme catalog

enum class SchemeName { Ftcs, LaxWendroff, CrankNicolson, Invariant, HighOrder };

inline std::string scheme_id(SchemeName s) {
    switch (s) {
        case SchemeName::Ftcs: return "ftcs";
        case SchemeName::LaxWendroff: return "lax_wendroff";
        case SchemeName::CrankNicolson: return "crank_nicolson";
        case SchemeName::Invariant: return "invariant";
        case SchemeName::HighOrder: return "high_order";
    }
    return "?";
}

inline SchemeName scheme_from_id(const std::string& id) {
    if (id == "ftcs") return SchemeName::Ftcs;
    if (id == "lax_wendroff" || id == "lw") return SchemeName::LaxWendroff;
    if (id == "crank_nicolson" || id == "cn") return SchemeName::CrankNicolson;
    if (id == "invariant") return SchemeName::Invariant;
    if (id == "high_order") return SchemeName::HighOrder;
    throw std::invalid_argument("unknown scheme '" + id + "'");
}

struct SchemeCatalogEntry {
    SchemeName name;
    Stencil stencil;
    int w_tau = 1;       // weight of tau in the modeled order
    int modeled_order = 2;
    Rational kappa = Rational(0);       // artificial-viscosity coefficient (invariant family)
    DiffPoly consistency_limit;         // expected (h,tau)->0 part of the expansion
};

namespace detail {

inline DiffPoly inv_h(int k) {  // 1/h^k as exact Laurent coefficient
    return DiffPoly(Monomial(Sym::h(), -k), Rational(1));
}
inline DiffPoly inv_tau() {
    return DiffPoly(Monomial(Sym::tau(), -1), Rational(1));
}

// shifted values and flux (u^2/2) at integer/half offsets of the current level
inline Stencil uval(Rational p, Rational q = Rational(0)) { return Stencil::value(p, q); }
inline Stencil usq_half(Rational p, Rational q = Rational(0)) {
    Stencil v = Stencil::value(p, q);
    return v * v * Rational(1, 2);
}

template <class F>
Stencil mu_delta(F f) {  // undivided: (f_{+1} - f_{-1})/2
    return (f(Rational(1)) - f(Rational(-1))) * Rational(1, 2);
}
template <class F>
Stencil delta2(F f) {
    return f(Rational(1)) - f(Rational(0)) * Rational(2) + f(Rational(-1));
}
template <class F>
Stencil delta4(F f) {
    return f(Rational(2)) - f(Rational(1)) * Rational(4) + f(Rational(0)) * Rational(6) -
           f(Rational(-1)) * Rational(4) + f(Rational(-2));
}
template <class F>
Stencil mu_delta3(F f) {  // (f_{+2} - 2 f_{+1} + 2 f_{-1} - f_{-2})/2
    return (f(Rational(2)) - f(Rational(1)) * Rational(2) + f(Rational(-1)) * Rational(2) -
            f(Rational(-2))) * Rational(1, 2);
}

inline Stencil time_difference() {  // (u^{n+1}_i - u^n_i)/tau
    return (uval(Rational(0), Rational(1)) - uval(Rational(0))) * inv_tau();
}

inline Stencil ftcs_stencil() {
    auto f = [](Rational p) { return usq_half(std::move(p)); };
    auto w = [](Rational p) { return uval(std::move(p)); };
    return time_difference() + mu_delta(f) * inv_h(1) -
           poly::nu() * (delta2(w) * inv_h(2));
}

inline Stencil lw_stencil() {
    using poly::nu;
    auto f = [](Rational p) { return usq_half(std::move(p)); };
    auto w = [](Rational p) { return uval(std::move(p)); };
    const Rational half(1, 2);
    Stencil Ehp = uval(half), Ehm = uval(-half);
    Stencil dplus_f = usq_half(Rational(1)) - usq_half(Rational(0));
    Stencil dminus_f = usq_half(Rational(0)) - usq_half(Rational(-1));
    auto d2_at = [&](Rational c) {  // delta^2 u centered at half offset c
        return uval(c + Rational(1)) - uval(c) * Rational(2) + uval(c - Rational(1));
    };
    Stencil A = -(poly::tau() * Rational(1, 2)) * inv_h(2) * (Ehp * dplus_f - Ehm * dminus_f)
              - (nu() * nu() * poly::tau() * Rational(1, 2)) * (delta4(w) * inv_h(4))
              + (nu() * poly::tau() * Rational(1, 2)) * inv_h(3) *
                    (Ehp * d2_at(half) - Ehm * d2_at(-half))
              + (nu() * poly::tau() * Rational(1, 2)) * (mu_delta3(f) * inv_h(3));
    return ftcs_stencil() + A;
}

inline Stencil cn_stencil() {
    // standard time-averaged form; both levels expanded about t_n
    auto f0 = [](Rational p) { return usq_half(std::move(p), Rational(0)); };
    auto f1 = [](Rational p) { return usq_half(std::move(p), Rational(1)); };
    auto w0 = [](Rational p) { return uval(std::move(p), Rational(0)); };
    auto w1 = [](Rational p) { return uval(std::move(p), Rational(1)); };
    return time_difference() +
           (mu_delta(f0) + mu_delta(f1)) * Rational(1, 2) * inv_h(1) -
           poly::nu() * ((delta2(w0) + delta2(w1)) * Rational(1, 2) * inv_h(2));
}

/// Eq-18 form: fourth-order flux/viscosity, the undivided artificial-viscosity
/// flux with Omega = (tau u^2/2 - C)/h^2 at mu-averaged half points, and the
/// nu*tau/2 correction terms.
inline Stencil invariant_stencil(const Rational& kappa) {
    using poly::nu;
    using poly::tau;
    auto f = [](Rational p) { return usq_half(std::move(p)); };
    auto w = [](Rational p) { return uval(std::move(p)); };
    const Rational half(1, 2);

    Stencil flux4 = (mu_delta(f) - mu_delta3(f) * Rational(1, 6)) * inv_h(1);
    Stencil visc4 = nu() * ((delta2(w) - delta4(w) * Rational(1, 12)) * inv_h(2));

    auto uh = [&](int sign) {  // mu-averaged half-point value
        return (uval(Rational(0)) + uval(Rational(sign))) * half;
    };
    auto uxh = [&](int sign) {  // one-sided divided difference at the half point
        return (uval(Rational(sign)) - uval(Rational(0))) * (DiffPoly(Rational(sign)) * inv_h(1));
    };
    auto c_at = [&](int sign) {  // C(x_{i+sign/2}, t_n, u_half, ux_half)
        DiffPoly xhalf = poly::x() + DiffPoly(Rational(sign, 2)) * poly::h();
        Stencil lin = poly::t() * uh(sign) - Stencil(xhalf);
        Stencil uxs = uxh(sign);
        return Stencil(DiffPoly(kappa) * poly::t()) * lin * lin * uxs * uxs;
    };
    auto omega_at = [&](int sign) {
        Stencil um = uh(sign);
        return (Stencil(tau() * Rational(1, 2)) * um * um - c_at(sign)) * inv_h(2);
    };
    // undivided forward/backward differences in the artificial-viscosity flux
    Stencil omega_term = omega_at(1) * (uval(Rational(1)) - uval(Rational(0))) -
                         omega_at(-1) * (uval(Rational(0)) - uval(Rational(-1)));

    auto mu_d2_at = [&](int sign) {  // (mu delta^2 u) at the half point
        auto d2 = [&](Rational c) {
            return uval(c + Rational(1)) - uval(c) * Rational(2) + uval(c - Rational(1));
        };
        return (d2(Rational(sign)) + d2(Rational(0))) * half;
    };
    Stencil corr = (nu() * tau() * Rational(1, 2)) * inv_h(3) *
                       (uh(1) * mu_d2_at(1) - uh(-1) * mu_d2_at(-1)) -
                   (nu() * nu() * tau() * Rational(1, 2)) * (delta4(w) * inv_h(4)) +
                   (nu() * tau() * Rational(1, 2)) * (mu_delta3(f) * inv_h(3));

    return time_difference() + flux4 - visc4 - omega_term + corr;
}

}  // namespace detail

/// Expanded (C u_x)_x with C = kappa t (t u - x)^2 u_x^2: the artificial-
/// viscosity contribution of the invariant scheme's modeled equation.
inline DiffPoly c_flux_divergence(const Rational& kappa) {
    DiffPoly C = c_coefficient_family(kappa);
    return total_derivative(DiffPoly::mul(C, poly::u(1, 0)), Dir::X);
}

inline SchemeCatalogEntry catalog_entry(SchemeName name,
                                        Rational kappa = Rational(-1, 100)) {
    const DiffPoly F = burgers_poly();
    switch (name) {
        case SchemeName::Ftcs:
            return {name, detail::ftcs_stencil(), 2, 2, Rational(0), F};
        case SchemeName::LaxWendroff:
            return {name, detail::lw_stencil(), 1, 2, Rational(0), F};
        case SchemeName::CrankNicolson:
            return {name, detail::cn_stencil(), 1, 2, Rational(0), F};
        case SchemeName::HighOrder:
            return {name, detail::invariant_stencil(Rational(0)), 2, 4, Rational(0), F};
        case SchemeName::Invariant:
            // the C flux carries no explicit h/tau factors, so it is part of
            // the (h,tau)->0 limit of the expansion
            return {name, detail::invariant_stencil(kappa), 2, 2, kappa,
                    F + c_flux_divergence(kappa)};
    }
    throw std::invalid_argument("catalog_entry: unknown scheme");
}

struct InconsistentStencilError : std::runtime_error {
    DiffPoly defect;
    explicit InconsistentStencilError(DiffPoly d)
        : std::runtime_error("stencil is inconsistent; consistency defect: " + d.str()),
          defect(std::move(d)) {}
};

/// Differential approximation of a catalog entry: Taylor expansion, time
/// elimination on the grid-order remainder, weighted truncation at the
/// entry's modeled order. The (h,tau)->0 part is checked against the entry's
/// consistency limit.
inline DiffPoly differential_approximation(const SchemeCatalogEntry& entry) {
    DiffPoly expanded = expand_weighted(entry.stencil, entry.w_tau, entry.modeled_order);
    auto [zero, rest] = split_grid_order_zero(expanded);
    if (!(zero == entry.consistency_limit))
        throw InconsistentStencilError(zero - entry.consistency_limit);
    for (const auto& [m, c] : rest.terms())
        if (m.has_negative_exponent())
            throw InconsistentStencilError(DiffPoly(m, c));
    return zero + truncate_grid_order(eliminate_time(rest), entry.w_tau, entry.modeled_order);
}

// ---------------------------------------------------------------------------
// Committed literal representations (independent route: built directly from
// the g-function recursions directly, no Taylor machinery involved)

namespace committed {

inline DiffPoly g1() { return burgers_g1(); }
inline DiffPoly g2() {
    DiffPoly g = g1();
    return total_derivative(-(DiffPoly::mul(g, poly::u())), Dir::X) +
           DiffPoly::mul(poly::nu(), dx_pow(g, 2));
}
inline DiffPoly g3() {
    DiffPoly a = g1(), b = g2();
    return total_derivative(-(DiffPoly::mul(b, poly::u())) - DiffPoly::mul(a, a), Dir::X) +
           DiffPoly::mul(poly::nu(), dx_pow(b, 2));
}

inline DiffPoly h2_block() {
    using namespace poly;
    DiffPoly u2 = u() * u();
    return Rational(1, 12) * (h() * h() * dx_pow(u2, 3)) -
           Rational(1, 12) * (nu() * h() * h() * u(4, 0));
}

inline DiffPoly ftcs() {
    return burgers_poly() + Rational(1, 2) * (poly::tau() * g2()) + h2_block();
}
inline DiffPoly lax_wendroff() {
    return burgers_poly() +
           Rational(1, 6) * (poly::tau() * poly::tau() * g3()) + h2_block();
}
inline DiffPoly crank_nicolson() {
    using namespace poly;
    DiffPoly block = Rational(1, 6) * g3() +
                     Rational(1, 4) * total_derivative(g1() * g1() + u() * g2(), Dir::X) -
                     Rational(1, 4) * (nu() * dx_pow(g2(), 2));
    return burgers_poly() + tau() * tau() * block + h2_block();
}
/// Modeled equation of the invariant scheme: F + (C u_x)_x.
inline DiffPoly invariant(const Rational& kappa = Rational(-1, 100)) {
    return burgers_poly() + c_flux_divergence(kappa);
}

inline DiffPoly for_scheme(SchemeName name) {
    switch (name) {
        case SchemeName::Ftcs: return ftcs();
        case SchemeName::LaxWendroff: return lax_wendroff();
        case SchemeName::CrankNicolson: return crank_nicolson();
        case SchemeName::Invariant: return invariant();
        case SchemeName::HighOrder: return burgers_poly();  // R sits above the committed order
    }
    throw std::invalid_argument("committed::for_scheme");
}

}  // namespace committed

// ---------------------------------------------------------------------------
// Numerical cross-validation

/// Field with analytically evaluable derivatives, as needed to evaluate both
/// a stencil (values at shifted points) and a differential approximation
/// (derivative coordinates at the expansion point).
struct AnalyticField {
    std::function<double(double x, double t)> value;
    std::function<double(int a, int b, double x, double t)> derivative;  // d^{a+b}u/dx^a dt^b
    double nu = 0;
};

inline double evaluate_stencil(const Stencil& st, const AnalyticField& field, double x,
                               double t, double h, double tau) {
    double sum = 0;
    EvalPoint pt{x, t, field.nu, h, tau, {}};
    for (const auto& [factors, coeff] : st.terms()) {
        double term = evaluate(coeff, pt);
        for (const auto& [sh, e] : factors) {
            double v = field.value(x + sh.p.to_double() * h, t + sh.q.to_double() * tau);
            term *= e == 1 ? v : std::pow(v, e);
        }
        sum += term;
    }
    return sum;
}

/// |stencil evaluated on the field - differential approximation evaluated on
/// the field| at (x, t); shrinks at the first neglected order as (h,tau)->0.
inline double numerical_consistency_check(const SchemeCatalogEntry& entry,
                                          const AnalyticField& field, double x, double t,
                                          double h, double tau) {
    static std::map<std::string, DiffPoly> approx_cache;
    static std::mutex cache_mu;
    DiffPoly approx;
    {
        std::lock_guard<std::mutex> lock(cache_mu);
        std::string key = scheme_id(entry.name) + "/" + entry.kappa.str() + "/" +
                          std::to_string(entry.w_tau) + "/" +
                          std::to_string(entry.modeled_order);
        auto it = approx_cache.find(key);
        if (it == approx_cache.end())
            it = approx_cache.emplace(key, differential_approximation(entry)).first;
        approx = it->second;
    }
    EvalPoint pt{x, t, field.nu, h, tau,
                 [&](int a, int b) { return field.derivative(a, b, x, t); }};
    double lhs = evaluate_stencil(entry.stencil, field, x, t, h, tau);
    double rhs = evaluate(approx, pt);
    return std::abs(lhs - rhs);
}

}  // namespace invfd
