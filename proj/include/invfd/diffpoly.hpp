#pragma once

#include "invfd/rational.hpp"
#include "invfd/sym.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace invfd {

/// Power product of symbols, kept sorted by symbol with nonzero exponents.
/// Exponents are signed: negative powers of h and tau appear transiently in
/// stencil coefficients (1/tau, 1/h^2, ...) and must cancel by the time a
/// result is handed out as a canonical polynomial.
class Monomial {
public:
    using Factor = std::pair<Sym, int>;

    Monomial() = default;
    explicit Monomial(Sym s, int e = 1) {
        if (e != 0) factors_.push_back({s, e});
    }

    const std::vector<Factor>& factors() const { return factors_; }
    bool is_constant() const { return factors_.empty(); }

    int exponent(const Sym& s) const {
        for (const auto& [sym, e] : factors_)
            if (sym == s) return e;
        return 0;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [sym, e] : factors_) d += e;
        return d;
    }

    /// Weighted (h, tau) degree used for grid-order truncation.
    int grid_degree(int w_tau) const {
        int d = 0;
        for (const auto& [sym, e] : factors_) {
            if (sym.kind == Sym::Kind::H) d += e;
            else if (sym.kind == Sym::Kind::Tau) d += e * w_tau;
        }
        return d;
    }

    bool has_negative_exponent() const {
        return std::any_of(factors_.begin(), factors_.end(),
                           [](const Factor& f) { return f.second < 0; });
    }

    int max_u_order() const {
        int m = 0;
        for (const auto& [sym, e] : factors_)
            if (sym.is_u()) m = std::max(m, sym.order());
        return m;
    }

    bool depends_on_time_derivative() const {
        for (const auto& [sym, e] : factors_)
            if (sym.is_u() && sym.b >= 1) return true;
        return false;
    }

    Monomial times(const Monomial& o) const {
        Monomial r;
        auto a = factors_.begin(), b = o.factors_.begin();
        while (a != factors_.end() && b != o.factors_.end()) {
            if (a->first < b->first) r.factors_.push_back(*a++);
            else if (b->first < a->first) r.factors_.push_back(*b++);
            else {
                int e = a->second + b->second;
                if (e != 0) r.factors_.push_back({a->first, e});
                ++a; ++b;
            }
        }
        r.factors_.insert(r.factors_.end(), a, factors_.end());
        r.factors_.insert(r.factors_.end(), b, o.factors_.end());
        return r;
    }

    /// Monomial with the factor of `s` removed entirely.
    Monomial without(const Sym& s) const {
        Monomial r;
        for (const auto& f : factors_)
            if (!(f.first == s)) r.factors_.push_back(f);
        return r;
    }

    friend bool operator==(const Monomial& l, const Monomial& r) {
        return l.factors_ == r.factors_;
    }

    /// Graded lexicographic order over the fixed Sym order.
    struct GradedLex {
        bool operator()(const Monomial& l, const Monomial& r) const {
            int dl = l.total_degree(), dr = r.total_degree();
            if (dl != dr) return dl < dr;
            const auto& a = l.factors_;
            const auto& b = r.factors_;
            for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                if (a[i].first != b[i].first) return a[i].first < b[i].first;
                if (a[i].second != b[i].second) return a[i].second > b[i].second;
            }
            return a.size() < b.size();
        }
    };

private:
    std::vector<Factor> factors_;
};

/// Multivariate polynomial over the Sym coordinates with exact rational
/// coefficients. Canonical: no zero coefficients, deterministic term order;
/// two values are equal iff their term maps are identical.
class DiffPoly {
public:
    using TermMap = std::map<Monomial, Rational, Monomial::GradedLex>;

    DiffPoly() = default;
    DiffPoly(long long n) { add_term(Monomial(), Rational(n)); }
    explicit DiffPoly(Rational c) { add_term(Monomial(), std::move(c)); }
    explicit DiffPoly(Sym s) { add_term(Monomial(s), Rational(1)); }
    DiffPoly(Monomial m, Rational c) { add_term(std::move(m), std::move(c)); }

    static DiffPoly var(Sym s) { return DiffPoly(s); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add_term(Monomial m, Rational c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(std::move(m), c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    DiffPoly operator-() const {
        DiffPoly r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }
    DiffPoly& operator+=(const DiffPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    DiffPoly& operator-=(const DiffPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }

    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
        return mul(a, b);
    }
    DiffPoly& operator*=(const DiffPoly& o) { return *this = mul(*this, o); }

    friend DiffPoly operator*(const DiffPoly& a, const Rational& c) {
        DiffPoly r;
        if (c.is_zero()) return r;
        for (const auto& [m, cf] : a.terms_) r.terms_.emplace(m, cf * c);
        return r;
    }
    friend DiffPoly operator*(const Rational& c, const DiffPoly& a) { return a * c; }

    /// Product, optionally dropping result monomials whose weighted (h, tau)
    /// degree exceeds `grid_cut` (used by the truncated-series engine).
    static DiffPoly mul(const DiffPoly& a, const DiffPoly& b,
                        std::optional<int> grid_cut = std::nullopt, int w_tau = 1) {
        DiffPoly r;
        for (const auto& [ma, ca] : a.terms_) {
            const int da = grid_cut ? ma.grid_degree(w_tau) : 0;
            for (const auto& [mb, cb] : b.terms_) {
                if (grid_cut && da + mb.grid_degree(w_tau) > *grid_cut) continue;
                r.add_term(ma.times(mb), ca * cb);
            }
        }
        return r;
    }

    DiffPoly pow(int k) const {
        if (k < 0) throw std::invalid_argument("DiffPoly::pow: negative exponent");
        DiffPoly r(1), base = *this;
        while (k > 0) {
            if (k & 1) r = mul(r, base);
            if (k >>= 1) base = mul(base, base);
        }
        return r;
    }

    bool contains(const Sym& s) const {
        for (const auto& [m, c] : terms_)
            if (m.exponent(s) != 0) return true;
        return false;
    }

    int max_u_order() const {
        int o = 0;
        for (const auto& [m, c] : terms_) o = std::max(o, m.max_u_order());
        return o;
    }

    bool has_time_derivative() const {
        for (const auto& [m, c] : terms_)
            if (m.depends_on_time_derivative()) return true;
        return false;
    }

    /// Coefficient of the lone monomial s^1 (used to solve P = 0 for u_t).
    Rational linear_coefficient(const Sym& s) const {
        auto it = terms_.find(Monomial(s));
        return it == terms_.end() ? Rational(0) : it->second;
    }

    friend bool operator==(const DiffPoly& a, const DiffPoly& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const DiffPoly& a, const DiffPoly& b) { return !(a == b); }

    std::string str() const;

private:
    TermMap terms_;
};

// ---------------------------------------------------------------------------
// Convenience constructors

namespace poly {
inline DiffPoly x() { return DiffPoly(Sym::x()); }
inline DiffPoly t() { return DiffPoly(Sym::t()); }
inline DiffPoly nu() { return DiffPoly(Sym::nu()); }
inline DiffPoly h() { return DiffPoly(Sym::h()); }
inline DiffPoly tau() { return DiffPoly(Sym::tau()); }
inline DiffPoly u(int a = 0, int b = 0) { return DiffPoly(Sym::u(a, b)); }
inline DiffPoly c(long long n, long long d = 1) { return DiffPoly(Rational(n, d)); }
}  // namespace poly

// ---------------------------------------------------------------------------
// Calculus

/// Formal partial derivative treating every Sym as an independent coordinate.
inline DiffPoly partial(const DiffPoly& p, const Sym& s) {
    DiffPoly r;
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponent(s);
        if (e == 0) continue;
        Monomial reduced = m.without(s);
        if (e != 1) reduced = reduced.times(Monomial(s, e - 1));
        r.add_term(std::move(reduced), c * Rational(e));
    }
    return r;
}

enum class Dir { X, T };

/// Total derivative: D_x = d/dx + sum u_{(a+1,b)} d/du_{(a,b)}, D_t analogous.
inline DiffPoly total_derivative(const DiffPoly& p, Dir dir) {
    DiffPoly r;
    for (const auto& [m, c] : p.terms()) {
        for (const auto& [sym, e] : m.factors()) {
            Sym ds;
            switch (sym.kind) {
                case Sym::Kind::X:
                    if (dir != Dir::X) continue;
                    ds = Sym{Sym::Kind::X};  // derivative is 1; marker unused
                    break;
                case Sym::Kind::T:
                    if (dir != Dir::T) continue;
                    ds = Sym{Sym::Kind::T};
                    break;
                case Sym::Kind::U:
                    ds = dir == Dir::X ? Sym::u(sym.a + 1, sym.b) : Sym::u(sym.a, sym.b + 1);
                    break;
                default:
                    continue;  // nu, h, tau are constants for D_x, D_t
            }
            Monomial reduced = m.without(sym);
            if (e != 1) reduced = reduced.times(Monomial(sym, e - 1));
            if (sym.is_u()) reduced = reduced.times(Monomial(ds));
            r.add_term(std::move(reduced), c * Rational(e));
        }
    }
    return r;
}

inline DiffPoly dx_pow(DiffPoly p, int n) {
    for (int i = 0; i < n; ++i) p = total_derivative(p, Dir::X);
    return p;
}

/// p with every occurrence of `s` replaced by `value` (powers expand).
inline DiffPoly substitute(const DiffPoly& p, const Sym& s, const DiffPoly& value) {
    DiffPoly r;
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponent(s);
        if (e == 0) {
            r.add_term(m, c);
            continue;
        }
        if (e < 0) throw std::invalid_argument("substitute: negative power of substituted symbol");
        DiffPoly term(m.without(s), c);
        r += DiffPoly::mul(term, value.pow(e));
    }
    return r;
}

/// The Burgers right-hand side g1 = -u*u_x + nu*u_xx (u_t on shell).
inline DiffPoly burgers_g1() {
    DiffPoly g = -(poly::u() * poly::u(1, 0)) + poly::nu() * poly::u(2, 0);
    return g;
}

/// Burgers polynomial F = u_t + u*u_x - nu*u_xx.
inline DiffPoly burgers_poly() {
    return poly::u(0, 1) + poly::u() * poly::u(1, 0) - poly::nu() * poly::u(2, 0);
}

/// The built-in artificial-viscosity coefficient family C = kappa t (t u - x)^2 u_x^2.
inline DiffPoly c_coefficient_family(const Rational& kappa) {
    using namespace poly;
    DiffPoly w = t() * u() - x();
    return DiffPoly(kappa) * t() * w * w * u(1, 0) * u(1, 0);
}

namespace detail {

/// Memoized table of D_t^b u on shell (x-only polynomials) and their
/// x-derivatives. The g3-sized expansions are large and reused.
class ElimTable {
public:
    static ElimTable& instance() {
        static ElimTable table;
        return table;
    }

    /// x-only polynomial equal to the b-fold time derivative of u on shell.
    DiffPoly time_power(int b) {
        std::lock_guard<std::mutex> lock(mu_);
        return time_power_locked(b);
    }

    /// D_x^a applied to time_power(b).
    DiffPoly dx_time_power(int a, int b) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(a, b);
        auto it = dx_cache_.find(key);
        if (it != dx_cache_.end()) return it->second;
        DiffPoly base = a == 0 ? time_power_locked(b)
                               : total_derivative(dx_time_power_locked(a - 1, b), Dir::X);
        dx_cache_.emplace(key, base);
        return base;
    }

private:
    DiffPoly time_power_locked(int b) {
        auto it = t_cache_.find(b);
        if (it != t_cache_.end()) return it->second;
        DiffPoly result;
        if (b == 1) {
            result = burgers_g1();
        } else {
            // chain rule through the x-only coordinates of T_{b-1}
            DiffPoly prev = time_power_locked(b - 1);
            int maxa = prev.max_u_order();
            for (int a = 0; a <= maxa; ++a) {
                DiffPoly d = partial(prev, Sym::u(a, 0));
                if (d.is_zero()) continue;
                result += DiffPoly::mul(d, dx_time_power_locked(a, 1));
            }
        }
        t_cache_.emplace(b, result);
        return result;
    }

    DiffPoly dx_time_power_locked(int a, int b) {
        auto key = std::make_pair(a, b);
        auto it = dx_cache_.find(key);
        if (it != dx_cache_.end()) return it->second;
        DiffPoly base = a == 0 ? time_power_locked(b)
                               : total_derivative(dx_time_power_locked(a - 1, b), Dir::X);
        dx_cache_.emplace(key, base);
        return base;
    }

    std::mutex mu_;
    std::map<int, DiffPoly> t_cache_;
    std::map<std::pair<int, int>, DiffPoly> dx_cache_;
};

}  // namespace detail

/// Rewrite every u_{(a,b)} with b >= 1 as D_x^a applied to the (b-1)-fold time
/// derivative of g1, recursively, until only pure x-derivatives remain.
/// Idempotent; agrees with substituting u_t = -u u_x + nu u_xx and its
/// prolongations.
inline DiffPoly eliminate_time(const DiffPoly& p) {
    auto& table = detail::ElimTable::instance();
    DiffPoly r;
    for (const auto& [m, c] : p.terms()) {
        if (!m.depends_on_time_derivative()) {
            r.add_term(m, c);
            continue;
        }
        Monomial kept;
        DiffPoly prod(1);
        for (const auto& [sym, e] : m.factors()) {
            if (sym.is_u() && sym.b >= 1) {
                if (e < 0)
                    throw std::invalid_argument("eliminate_time: negative derivative power");
                prod = DiffPoly::mul(prod, table.dx_time_power(sym.a, sym.b).pow(e));
            } else {
                kept = kept.times(Monomial(sym, e));
            }
        }
        r += DiffPoly::mul(DiffPoly(kept, c), prod);
    }
    return r;
}

/// Drop every monomial whose weighted (h, tau) degree exceeds max_order.
/// w_tau is the weight of tau relative to h (2 when tau ~ h^2).
inline DiffPoly truncate_grid_order(const DiffPoly& p, int w_tau, int max_order) {
    if (w_tau < 1) throw std::invalid_argument("truncate_grid_order: w_tau must be >= 1");
    DiffPoly r;
    for (const auto& [m, c] : p.terms())
        if (m.grid_degree(w_tau) <= max_order) r.add_term(m, c);
    return r;
}

/// The part of p with zero (h, tau) content and the rest, in that order.
inline std::pair<DiffPoly, DiffPoly> split_grid_order_zero(const DiffPoly& p) {
    DiffPoly zero, rest;
    for (const auto& [m, c] : p.terms()) {
        if (m.exponent(Sym::h()) == 0 && m.exponent(Sym::tau()) == 0) zero.add_term(m, c);
        else rest.add_term(m, c);
    }
    return {zero, rest};
}

// ---------------------------------------------------------------------------
// Numeric evaluation

/// Evaluation context: values for the base symbols and a derivative table.
struct EvalPoint {
    double x = 0, t = 0, nu = 0, h = 0, tau = 0;
    std::function<double(int a, int b)> u;  // value of u_{(a,b)}
};

inline double evaluate(const DiffPoly& p, const EvalPoint& pt) {
    double sum = 0;
    for (const auto& [m, c] : p.terms()) {
        double term = c.to_double();
        for (const auto& [sym, e] : m.factors()) {
            double v = 0;
            switch (sym.kind) {
                case Sym::Kind::X: v = pt.x; break;
                case Sym::Kind::T: v = pt.t; break;
                case Sym::Kind::Nu: v = pt.nu; break;
                case Sym::Kind::H: v = pt.h; break;
                case Sym::Kind::Tau: v = pt.tau; break;
                case Sym::Kind::U: v = pt.u(sym.a, sym.b); break;
            }
            term *= e == 1 ? v : std::pow(v, e);
        }
        sum += term;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Canonical printer / parser

inline std::string DiffPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Rational mag = c.sign() < 0 ? -c : c;
        if (first) {
            if (c.sign() < 0) out << "-";
            first = false;
        } else {
            out << (c.sign() < 0 ? " - " : " + ");
        }
        bool need_coeff = !mag.is_one() || m.is_constant();
        if (need_coeff) out << mag.str();
        bool need_star = need_coeff;
        for (const auto& [sym, e] : m.factors()) {
            if (need_star) out << "*";
            out << sym.str();
            if (e != 1) out << "^" << e;
            need_star = true;
        }
    }
    return out.str();
}

/// Parse the canonical printer's syntax. Accepts exactly what str() emits
/// plus redundant whitespace.
inline DiffPoly parse_poly(const std::string& text) {
    DiffPoly result;
    std::size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && text[i] == ' ') ++i; };
    skip_ws();
    if (i >= text.size()) throw std::invalid_argument("parse_poly: empty input");
    if (text.compare(i, 1, "0") == 0 && i + 1 == text.size()) return result;

    int sign = 1;
    if (text[i] == '-') { sign = -1; ++i; }
    else if (text[i] == '+') ++i;

    while (i < text.size()) {
        skip_ws();
        // one term: factors separated by '*'
        Rational coeff(sign);
        Monomial mono;
        bool done_term = false;
        while (!done_term) {
            skip_ws();
            std::size_t start = i;
            while (i < text.size() && text[i] != '*' && text[i] != ' ' &&
                   text[i] != '+' && text[i] != '-')
                ++i;
            std::string tok = text.substr(start, i - start);
            if (tok.empty()) throw std::invalid_argument("parse_poly: empty factor");
            auto caret = tok.find('^');
            std::string base = caret == std::string::npos ? tok : tok.substr(0, caret);
            int exp = caret == std::string::npos ? 1 : std::stoi(tok.substr(caret + 1));
            if (std::isdigit(static_cast<unsigned char>(base[0]))) {
                Rational r = Rational::from_string(base);
                coeff *= (exp == 1 ? r : r.pow(exp));
            } else {
                mono = mono.times(Monomial(Sym::parse(base), exp));
            }
            skip_ws();
            if (i < text.size() && text[i] == '*') { ++i; continue; }
            done_term = true;
        }
        result.add_term(std::move(mono), coeff);
        skip_ws();
        if (i >= text.size()) break;
        if (text[i] == '+') { sign = 1; ++i; }
        else if (text[i] == '-') { sign = -1; ++i; }
        else throw std::invalid_argument("parse_poly: expected '+'/'-' at position " +
                                         std::to_string(i));
        skip_ws();
        if (i >= text.size())
            throw std::invalid_argument("parse_poly: dangling operator at end of input");
    }
    return result;
}

}  // namespace invfd
