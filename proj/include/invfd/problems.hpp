#pragma once

#include "invfd/diffpoly.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace invfd {

/// Forward-mode jet carrying (value, d/dx, d2/dx2, d/dt). Enough to drive the
/// schemes' boundary data, the Burgers residual audit, and the C coefficient.
struct Jet4 {
    double v = 0, dx = 0, dxx = 0, dt = 0;

    Jet4() = default;
    Jet4(double v_) : v(v_) {}
    Jet4(double v_, double dx_, double dxx_, double dt_) : v(v_), dx(dx_), dxx(dxx_), dt(dt_) {}

    static Jet4 var_x(double x) { return {x, 1, 0, 0}; }
    static Jet4 var_t(double t) { return {t, 0, 0, 1}; }

    friend Jet4 operator+(const Jet4& a, const Jet4& b) {
        return {a.v + b.v, a.dx + b.dx, a.dxx + b.dxx, a.dt + b.dt};
    }
    friend Jet4 operator-(const Jet4& a, const Jet4& b) {
        return {a.v - b.v, a.dx - b.dx, a.dxx - b.dxx, a.dt - b.dt};
    }
    friend Jet4 operator-(const Jet4& a) { return {-a.v, -a.dx, -a.dxx, -a.dt}; }
    friend Jet4 operator*(const Jet4& a, const Jet4& b) {
        return {a.v * b.v, a.dx * b.v + a.v * b.dx,
                a.dxx * b.v + 2 * a.dx * b.dx + a.v * b.dxx,
                a.dt * b.v + a.v * b.dt};
    }
    Jet4 inv() const {
        double i = 1.0 / v;
        return {i, -dx * i * i, (2 * dx * dx * i - dxx) * i * i, -dt * i * i};
    }
    friend Jet4 operator/(const Jet4& a, const Jet4& b) { return a * b.inv(); }
};

inline Jet4 exp(const Jet4& a) {
    double e = std::exp(a.v);
    return {e, e * a.dx, e * (a.dx * a.dx + a.dxx), e * a.dt};
}
inline Jet4 sqrt(const Jet4& a) {
    double s = std::sqrt(a.v);
    return {s, a.dx / (2 * s), a.dxx / (2 * s) - a.dx * a.dx / (4 * s * a.v), a.dt / (2 * s)};
}

/// Truncated x-Taylor jet (coefficients c[k] = d^k u/dx^k / k!) with the first
/// t-derivative of the value. Used by the stencil/representation consistency
/// checks, which need high-order x-derivatives of a genuine Burgers solution.
template <int N>
struct XJet {
    std::array<double, N + 1> c{};
    double dt = 0;

    XJet() = default;
    XJet(double v) { c[0] = v; }
    static XJet var_x(double x) {
        XJet j(x);
        if constexpr (N >= 1) j.c[1] = 1;
        return j;
    }
    static XJet var_t(double t) {
        XJet j(t);
        j.dt = 1;
        return j;
    }
    double derivative(int k) const {
        double f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }

    friend XJet operator+(const XJet& a, const XJet& b) {
        XJet r;
        for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] + b.c[k];
        r.dt = a.dt + b.dt;
        return r;
    }
    friend XJet operator-(const XJet& a, const XJet& b) {
        XJet r;
        for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] - b.c[k];
        r.dt = a.dt - b.dt;
        return r;
    }
    friend XJet operator-(const XJet& a) {
        XJet r;
        for (int k = 0; k <= N; ++k) r.c[k] = -a.c[k];
        r.dt = -a.dt;
        return r;
    }
    friend XJet operator*(const XJet& a, const XJet& b) {
        XJet r;
        for (int k = 0; k <= N; ++k)
            for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
        r.dt = a.dt * b.c[0] + a.c[0] * b.dt;
        return r;
    }
    XJet inv() const {
        XJet r;
        r.c[0] = 1.0 / c[0];
        for (int k = 1; k <= N; ++k) {
            double s = 0;
            for (int i = 1; i <= k; ++i) s += c[i] * r.c[k - i];
            r.c[k] = -s / c[0];
        }
        r.dt = -dt * r.c[0] * r.c[0];
        return r;
    }
    friend XJet operator/(const XJet& a, const XJet& b) { return a * b.inv(); }
};

template <int N>
XJet<N> exp(const XJet<N>& a) {
    XJet<N> r;
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double s = 0;
        for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
        r.c[k] = s / k;
    }
    r.dt = r.c[0] * a.dt;
    return r;
}
template <int N>
XJet<N> sqrt(const XJet<N>& a) {
    XJet<N> r;
    r.c[0] = std::sqrt(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double s = 0;
        for (int i = 1; i < k; ++i) s += r.c[i] * r.c[k - i];
        r.c[k] = (a.c[k] - s) / (2 * r.c[0]);
    }
    r.dt = a.dt / (2 * r.c[0]);
    return r;
}

/// Closed-form exact solution of the Burgers equation:
///   u(x,t) = ((x-2t)/(t+0.1)) / (1 + nu^2 sqrt(t+0.1) exp((x-2t)^2/(4 nu (t+0.1)))) + 2
/// evaluated in the saturating form q e^{-s}/(e^{-s} + B) + 2, which degrades
/// gracefully to the constant branch u = 2 where the exponent overflows.
template <class Scalar>
Scalar exact_solution_impl(Scalar X, Scalar T0, double nu, double s_value) {
    Scalar T = T0 + Scalar(0.1);
    Scalar xi = X - Scalar(2.0) * T0;  // x - 2t; exact zero on the line x = 2t
    Scalar q = xi / T;
    if (s_value > 500.0) {
        // hump underflows to zero identically (all derivative slots included)
        return Scalar(2.0);
    }
    Scalar s = xi * xi / (Scalar(4.0 * nu) * T);
    Scalar E = exp(-s);
    Scalar B = Scalar(nu * nu) * sqrt(T);
    return q * E / (E + B) + Scalar(2.0);
}

inline double exact_exponent(double x, double t, double nu) {
    double T = t + 0.1, xi = x - 2 * t;
    return xi * xi / (4 * nu * T);
}

/// Pointwise values of a reference solution and its derivatives.
struct RefValues {
    double u = 0, ux = 0, uxx = 0, ut = 0;
};

inline RefValues exact_eval(double x, double t, double nu) {
    if (nu <= 0) throw std::invalid_argument("exact_eval: nu must be positive");
    Jet4 r = exact_solution_impl(Jet4::var_x(x), Jet4::var_t(t), nu,
                                 exact_exponent(x, t, nu));
    return {r.v, r.dx, r.dxx, r.dt};
}

// ---------------------------------------------------------------------------
// Reference solutions

/// Analytic reference solution: evaluator plus optional manufactured-solution
/// forcing (the Burgers residual of the field, to be added to a scheme's
/// right-hand side).
struct ReferenceSolution {
    enum class Kind { ClosedForm, Manufactured };

    Kind kind = Kind::ClosedForm;
    std::string label;
    double nu = 0;
    std::function<RefValues(double x, double t)> eval;
    std::function<double(double x, double t)> source;  // null for exact solutions
    // high-order x-jet evaluator; provided by the base solutions
    std::function<XJet<8>(double x, double t)> eval_xjet;

    RefValues operator()(double x, double t) const { return eval(x, t); }
};

inline ReferenceSolution closed_form_solution(double nu) {
    if (nu <= 0) throw std::invalid_argument("closed_form_solution: nu must be positive");
    ReferenceSolution r;
    r.kind = ReferenceSolution::Kind::ClosedForm;
    r.label = "closed_form";
    r.nu = nu;
    r.eval = [nu](double x, double t) { return exact_eval(x, t, nu); };
    r.eval_xjet = [nu](double x, double t) {
        return exact_solution_impl(XJet<8>::var_x(x), XJet<8>::var_t(t), nu,
                                   exact_exponent(x, t, nu));
    };
    return r;
}

/// Smooth traveling-wave field u = 2 + A sin(k(x - c t)) exp(-nu k^2 t) with
/// the forcing that makes it an exact solution of the forced Burgers equation.
/// Fallback reference for convergence studies.
inline ReferenceSolution manufactured_solution(double nu, double amplitude = 0.5,
                                               double k = 0.2 * M_PI, double speed = 1.0) {
    ReferenceSolution r;
    r.kind = ReferenceSolution::Kind::Manufactured;
    r.label = "manufactured_wave";
    r.nu = nu;
    auto deriv = [=](int a, int b, double x, double t) {
        // d^a_x d^b_t of A*Im(exp(i k (x - c t) - nu k^2 t)) + 2*[a==b==0]
        std::complex<double> iw(0, k);
        std::complex<double> wt(-nu * k * k, -speed * k);
        std::complex<double> z = amplitude * std::exp(iw * x + wt * t);
        for (int i = 0; i < a; ++i) z *= iw;
        for (int i = 0; i < b; ++i) z *= wt;
        return z.imag() + ((a == 0 && b == 0) ? 2.0 : 0.0);
    };
    r.eval = [=](double x, double t) {
        return RefValues{deriv(0, 0, x, t), deriv(1, 0, x, t), deriv(2, 0, x, t),
                         deriv(0, 1, x, t)};
    };
    r.source = [=](double x, double t) {
        RefValues v{deriv(0, 0, x, t), deriv(1, 0, x, t), deriv(2, 0, x, t), deriv(0, 1, x, t)};
        return v.ut + v.u * v.ux - nu * v.uxx;
    };
    r.eval_xjet = [=](double x, double t) {
        XJet<8> j;
        for (int a = 0; a <= 8; ++a) {
            double f = 1;
            for (int i = 2; i <= a; ++i) f *= i;
            j.c[a] = deriv(a, 0, x, t) / f;
        }
        j.dt = deriv(0, 1, x, t);
        return j;
    };
    return r;
}

/// Max |u_t + u u_x - nu u_xx| of a reference over n pseudo-random domain
/// points (deterministic LCG; the verification oracle for the closed-form exact
/// solution).
inline double burgers_residual_audit(const ReferenceSolution& ref, int n = 1000,
                                     double x_min = 0, double x_max = 40, double t_min = 0,
                                     double t_max = 20, std::uint64_t seed = 12345) {
    std::uint64_t s = seed;
    auto next01 = [&s] {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) / 9007199254740992.0;
    };
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        double x = x_min + (x_max - x_min) * next01();
        double t = t_min + (t_max - t_min) * next01();
        RefValues v = ref(x, t);
        double res = v.ut + v.u * v.ux - ref.nu * v.uxx;
        if (ref.source) res -= ref.source(x, t);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Frame transforms (the six one-parameter groups)

struct FrameTransform {
    enum class Kind {
        Identity,
        SpaceTranslation,
        TimeTranslation,
        Dilatation3,
        Projective,
        Galilean,
        Dilatation6,
    };

    Kind kind = Kind::Identity;
    double epsilon = 0;  // group parameter; dilatations are multiplicative (identity at 1)

    static FrameTransform identity() { return {}; }

    bool is_identity() const {
        switch (kind) {
            case Kind::Identity: return true;
            case Kind::Dilatation3:
            case Kind::Dilatation6: return epsilon == 1.0;
            default: return epsilon == 0.0;
        }
    }

    std::string str() const {
        auto name = [&]() -> std::string {
            switch (kind) {
                case Kind::Identity: return "identity";
                case Kind::SpaceTranslation: return "space_translation";
                case Kind::TimeTranslation: return "time_translation";
                case Kind::Dilatation3: return "dilatation3";
                case Kind::Projective: return "projective";
                case Kind::Galilean: return "galilean";
                case Kind::Dilatation6: return "dilatation6";
            }
            return "?";
        }();
        if (kind == Kind::Identity) return name;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s:%.17g", name.c_str(), epsilon);
        return buf;
    }

    static FrameTransform parse(const std::string& spec) {
        if (spec == "identity" || spec == "none" || spec.empty()) return identity();
        auto colon = spec.find(':');
        std::string name = colon == std::string::npos ? spec : spec.substr(0, colon);
        double eps = colon == std::string::npos ? 0.0 : std::stod(spec.substr(colon + 1));
        Kind k;
        if (name == "space_translation") k = Kind::SpaceTranslation;
        else if (name == "time_translation") k = Kind::TimeTranslation;
        else if (name == "dilatation3") k = Kind::Dilatation3;
        else if (name == "projective") k = Kind::Projective;
        else if (name == "galilean") k = Kind::Galilean;
        else if (name == "dilatation6") k = Kind::Dilatation6;
        else throw std::invalid_argument("FrameTransform: unknown kind '" + name + "'");
        if (colon == std::string::npos)
            throw std::invalid_argument("FrameTransform: missing parameter in '" + spec + "'");
        return {k, eps};
    }
};

struct FramePoint {
    double x = 0, t = 0, u = 0, nu = 0;
};

/// Exact point transform (x, t, u, nu) -> (x*, t*, u*, nu*).
inline FramePoint frame_apply_point(const FrameTransform& ft, double x, double t, double u,
                                    double nu) {
    const double e = ft.epsilon;
    if ((ft.kind == FrameTransform::Kind::Dilatation3 ||
         ft.kind == FrameTransform::Kind::Dilatation6) && e == 0.0)
        throw std::invalid_argument("frame_apply_point: dilatation parameter must be nonzero");
    switch (ft.kind) {
        case FrameTransform::Kind::Identity:
            return {x, t, u, nu};
        case FrameTransform::Kind::SpaceTranslation:
            return {x + e, t, u, nu};
        case FrameTransform::Kind::TimeTranslation:
            return {x, t + e, u, nu};
        case FrameTransform::Kind::Dilatation3:
            return {e * x, e * e * t, u / e, nu};
        case FrameTransform::Kind::Projective: {
            double d = 1 - e * t;
            if (d <= 0)
                throw std::domain_error("frame_apply_point: projective pole at t = " +
                                        std::to_string(t));
            return {x / d, t / d, x * e + u * d, nu};
        }
        case FrameTransform::Kind::Galilean:
            return {x + e * t, t, u + e, nu};
        case FrameTransform::Kind::Dilatation6:
            return {x, t / e, e * u, e * nu};
    }
    throw std::invalid_argument("frame_apply_point: bad kind");
}

/// Solution transported to the new frame: u'(x', t') carries the group action
/// applied to u at the inverse-mapped point, with chain-rule-corrected
/// derivative outputs.
inline ReferenceSolution frame_pushforward_solution(const FrameTransform& ft,
                                                    const ReferenceSolution& ref) {
    using K = FrameTransform::Kind;
    const double e = ft.epsilon;
    if ((ft.kind == K::Dilatation3 || ft.kind == K::Dilatation6) && e == 0.0)
        throw std::invalid_argument(
            "frame_pushforward_solution: dilatation parameter must be nonzero");
    ReferenceSolution out = ref;
    out.eval_xjet = nullptr;  // high-order jets stay with the base solutions
    out.source = nullptr;
    switch (ft.kind) {
        case K::Identity:
            return ref;
        case K::SpaceTranslation:
            out.eval = [ref, e](double x, double t) { return ref(x - e, t); };
            return out;
        case K::TimeTranslation:
            out.eval = [ref, e](double x, double t) { return ref(x, t - e); };
            return out;
        case K::Dilatation3:
            out.eval = [ref, e](double x, double t) {
                RefValues b = ref(x / e, t / (e * e));
                return RefValues{b.u / e, b.ux / (e * e), b.uxx / (e * e * e),
                                 b.ut / (e * e * e)};
            };
            return out;
        case K::Galilean:
            out.eval = [ref, e](double x, double t) {
                RefValues b = ref(x - e * t, t);
                return RefValues{b.u + e, b.ux, b.uxx, b.ut - e * b.ux};
            };
            return out;
        case K::Dilatation6:
            out.nu = e * ref.nu;
            out.eval = [ref, e](double x, double t) {
                RefValues b = ref(x, e * t);
                return RefValues{e * b.u, e * b.ux, e * b.uxx, e * e * b.ut};
            };
            return out;
        case K::Projective:
            out.eval = [ref, e](double xh, double th) {
                double g = 1 + e * th;  // 1/(1 - e t) at the source point
                if (g <= 0)
                    throw std::domain_error("frame_pushforward_solution: projective pole");
                double t = th / g, x = xh / g;
                RefValues b = ref(x, t);
                // u'(xh,th) = (e x + u (1 - e t)) at source = (e xh + u)/g
                double dx_dxh = 1.0 / g;
                double dx_dth = -e * xh / (g * g);
                double dt_dth = 1.0 / (g * g);
                double u2 = (e * xh + b.u) / g;
                double ux2 = (e + b.ux * dx_dxh) / g;
                double uxx2 = b.uxx * dx_dxh * dx_dxh / g;
                double ut2 = (b.ux * dx_dth + b.ut * dt_dth) / g -
                             e * (e * xh + b.u) / (g * g);
                return RefValues{u2, ux2, uxx2, ut2};
            };
            return out;
    }
    throw std::invalid_argument("frame_pushforward_solution: bad kind");
}

/// Group composition parameter for two transforms of the same kind:
/// additive for translations/Galilean/projective, multiplicative for the
/// dilatations.
inline double compose_epsilon(FrameTransform::Kind k, double e1, double e2) {
    switch (k) {
        case FrameTransform::Kind::Dilatation3:
        case FrameTransform::Kind::Dilatation6:
            return e1 * e2;
        default:
            return e1 + e2;
    }
}

}  // namespace invfd
