#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace invfd {

/// Base symbol of the differential-polynomial ring: the coordinates x, t, the
/// viscosity nu, the grid steps h, tau, and the derivative coordinates
/// u_{(a,b)} = d^{a+b} u / dx^a dt^b (with u itself as u_{(0,0)}).
struct Sym {
    enum class Kind : std::uint8_t { X, T, Nu, H, Tau, U };

    Kind kind = Kind::X;
    std::uint16_t a = 0;  // x-derivative count, U only
    std::uint16_t b = 0;  // t-derivative count, U only

    static Sym x() { return {Kind::X}; }
    static Sym t() { return {Kind::T}; }
    static Sym nu() { return {Kind::Nu}; }
    static Sym h() { return {Kind::H}; }
    static Sym tau() { return {Kind::Tau}; }
    static Sym u(int ax = 0, int bt = 0) {
        if (ax < 0 || bt < 0) throw std::invalid_argument("Sym::u: negative order");
        return {Kind::U, static_cast<std::uint16_t>(ax), static_cast<std::uint16_t>(bt)};
    }

    bool is_u() const { return kind == Kind::U; }
    int order() const { return is_u() ? a + b : 0; }

    // Total order: x < t < nu < h < tau < u-coordinates, the latter graded by
    // (total order, t-count, x-count). Deterministic across runs.
    friend std::strong_ordering operator<=>(const Sym& l, const Sym& r) {
        if (l.kind != r.kind) return l.kind <=> r.kind;
        if (l.kind != Kind::U) return std::strong_ordering::equal;
        if (l.order() != r.order()) return l.order() <=> r.order();
        if (l.b != r.b) return l.b <=> r.b;
        return l.a <=> r.a;
    }
    friend bool operator==(const Sym& l, const Sym& r) {
        return (l <=> r) == std::strong_ordering::equal;
    }

    std::string str() const {
        switch (kind) {
            case Kind::X: return "x";
            case Kind::T: return "t";
            case Kind::Nu: return "nu";
            case Kind::H: return "h";
            case Kind::Tau: return "tau";
            case Kind::U: {
                if (a == 0 && b == 0) return "u";
                std::string s = "u_";
                s.append(a, 'x');
                s.append(b, 't');
                return s;
            }
        }
        return "?";
    }

    /// Parse the printer's output ("x", "nu", "u", "u_xxt", ...).
    static Sym parse(const std::string& s) {
        if (s == "x") return x();
        if (s == "t") return t();
        if (s == "nu") return nu();
        if (s == "h") return h();
        if (s == "tau") return tau();
        if (s == "u") return u();
        if (s.rfind("u_", 0) == 0) {
            int ax = 0, bt = 0;
            for (std::size_t i = 2; i < s.size(); ++i) {
                if (s[i] == 'x' && bt == 0) ++ax;
                else if (s[i] == 't') ++bt;
                else throw std::invalid_argument("Sym::parse: bad derivative tag '" + s + "'");
            }
            if (ax + bt == 0) throw std::invalid_argument("Sym::parse: empty derivative tag");
            return u(ax, bt);
        }
        throw std::invalid_argument("Sym::parse: unknown symbol '" + s + "'");
    }
};

}  // namespace invfd
