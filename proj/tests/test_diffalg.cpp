#include "invfd/diffpoly.hpp"
#include "invfd/problems.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace invfd;

namespace {

// deterministic LCG for property tests
struct Rng {
    std::uint64_t s = 0x9e3779b97f4a7c15ULL;
    std::uint64_t next() { return s = s * 6364136223846793005ULL + 1442695040888963407ULL; }
    int below(int n) { return static_cast<int>(next() >> 33) % n; }
};

DiffPoly random_poly(Rng& rng, int max_terms = 4, bool allow_time = true) {
    static const std::vector<Sym> syms = {
        Sym::x(), Sym::t(), Sym::nu(), Sym::h(), Sym::tau(),
        Sym::u(), Sym::u(1, 0), Sym::u(2, 0), Sym::u(0, 1), Sym::u(1, 1)};
    DiffPoly p;
    int terms = 1 + rng.below(max_terms);
    for (int i = 0; i < terms; ++i) {
        Monomial m;
        int nf = rng.below(3);
        for (int j = 0; j < nf; ++j) {
            Sym s = syms[rng.below(static_cast<int>(syms.size()))];
            if (!allow_time && s.is_u() && s.b > 0) s = Sym::u(s.a, 0);
            m = m.times(Monomial(s, 1 + rng.below(2)));
        }
        int num = rng.below(9) - 4;
        if (num == 0) num = 1;
        p.add_term(m, Rational(num, 1 + rng.below(3)));
    }
    return p;
}

}  // namespace

TEST_CASE("rational canonical form") {
    CHECK(Rational(2, 4).str() == "1/2");
    CHECK(Rational(-3, -6).str() == "1/2");
    CHECK(Rational(3, -6).str() == "-1/2");
    CHECK(Rational(0, 7).str() == "0");
    CHECK(Rational::from_string("-1/12") == Rational(-1, 12));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(2, 3).pow(3) == Rational(8, 27));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("ring basics") {
    DiffPoly u = poly::u();
    CHECK((u + (-u)).is_zero());
    CHECK(DiffPoly::mul(u, u) * Rational(1, 2) == Rational(1, 2) * (u * u));

    // pow_2(u + h) expanded vs naive term-by-term multiplication oracle
    DiffPoly s = u + poly::h();
    DiffPoly naive;
    for (const auto& [ma, ca] : s.terms())
        for (const auto& [mb, cb] : s.terms()) naive.add_term(ma.times(mb), ca * cb);
    CHECK(s.pow(2) == naive);
    CHECK(s.pow(2) == u * u + Rational(2) * (poly::h() * u) + poly::h() * poly::h());
}

TEST_CASE("ring laws on random polynomials") {
    Rng rng;
    for (int i = 0; i < 60; ++i) {
        DiffPoly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * b == b * a);
        CHECK(DiffPoly::mul(a, b + c) == a * b + a * c);
        CHECK(DiffPoly::mul(DiffPoly::mul(a, b), c) == DiffPoly::mul(a, DiffPoly::mul(b, c)));
    }
}

TEST_CASE("partial derivative") {
    DiffPoly u = poly::u();
    CHECK(partial(u * u, Sym::u()) == Rational(2) * u);
    CHECK(partial(poly::nu() * poly::u(2, 0), Sym::nu()) == poly::u(2, 0));
    // partial(x*u_x^2, u_x) = 2 x u_x
    DiffPoly p = poly::x() * poly::u(1, 0) * poly::u(1, 0);
    CHECK(partial(p, Sym::u(1, 0)) == Rational(2) * (poly::x() * poly::u(1, 0)));
    // Leibniz on random pairs
    Rng rng;
    for (int i = 0; i < 30; ++i) {
        DiffPoly a = random_poly(rng), b = random_poly(rng);
        CHECK(partial(a * b, Sym::u()) ==
              partial(a, Sym::u()) * b + a * partial(b, Sym::u()));
    }
}

TEST_CASE("partial derivative numeric cross-check") {
    // d/d(u_x) of x*u_x^2 at a sample point, against a finite difference in
    // the u_x coordinate
    DiffPoly p = poly::x() * poly::u(1, 0) * poly::u(1, 0);
    DiffPoly dp = partial(p, Sym::u(1, 0));
    double ux0 = 0.7;
    auto at = [&](double ux) {
        EvalPoint pt{1.3, 0.5, 0.1, 0.01, 0.001,
                     [&](int a, int b) { return (a == 1 && b == 0) ? ux : 0.4; }};
        return evaluate(p, pt);
    };
    EvalPoint pt{1.3, 0.5, 0.1, 0.01, 0.001,
                 [&](int a, int b) { return (a == 1 && b == 0) ? ux0 : 0.4; }};
    double fd = (at(ux0 + 1e-6) - at(ux0 - 1e-6)) / 2e-6;
    CHECK(evaluate(dp, pt) == Catch::Approx(fd).epsilon(1e-7));
}

TEST_CASE("total derivatives") {
    DiffPoly u = poly::u();
    CHECK(total_derivative(u * u * Rational(1, 2), Dir::X) == u * poly::u(1, 0));
    CHECK(total_derivative(poly::x() * poly::u(1, 0), Dir::X) ==
          poly::u(1, 0) + poly::x() * poly::u(2, 0));
    CHECK(total_derivative(poly::nu() * poly::u(2, 0), Dir::T) ==
          poly::nu() * poly::u(2, 1));
    CHECK(total_derivative(DiffPoly(Sym::u(0, 0)), Dir::X) == poly::u(1, 0));
}

TEST_CASE("total derivatives commute") {
    Rng rng;
    for (int i = 0; i < 100; ++i) {
        DiffPoly p = random_poly(rng, 3);
        CHECK(total_derivative(total_derivative(p, Dir::X), Dir::T) ==
              total_derivative(total_derivative(p, Dir::T), Dir::X));
    }
}

TEST_CASE("eliminate_time examples") {
    DiffPoly g1 = burgers_g1();
    CHECK(eliminate_time(poly::u(0, 1)) == g1);
    // u_tt -> (-g1 u)_x + nu (g1)_xx
    DiffPoly g2 = total_derivative(-(g1 * poly::u()), Dir::X) +
                  poly::nu() * dx_pow(g1, 2);
    CHECK(eliminate_time(poly::u(0, 2)) == g2);
    // u_xt -> D_x g1 = -u_x^2 - u u_xx + nu u_xxx
    DiffPoly expect = -(poly::u(1, 0) * poly::u(1, 0)) - poly::u() * poly::u(2, 0) +
                      poly::nu() * poly::u(3, 0);
    CHECK(eliminate_time(poly::u(1, 1)) == expect);
    CHECK(eliminate_time(poly::u(1, 1)) == total_derivative(g1, Dir::X));
}

TEST_CASE("eliminate_time is idempotent and confluent") {
    Rng rng;
    for (int i = 0; i < 40; ++i) {
        DiffPoly p = random_poly(rng, 3);
        DiffPoly e = eliminate_time(p);
        CHECK(eliminate_time(e) == e);
        CHECK_FALSE(e.has_time_derivative());
        // D_t then eliminate == eliminate, then chain rule with g1
        DiffPoly route1 = eliminate_time(total_derivative(p, Dir::T));
        DiffPoly route2 = eliminate_time(total_derivative(eliminate_time(p), Dir::T));
        CHECK(route1 == route2);
    }
}

TEST_CASE("truncate_grid_order") {
    DiffPoly p = poly::u(0, 1) + poly::tau() * poly::u() +
                 poly::tau() * poly::tau() * poly::x();
    CHECK(truncate_grid_order(p, 1, 1) == poly::u(0, 1) + poly::tau() * poly::u());
    DiffPoly q = poly::h() * poly::h() * poly::u() +
                 poly::h().pow(4) * poly::x();
    CHECK(truncate_grid_order(q, 1, 2) == poly::h() * poly::h() * poly::u());
    CHECK_THROWS_AS(truncate_grid_order(p, 0, 1), std::invalid_argument);
    // order-0 part unchanged for any weight
    Rng rng;
    for (int i = 0; i < 20; ++i) {
        DiffPoly r = random_poly(rng);
        auto [zero, rest] = split_grid_order_zero(r);
        CHECK(split_grid_order_zero(truncate_grid_order(r, 2, 1)).first == zero);
    }
}

TEST_CASE("symbolic-vs-numeric total derivative on an analytic field") {
    // evaluate D_x p along a smooth field and compare with the x-derivative
    // of the numeric evaluation of p (central finite difference oracle)
    ReferenceSolution field = manufactured_solution(0.3);
    Rng rng;
    for (int trial = 0; trial < 10; ++trial) {
        DiffPoly p = random_poly(rng, 3);
        DiffPoly dp = total_derivative(p, Dir::X);
        double x = 3.0 + trial * 0.7, t = 0.4;
        auto point = [&](double xx) {
            return EvalPoint{xx, t, field.nu, 0.01, 0.001, [&, xx](int a, int b) {
                std::complex<double> iw(0, 0.2 * M_PI);
                // use the known closed-form derivatives of the manufactured wave
                std::complex<double> wt(-0.3 * 0.2 * M_PI * 0.2 * M_PI, -0.2 * M_PI);
                std::complex<double> z = 0.5 * std::exp(iw * xx + wt * t);
                for (int k = 0; k < a; ++k) z *= iw;
                for (int k = 0; k < b; ++k) z *= wt;
                return z.imag() + ((a == 0 && b == 0) ? 2.0 : 0.0);
            }};
        };
        double symbolic = evaluate(dp, point(x));
        double e = 1e-5;
        double numeric = (evaluate(p, point(x + e)) - evaluate(p, point(x - e))) / (2 * e);
        double scale = std::max({1.0, std::abs(symbolic), std::abs(numeric)});
        CHECK(std::abs(symbolic - numeric) / scale < 1e-8);
    }
}

TEST_CASE("canonical printer and parser round-trip") {
    CHECK(burgers_poly().str() == "u_t - nu*u_xx + u*u_x");
    CHECK(parse_poly("u_t - nu*u_xx + u*u_x") == burgers_poly());
    CHECK(DiffPoly().str() == "0");
    CHECK(parse_poly("0").is_zero());
    CHECK(parse_poly("-1/2*h^2*u_xx + 3*x") ==
          Rational(-1, 2) * (poly::h() * poly::h() * poly::u(2, 0)) + Rational(3) * poly::x());
    Rng rng;
    for (int i = 0; i < 50; ++i) {
        DiffPoly p = random_poly(rng, 5);
        CHECK(parse_poly(p.str()) == p);
    }
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_poly(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly("u +"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly("q^2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly("u_q"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly("3/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_poly("u u"), std::invalid_argument);
}
