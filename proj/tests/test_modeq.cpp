#include "invfd/problems.hpp"
#include "invfd/stencil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace invfd;

namespace {

AnalyticField exact_field(double nu) {
    ReferenceSolution ref = closed_form_solution(nu);
    AnalyticField f;
    f.nu = nu;
    f.value = [ref](double x, double t) { return ref(x, t).u; };
    f.derivative = [ref](int a, int b, double x, double t) {
        XJet<8> j = ref.eval_xjet(x, t);
        if (b == 0) return j.derivative(a);
        if (a == 0 && b == 1) return j.dt;
        throw std::invalid_argument("exact_field: derivative slot not carried");
    };
    return f;
}

}  // namespace

TEST_CASE("taylor expansion of the forward time difference") {
    Stencil td = (Stencil::value(Rational(0), Rational(1)) - Stencil::value(Rational(0), Rational(0))) *
                 DiffPoly(Monomial(Sym::tau(), -1), Rational(1));
    DiffPoly e = taylor_expand(td, 4);
    DiffPoly expect = poly::u(0, 1) + Rational(1, 2) * (poly::tau() * poly::u(0, 2)) +
                      Rational(1, 6) * (poly::tau().pow(2) * poly::u(0, 3)) +
                      Rational(1, 24) * (poly::tau().pow(3) * poly::u(0, 4));
    CHECK(e == expect);
}

TEST_CASE("taylor expansion of the centered flux difference") {
    // mu delta (u^2/2) / h = (u^2/2)_x + (h^2/12)(u^2)_xxx + ...
    auto usq = [](Rational p) {
        Stencil v = Stencil::value(std::move(p), Rational(0));
        return v * v * Rational(1, 2);
    };
    Stencil st = (usq(Rational(1)) - usq(Rational(-1))) * Rational(1, 2) *
                 DiffPoly(Monomial(Sym::h(), -1), Rational(1));
    DiffPoly e = truncate_grid_order(taylor_expand(st, 5), 1, 2);
    DiffPoly u2 = poly::u() * poly::u();
    DiffPoly expect = Rational(1, 2) * total_derivative(u2, Dir::X) +
                      Rational(1, 12) * (poly::h().pow(2) * dx_pow(u2, 3));
    CHECK(e == expect);
}

TEST_CASE("taylor expansion of the second central difference") {
    auto uat = [](Rational p) { return Stencil::value(std::move(p), Rational(0)); };
    Stencil st = (uat(Rational(1)) - uat(Rational(0)) * Rational(2) + uat(Rational(-1))) *
                 DiffPoly(Monomial(Sym::h(), -2), Rational(1));
    DiffPoly e = taylor_expand(st, 6);
    DiffPoly expect = poly::u(2, 0) + Rational(1, 12) * (poly::h().pow(2) * poly::u(4, 0)) +
                      Rational(1, 360) * (poly::h().pow(4) * poly::u(6, 0));
    CHECK(e == expect);
}

TEST_CASE("taylor_expand is linear in the stencil") {
    Stencil a = Stencil::value(Rational(1), Rational(0)) * poly::nu();
    Stencil b = Stencil::value(Rational(1, 2), Rational(1)) *
                (Stencil::value(Rational(-1), Rational(0)));
    CHECK(taylor_expand(a + b, 4) == taylor_expand(a, 4) + taylor_expand(b, 4));
}

TEST_CASE("differential approximations match the committed literals") {
    CHECK(differential_approximation(catalog_entry(SchemeName::Ftcs)) ==
          committed::ftcs());
    CHECK(differential_approximation(catalog_entry(SchemeName::LaxWendroff)) ==
          committed::lax_wendroff());
    CHECK(differential_approximation(catalog_entry(SchemeName::CrankNicolson)) ==
          committed::crank_nicolson());
}

TEST_CASE("any mismatch against a literal reports the differing monomials") {
    DiffPoly rep = differential_approximation(catalog_entry(SchemeName::Ftcs));
    DiffPoly tampered = committed::ftcs() + Rational(1, 7) * poly::h();
    DiffPoly diff = rep - tampered;
    CHECK(diff.str() == "-1/7*h");
}

TEST_CASE("consistency limits") {
    for (SchemeName s : {SchemeName::Ftcs, SchemeName::LaxWendroff,
                         SchemeName::CrankNicolson, SchemeName::HighOrder}) {
        DiffPoly d = differential_approximation(catalog_entry(s));
        CHECK(truncate_grid_order(d, 1, 0) == burgers_poly());
    }
    // the invariant entry's consistency limit carries the C flux term
    Rational kap(-1, 100);
    DiffPoly d = differential_approximation(catalog_entry(SchemeName::Invariant, kap));
    CHECK(truncate_grid_order(d, 1, 0) == burgers_poly() + c_flux_divergence(kap));
}

TEST_CASE("high-order entry has no error below weighted order four") {
    DiffPoly d = differential_approximation(catalog_entry(SchemeName::HighOrder));
    CHECK(truncate_grid_order(d, 2, 3) == burgers_poly());
    CHECK_FALSE(truncate_grid_order(d, 2, 4) == burgers_poly());
}

TEST_CASE("invariant entry splits linearly in kappa") {
    Rational kap(-1, 100);
    DiffPoly with_c = differential_approximation(catalog_entry(SchemeName::Invariant, kap));
    DiffPoly without = differential_approximation(catalog_entry(SchemeName::Invariant, Rational(0)));
    auto [k0, rest] = split_grid_order_zero(with_c - without);
    CHECK(k0 == c_flux_divergence(kap));
}

TEST_CASE("catalog stencils advance in time") {
    for (SchemeName s : {SchemeName::Ftcs, SchemeName::LaxWendroff,
                         SchemeName::CrankNicolson, SchemeName::Invariant,
                         SchemeName::HighOrder})
        CHECK(catalog_entry(s).stencil.time_advancing());
    // a stationary expression has no factor at a later level
    Stencil flat = Stencil::value(Rational(1), Rational(0)) -
                   Stencil::value(Rational(-1), Rational(0));
    CHECK_FALSE(flat.time_advancing());
}

TEST_CASE("half-integer shifts only") {
    CHECK_NOTHROW(Shift(Rational(3, 2), Rational(0)));
    CHECK_THROWS_AS(Shift(Rational(1, 3), Rational(0)), std::invalid_argument);
    CHECK_THROWS_AS(Shift(Rational(0), Rational(1, 4)), std::invalid_argument);
}

TEST_CASE("inconsistent stencil is rejected with the defect named") {
    // forward time difference plus a spurious u/h term: limit is not F
    Stencil bad = detail::ftcs_stencil() +
                  Stencil::value(Rational(0), Rational(0)) *
                      DiffPoly(Monomial(Sym::h(), -1), Rational(1));
    SchemeCatalogEntry entry{SchemeName::Ftcs, bad, 2, 2, Rational(0), burgers_poly()};
    CHECK_THROWS_AS(differential_approximation(entry), InconsistentStencilError);
}

TEST_CASE("numerical consistency: defect shrinks at the first neglected order") {
    AnalyticField field = exact_field(0.5);
    auto entry = catalog_entry(SchemeName::Ftcs);
    const double x = 1.1, t = 0.3;
    // tau ~ h^2 (w_tau = 2): the first neglected terms carry weight 4
    double d1 = numerical_consistency_check(entry, field, x, t, 0.05, 0.5 * 0.05 * 0.05);
    double d2 = numerical_consistency_check(entry, field, x, t, 0.025, 0.5 * 0.025 * 0.025);
    double ratio = d1 / d2;
    CHECK(ratio > 11.0);
    CHECK(ratio < 23.0);
}

TEST_CASE("numerical consistency at small steps") {
    AnalyticField field = exact_field(0.5);
    for (SchemeName s : {SchemeName::Ftcs, SchemeName::CrankNicolson}) {
        double d = numerical_consistency_check(catalog_entry(s), field, 1.1, 0.3, 1e-3, 1e-5);
        CHECK(d < 1e-8);
    }
}

TEST_CASE("high-order scheme defect matches the claimed accuracy") {
    // against F alone (modeled order trimmed to exclude the weight-4 block),
    // the defect must shrink like the claimed O(tau^2, h^4) under tau ~ h^2
    AnalyticField field = exact_field(0.5);
    SchemeCatalogEntry entry = catalog_entry(SchemeName::HighOrder);
    entry.modeled_order = 3;  // approximation reduces to F
    const double x = 1.1, t = 0.3;
    double d1 = numerical_consistency_check(entry, field, x, t, 0.1, 0.25 * 0.1 * 0.1);
    double d2 = numerical_consistency_check(entry, field, x, t, 0.05, 0.25 * 0.05 * 0.05);
    double observed = std::log2(d1 / d2);
    CHECK(observed > 3.5);
    CHECK(observed < 4.6);
}
