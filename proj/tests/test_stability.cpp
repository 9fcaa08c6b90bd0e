#include "invfd/schemes.hpp"
#include "invfd/stability.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

using namespace invfd;

TEST_CASE("classical condition table") {
    CHECK(check_classical(SchemeName::Ftcs, {0.4, 0.9, 0.4 + 0.405, 0}) == Verdict::Stable);
    CHECK(check_classical(SchemeName::Ftcs, {0.6, 0.5, 0, 0}) == Verdict::Unstable);
    CHECK(check_classical(SchemeName::CrankNicolson, {5.0, 3.0, 0, 0}) ==
          Verdict::Unconditional);
    StabilityParams lw = StabilityParams::from_run(1.0, 0.3, 1.0, 0.6);
    CHECK(lw.S_star == Catch::Approx(lw.S + lw.CFL * lw.CFL / 2));
    CHECK_THROWS_AS(check_classical(SchemeName::Invariant, lw), std::invalid_argument);
}

TEST_CASE("invariant-scheme conditions") {
    InvariantCheck a = check_invariant({0.5, 0.5, 0, 0});
    CHECK(a.slack1 == Catch::Approx(-0.75));
    CHECK(a.middle == Catch::Approx(1.0 / 6));
    CHECK(a.verdict == Verdict::Stable);

    InvariantCheck b = check_invariant({0.0, 0.1, 0, 0});
    CHECK(b.slack1 == Catch::Approx(0.01));
    CHECK(b.verdict == Verdict::Unstable);

    InvariantCheck c = check_invariant({0.0, 0.0, 0, 0.5});
    CHECK(c.middle == Catch::Approx(0.5));
    CHECK(c.verdict == Verdict::Stable);
    CHECK(c.at_boundary);
    CHECK(c.sufficiency_caveat);  // |Omega tau| = 0.5 > 0.05
}

TEST_CASE("condition 1 is monotone in S") {
    // with Omega tau = 0 and S >= CFL^2/2, increasing S within [0, 1/2]
    // never flips condition 1 from satisfied to violated
    for (double cfl : {0.1, 0.4, 0.8}) {
        bool prev_ok = true;
        bool seen_ok = false;
        for (double S = cfl * cfl / 2; S <= 0.5; S += 0.01) {
            bool ok = check_invariant({S, cfl, 0, 0}).slack1 <= 0;
            if (seen_ok) CHECK(ok == prev_ok);  // no stable -> unstable flip
            seen_ok = ok;
            prev_ok = ok;
        }
    }
}

namespace {

/// One-mode growth factor of the nonlinear scheme frozen about u = a on a
/// periodic grid, extracted by linearizing with a small perturbation.
double nonlinear_mode_growth(SchemeName scheme, double S, double CFL, double theta,
                             int nsteps = 6) {
    const int n = 32;
    const double h = 1.0, a = 1.0;
    const double tau = CFL * h / a;
    const double nu = S * h * h / tau;
    Grid1D g(0, h, n + 1);
    const double eps = 1e-7;
    auto wrap = [&](Field& w) {
        w.at(g, n) = w.at(g, 0);
        for (int k = 1; k <= g.ghost_depth; ++k) {
            w.at(g, -k) = w.at(g, n - k);
            w.at(g, n + k - 1) = w.at(g, k - 1);
        }
    };
    Field re(g, 0.0), im(g, 0.0);
    for (int i = -g.ghost_depth; i < g.n_points + g.ghost_depth; ++i) {
        re.at(g, i) = a + eps * std::cos(theta * i);
        im.at(g, i) = a + eps * std::sin(theta * i);
    }
    StepParams p(tau, nu, CSpec::zero());
    for (int s = 0; s < nsteps; ++s) {
        Field re2 = re, im2 = im;
        switch (scheme) {
            case SchemeName::Ftcs:
                detail::step_ftcs(re, re2, p, g);
                detail::step_ftcs(im, im2, p, g);
                break;
            case SchemeName::LaxWendroff:
                detail::step_lax_wendroff(re, re2, p, g);
                detail::step_lax_wendroff(im, im2, p, g);
                break;
            default:
                detail::step_invariant(re, re2, p, g);
                detail::step_invariant(im, im2, p, g);
                break;
        }
        // periodic closure of the two endpoint updates using wrapped ghosts
        auto close = [&](const Field& src, Field& dst) {
            // shift the periodic window so index 0 becomes interior
            Grid1D gw(0, h, 5);
            Field loc(gw, 0.0);
            for (int k = -2; k <= 2; ++k) loc.at(gw, 2 + k) = src.at(g, (k + n) % n);
            Field out = loc;
            switch (scheme) {
                case SchemeName::Ftcs: detail::step_ftcs(loc, out, p, gw); break;
                case SchemeName::LaxWendroff: detail::step_lax_wendroff(loc, out, p, gw); break;
                default: detail::step_invariant(loc, out, p, gw); break;
            }
            dst.at(g, 0) = out.at(gw, 2);
        };
        close(re, re2);
        close(im, im2);
        re = re2;
        im = im2;
        wrap(re);
        wrap(im);
    }
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        double wr = (re.at(g, i) - a) / eps, wi = (im.at(g, i) - a) / eps;
        worst = std::max(worst, std::hypot(wr, wi));
    }
    return std::pow(worst, 1.0 / nsteps);
}

}  // namespace

TEST_CASE("amplification factors reproduce frozen-coefficient behavior") {
    struct Case {
        SchemeName scheme;
        double S, CFL, theta;
    };
    const Case cases[] = {
        {SchemeName::Ftcs, 0.3, 0.4, M_PI / 2},
        {SchemeName::Ftcs, 0.45, 0.2, M_PI},
        {SchemeName::LaxWendroff, 0.2, 0.6, 3 * M_PI / 4},
        {SchemeName::HighOrder, 0.2, 0.5, M_PI / 2},
        {SchemeName::HighOrder, 0.35, 0.3, M_PI},
    };
    for (const auto& c : cases) {
        double predicted = std::abs(amplification_factor(c.scheme, c.S, c.CFL, c.theta));
        double measured = nonlinear_mode_growth(c.scheme, c.S, c.CFL, c.theta);
        INFO(scheme_id(c.scheme) << " S=" << c.S << " CFL=" << c.CFL << " theta=" << c.theta);
        CHECK(measured == Catch::Approx(predicted).epsilon(5e-3));
    }
}

TEST_CASE("Crank-Nicolson amplification against the time-averaged solve") {
    // one nonlinear CN step on data prescribed by the frozen-linear mode
    const double S = 0.8, CFL = 0.4, theta = M_PI / 2;
    const double h = 1.0, a = 1.0, tau = CFL * h / a, nu = S * h * h / tau;
    std::complex<double> gpred = amplification_factor(SchemeName::CrankNicolson, S, CFL, theta);
    const int n = 64;
    Grid1D g(0, h, n);
    const double eps = 1e-7;
    auto mode_at = [&](int i, double steps) {
        std::complex<double> z =
            std::pow(gpred, steps) * std::polar(1.0, theta * i);
        return a + eps * z.real();
    };
    Field f(g, 0.0);
    for (int i = -g.ghost_depth; i < n + g.ghost_depth; ++i) f.at(g, i) = mode_at(i, 0);
    BoundaryProvider bc = [&](double x, double t) {
        return mode_at(static_cast<int>(std::lround(x / h)), t / tau);
    };
    StepParams p(tau, nu);
    Field next = step(SchemeName::CrankNicolson, f, p, g, bc);
    double worst = 0;
    for (int i = 8; i < n - 8; ++i)
        worst = std::max(worst, std::abs(next.at(g, i) - mode_at(i, 1)));
    CHECK(worst < 1e-11);  // relative to the eps-mode amplitude: ~1e-4
}

TEST_CASE("mode growth spans the stability boundary") {
    CHECK(mode_growth(SchemeName::Ftcs, 0.45, 0.2) <= 1.01);
    CHECK(mode_growth(SchemeName::Ftcs, 0.55, 0.2) > 1.01);
    CHECK(mode_growth(SchemeName::LaxWendroff, 0.1, 0.8) <= 1.01);
    CHECK(mode_growth(SchemeName::LaxWendroff, 0.1, 1.05) > 1.01);
    CHECK(mode_growth(SchemeName::CrankNicolson, 1.2, 2.0) <= 1.01);
}

TEST_CASE("run monitor emits one record per step and never mutates") {
    RunMonitor mon(SchemeName::Invariant, StabilityParams::from_run(1.0, 0.4, 0.2, 0.001));
    for (int s = 0; s <= 4; ++s) {
        MonitorRecord rec = mon.observe(s, s * 0.001, 0.01);
        CHECK(rec.verdict == Verdict::Stable);
        CHECK_FALSE(rec.sufficiency_caveat);
    }
    CHECK(mon.records().size() == 5);
    MonitorRecord big = mon.observe(5, 0.005, 0.2);
    CHECK(big.sufficiency_caveat);
}
