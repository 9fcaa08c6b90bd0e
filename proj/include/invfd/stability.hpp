#pragma once

#include "invfd/stencil.hpp"  // SchemeName

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace invfd {

/// Dimensionless stability parameters: S = nu tau/h^2, CFL = a tau/h,
/// S* = (nu + a h CFL/2) tau/h^2 = S + CFL^2/2, and the pointwise
/// Omega_tau = Omega * tau of the invariant-family schemes.
struct StabilityParams {
    double S = 0;
    double CFL = 0;
    double S_star = 0;
    double omega_tau = 0;

    static StabilityParams from_run(double a, double nu, double h, double tau,
                                    double omega_tau = 0) {
        double S = nu * tau / (h * h);
        double CFL = a * tau / h;
        return {S, CFL, S + CFL * CFL / 2, omega_tau};
    }
};

/// Frozen-coefficient advection speed; the linearization point u = a.
/// For the nonlinear problem a has no canonical definition; it is
/// taken as max_i |u(x_i, 0)| over the initial grid data of the active frame.
struct CharacteristicSpeed {
    double a = 0;
    enum class Provenance { FromInitialData } provenance = Provenance::FromInitialData;
};

enum class Verdict { Stable, Unstable, Unconditional };

inline std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        case Verdict::Unconditional: return "unconditional";
    }
    return "?";
}

/// Linear stability conditions of the classical schemes:
/// FTCS: S <= 1/2 and CFL <= 1; Lax-Wendroff: S* <= 1/2 and CFL <= 1;
/// Crank-Nicolson: unconditional.
inline Verdict check_classical(SchemeName scheme, const StabilityParams& sp) {
    switch (scheme) {
        case SchemeName::Ftcs:
            return (sp.S <= 0.5 && sp.CFL <= 1.0) ? Verdict::Stable : Verdict::Unstable;
        case SchemeName::LaxWendroff:
            return (sp.S_star <= 0.5 && sp.CFL <= 1.0) ? Verdict::Stable : Verdict::Unstable;
        case SchemeName::CrankNicolson:
            return Verdict::Unconditional;
        default:
            throw std::invalid_argument("check_classical: no classical conditions for '" +
                                        scheme_id(scheme) + "'");
    }
}

/// Von Neumann conditions of the invariant scheme:
///   CFL^2 - 2S - 2 Omega_tau <= 0   and   0 <= 4S/3 - 2S^2 + Omega_tau <= 1/2.
/// Necessary in general; sufficient only for Omega near zero, flagged via the
/// configurable threshold on |Omega_tau|.
struct InvariantCheck {
    double slack1 = 0;   // CFL^2 - 2S - 2 Omega_tau (stable when <= 0)
    double middle = 0;   // 4S/3 - 2S^2 + Omega_tau (stable when in [0, 1/2])
    Verdict verdict = Verdict::Unstable;
    bool at_boundary = false;
    bool sufficiency_caveat = false;  // |Omega_tau| above the near-zero threshold
};

inline InvariantCheck check_invariant(const StabilityParams& sp,
                                      double caveat_threshold = 0.05) {
    InvariantCheck c;
    c.slack1 = sp.CFL * sp.CFL - 2 * sp.S - 2 * sp.omega_tau;
    c.middle = 4 * sp.S / 3 - 2 * sp.S * sp.S + sp.omega_tau;
    bool ok = c.slack1 <= 0 && c.middle >= 0 && c.middle <= 0.5;
    c.verdict = ok ? Verdict::Stable : Verdict::Unstable;
    c.at_boundary = ok && (c.slack1 == 0 || c.middle == 0 || c.middle == 0.5);
    c.sufficiency_caveat = std::abs(sp.omega_tau) > caveat_threshold;
    return c;
}

inline Verdict scheme_verdict(SchemeName scheme, const StabilityParams& sp) {
    if (scheme == SchemeName::Invariant || scheme == SchemeName::HighOrder)
        return check_invariant(sp).verdict;
    return check_classical(scheme, sp);
}

// ---------------------------------------------------------------------------
// Frozen-coefficient amplification factors
//
// Each nonlinear scheme linearized about the constant state u = a gives a
// one-step linear operator on the periodic grid; on the Fourier mode
// e^{i theta j} it acts by a scalar factor g(theta). The factors below are the
// symbols of those linearizations, assembled from the shift symbol
// z = e^{i theta}. Unit tests check them against one-mode runs of the
// nonlinear steppers.

inline std::complex<double> amplification_factor(SchemeName scheme, double S, double CFL,
                                                 double theta) {
    using C = std::complex<double>;
    const double h = 1.0, a = 1.0;
    const double tau = CFL * h / a;
    const double nu = CFL > 0 ? S * h * h / tau : 0.0;
    const C z = std::polar(1.0, theta);
    const C zi = 1.0 / z;
    const C d2 = z - 2.0 + zi;
    const C d4 = d2 * d2;
    const C mud = 0.5 * (z - zi);
    const C mud3 = 0.5 * (z * z - 2.0 * z + 2.0 * zi - zi * zi);

    switch (scheme) {
        case SchemeName::Ftcs:
            return 1.0 - tau * (a * mud / h - nu * d2 / (h * h));
        case SchemeName::LaxWendroff: {
            C A = -(a * a * tau / (2 * h * h)) * d2 - (nu * nu * tau / 2.0) * d4 / (h * h * h * h)
                  + (a * nu * tau / (h * h * h)) * mud3;
            return 1.0 - tau * (a * mud / h - nu * d2 / (h * h) + A);
        }
        case SchemeName::CrankNicolson: {
            C lam = a * mud / h - nu * d2 / (h * h);
            return (1.0 - tau * lam / 2.0) / (1.0 + tau * lam / 2.0);
        }
        case SchemeName::Invariant:
        case SchemeName::HighOrder: {
            // frozen C = 0 (the built-in family vanishes at u_x = 0), so
            // Omega tau = CFL^2/2
            C om_term = (tau * a * a / (2 * h * h)) * d2;
            C corr = (a * nu * tau / (h * h * h)) * mud3 -
                     (nu * nu * tau / 2.0) * d4 / (h * h * h * h);
            return 1.0 - tau * (a * (mud - mud3 / 6.0) / h - nu * (d2 - d4 / 12.0) / (h * h) -
                                om_term + corr);
        }
    }
    throw std::invalid_argument("amplification_factor: unknown scheme");
}

/// Growth factor of the worst sampled Fourier mode over nsteps steps of the
/// frozen-coefficient scheme at the given (S, CFL).
inline double mode_growth(SchemeName scheme, double S, double CFL, int nsteps = 200) {
    static const double thetas[] = {M_PI, 3 * M_PI / 4, M_PI / 2, M_PI / 4};
    double worst = 0;
    for (double th : thetas) {
        double g = std::abs(amplification_factor(scheme, S, CFL, th));
        worst = std::max(worst, std::pow(g, nsteps));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Run monitoring

struct MonitorRecord {
    int step = 0;
    double time = 0;
    double max_abs_omega_tau = 0;
    double field_max = 0;  // max |u| over the grid, for growth diagnosis
    Verdict verdict = Verdict::Stable;
    bool sufficiency_caveat = false;
    int first_nan_index = -1;  // -1: all finite
};

/// Passive per-step stability monitor. Never mutates the simulation; emits
/// one record per observed step.
class RunMonitor {
public:
    RunMonitor(SchemeName scheme, StabilityParams base) : scheme_(scheme), base_(base) {}

    MonitorRecord observe(int step, double time, double max_abs_omega_tau,
                          double field_max = 0, int first_nan_index = -1) {
        MonitorRecord rec;
        rec.step = step;
        rec.time = time;
        rec.max_abs_omega_tau = max_abs_omega_tau;
        rec.field_max = field_max;
        StabilityParams sp = base_;
        sp.omega_tau = max_abs_omega_tau;
        if (scheme_ == SchemeName::Invariant || scheme_ == SchemeName::HighOrder) {
            InvariantCheck c = check_invariant(sp);
            rec.verdict = c.verdict;
            rec.sufficiency_caveat = c.sufficiency_caveat;
        } else {
            rec.verdict = check_classical(scheme_, sp);
        }
        rec.first_nan_index = first_nan_index;
        records_.push_back(rec);
        return rec;
    }

    const std::vector<MonitorRecord>& records() const { return records_; }

private:
    SchemeName scheme_;
    StabilityParams base_;
    std::vector<MonitorRecord> records_;
};

}  // namespace invfd
