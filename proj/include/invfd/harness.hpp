#pragma once

#include "invfd/problems.hpp"
#include "invfd/schemes.hpp"
#include "invfd/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace invfd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One experiment's parameters. Deterministic: no seeds, no clocks.
struct RunConfig {
    std::vector<SchemeName> schemes;  // one entry normally; several = comparison mode
    FrameTransform frame;
    int nx = 201;
    std::optional<double> re_h;
    std::optional<double> nu;
    double cfl = 0.04;
    double t_final = 20.0;
    std::vector<double> snapshot_times = {5.0};
    double c_kappa = -0.01;
    std::string output_dir = "out";

    static constexpr double x_min = 0.0;
    static constexpr double x_max = 40.0;

    void validate() const {
        if (schemes.empty()) throw ConfigError("config: missing required key 'scheme'");
        if (nx < 11) throw ConfigError("config: nx must be >= 11");
        if (cfl <= 0) throw ConfigError("config: cfl must be positive");
        if (t_final < 0 || t_final > 20)
            throw ConfigError("config: t_final must lie in [0, 20]");
        if (re_h && nu) throw ConfigError("config: 'nu' and 're_h' both present; give one");
        if (!re_h && !nu) throw ConfigError("config: one of 'nu' or 're_h' is required");
        if (re_h && *re_h <= 0) throw ConfigError("config: re_h must be positive");
        if (nu && *nu <= 0) throw ConfigError("config: nu must be positive");
    }
};

/// Parse line-oriented `key = value` text with '#' comments. Unknown keys are
/// rejected; every error carries its line number.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.schemes.clear();
    cfg.snapshot_times.clear();
    bool have_snapshots = false;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError("config line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (value.empty()) fail("empty value for '" + key + "'");

        auto as_double = [&](const std::string& v) {
            try {
                std::size_t pos = 0;
                double d = std::stod(v, &pos);
                if (pos != v.size()) throw std::invalid_argument("trailing junk");
                return d;
            } catch (const std::exception&) {
                fail("malformed number '" + v + "'");
                return 0.0;  // unreachable
            }
        };
        auto as_int = [&](const std::string& v) {
            double d = as_double(v);
            int i = static_cast<int>(d);
            if (d != i) fail("expected integer, got '" + v + "'");
            return i;
        };

        try {
            if (key == "scheme") {
                std::istringstream list(value);
                std::string item;
                while (std::getline(list, item, ',')) {
                    auto t = item.find_first_not_of(" \t");
                    auto e = item.find_last_not_of(" \t");
                    cfg.schemes.push_back(scheme_from_id(item.substr(t, e - t + 1)));
                }
            } else if (key == "frame") {
                cfg.frame = FrameTransform::parse(value);
            } else if (key == "nx") {
                cfg.nx = as_int(value);
            } else if (key == "re_h") {
                cfg.re_h = as_double(value);
            } else if (key == "nu") {
                cfg.nu = as_double(value);
            } else if (key == "cfl") {
                cfg.cfl = as_double(value);
            } else if (key == "t_final") {
                cfg.t_final = as_double(value);
            } else if (key == "snapshot_times") {
                std::istringstream list(value);
                std::string item;
                while (std::getline(list, item, ',')) cfg.snapshot_times.push_back(as_double(item));
                have_snapshots = true;
            } else if (key == "c_kappa") {
                cfg.c_kappa = as_double(value);
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& ex) {
            fail(ex.what());
        }
    }
    if (!have_snapshots) cfg.snapshot_times = {5.0};
    try {
        cfg.validate();
    } catch (const ConfigError& ex) {
        throw;  // validation errors are not line-specific
    }
    return cfg;
}

inline std::string config_echo(const RunConfig& cfg) {
    std::ostringstream out;
    out << "scheme = ";
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i)
        out << (i ? "," : "") << scheme_id(cfg.schemes[i]);
    out << "\n";
    out << "frame = " << cfg.frame.str() << "\n";
    out << "nx = " << cfg.nx << "\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    if (cfg.re_h) out << "re_h = " << num(*cfg.re_h) << "\n";
    if (cfg.nu) out << "nu = " << num(*cfg.nu) << "\n";
    out << "cfl = " << num(cfg.cfl) << "\n";
    out << "t_final = " << num(cfg.t_final) << "\n";
    out << "snapshot_times = ";
    for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i)
        out << (i ? "," : "") << num(cfg.snapshot_times[i]);
    out << "\n";
    out << "c_kappa = " << num(cfg.c_kappa) << "\n";
    out << "output_dir = " << cfg.output_dir << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Step resolution

struct ResolvedSteps {
    double h = 0;
    double tau = 0;
    double nu = 0;
    double a = 0;  // frozen-coefficient speed from initial data
    int n_steps = 0;
};

namespace detail {

inline double initial_speed(const ReferenceSolution& ref, const Grid1D& g) {
    double a = 0;
    for (int i = 0; i < g.n_points; ++i) a = std::max(a, std::abs(ref(g.x_at(i), 0.0).u));
    return a;
}

}  // namespace detail

/// Reference solution of the configured frame at the given viscosity.
inline ReferenceSolution make_reference(const RunConfig& cfg, double nu) {
    ReferenceSolution base = closed_form_solution(nu);
    if (cfg.frame.is_identity()) return base;
    return frame_pushforward_solution(cfg.frame, base);
}

/// Resolve (h, tau, nu, a): h from the fixed domain, a from the active
/// frame's initial data, nu either given or from the mesh Reynolds number by
/// fixed-point iteration, tau from the CFL number (shrunk so the run lands
/// exactly on t_final).
inline ResolvedSteps resolve_steps(const RunConfig& cfg) {
    ResolvedSteps r;
    r.h = (RunConfig::x_max - RunConfig::x_min) / (cfg.nx - 1);
    Grid1D grid(RunConfig::x_min, r.h, cfg.nx);
    if (cfg.nu) {
        r.nu = *cfg.nu;
        r.a = detail::initial_speed(make_reference(cfg, r.nu), grid);
    } else {
        double nu = 0.5;
        bool converged = false;
        for (int it = 0; it < 20; ++it) {
            double a = detail::initial_speed(make_reference(cfg, nu), grid);
            double next = a * r.h / *cfg.re_h;
            if (std::abs(next - nu) <= 1e-10) {
                nu = next;
                converged = true;
                break;
            }
            nu = next;
        }
        if (!converged)
            throw ConfigError("resolve_steps: re_h fixed point did not converge; "
                              "specify nu directly");
        r.nu = nu;
        r.a = detail::initial_speed(make_reference(cfg, nu), grid);
    }
    double tau_raw = cfg.cfl * r.h / r.a;
    if (cfg.t_final <= 0) {
        r.tau = tau_raw;
        r.n_steps = 0;
    } else {
        r.n_steps = static_cast<int>(std::ceil(cfg.t_final / tau_raw - 1e-12));
        r.tau = cfg.t_final / r.n_steps;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Error metric and series

/// Grid-function L2 norm of the error against the reference at time t:
/// sqrt(h * sum over strict-interior nodes of (u_i - u_ref)^2).
inline double l2_error(const Field& f, const ReferenceSolution& ref, double t,
                       const Grid1D& g) {
    double sum = 0;
    for (int i = 1; i < g.n_points - 1; ++i) {
        double d = f.at(g, i) - ref(g.x_at(i), t).u;
        sum += d * d;
    }
    return std::sqrt(g.h * sum);
}

/// Time series of error norms with per-step stability verdicts.
struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> l2;
    std::vector<MonitorRecord> flags;

    double max_l2() const {
        double m = 0;
        for (double v : l2) m = std::max(m, v);
        return m;
    }
    double max_l2_until(double t_max) const {
        double m = 0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] <= t_max + 1e-12) m = std::max(m, l2[i]);
        return m;
    }
};

struct Snapshot {
    int id = 0;
    double requested_time = 0;
    double time = 0;
    std::vector<double> x, u_num, u_exact;
};

struct InstabilityInfo {
    int index = 0;
    double time = 0;
    std::string message;
};

struct RunResult {
    SchemeName scheme;
    ResolvedSteps steps;
    ErrorSeries series;
    std::vector<Snapshot> snapshots;
    std::optional<InstabilityInfo> instability;
};

/// Run one scheme from t = 0 to t_final, recording the error norm each step
/// and snapshots at the requested times. Deterministic: same config, same
/// bytes. An instability aborts with the partial series flagged.
inline RunResult run_single(SchemeName scheme, const RunConfig& cfg,
                            const ResolvedSteps& rs) {
    Grid1D grid(RunConfig::x_min, rs.h, cfg.nx);
    ReferenceSolution ref = make_reference(cfg, rs.nu);
    CSpec cspec = cfg.c_kappa == 0 ? CSpec::zero() : CSpec::family(cfg.c_kappa);
    StepParams params(rs.tau, rs.nu, cspec);

    RunResult result;
    result.scheme = scheme;
    result.steps = rs;

    ProblemSetup setup(ref, cfg.frame, cfg.t_final);
    auto [f, bc] = build_problem(setup, grid);

    StabilityParams base = StabilityParams::from_run(rs.a, rs.nu, rs.h, rs.tau);
    RunMonitor monitor(scheme, base);

    const bool omega_relevant =
        scheme == SchemeName::Invariant || scheme == SchemeName::HighOrder;
    StepParams omega_params = params;
    if (scheme == SchemeName::HighOrder) omega_params.cspec = CSpec::zero();
    auto field_max = [&grid](const Field& w) {
        double m = 0;
        for (int i = 0; i < grid.n_points; ++i) m = std::max(m, std::abs(w.at(grid, i)));
        return m;
    };

    result.series.times.push_back(0.0);
    result.series.l2.push_back(l2_error(f, ref, 0.0, grid));
    result.series.flags.push_back(monitor.observe(
        0, 0.0, omega_relevant ? max_abs_omega_tau(f, omega_params, grid) : 0.0,
        field_max(f)));

    std::vector<bool> snapped(cfg.snapshot_times.size(), false);
    auto maybe_snapshot = [&](const Field& field, double t) {
        for (std::size_t k = 0; k < cfg.snapshot_times.size(); ++k) {
            if (snapped[k] || t + 1e-12 < cfg.snapshot_times[k]) continue;
            snapped[k] = true;
            Snapshot snap;
            snap.id = static_cast<int>(k);
            snap.requested_time = cfg.snapshot_times[k];
            snap.time = t;
            for (int i = 0; i < grid.n_points; ++i) {
                snap.x.push_back(grid.x_at(i));
                snap.u_num.push_back(field.at(grid, i));
                snap.u_exact.push_back(ref(grid.x_at(i), t).u);
            }
            result.snapshots.push_back(std::move(snap));
        }
    };
    maybe_snapshot(f, 0.0);

    for (int n = 1; n <= rs.n_steps; ++n) {
        try {
            f = step(scheme, f, params, grid, bc);
        } catch (const InstabilityError& ex) {
            result.instability = InstabilityInfo{ex.index, ex.time, ex.what()};
            break;
        }
        double t = n * rs.tau;
        f.time = t;
        result.series.times.push_back(t);
        result.series.l2.push_back(l2_error(f, ref, t, grid));
        result.series.flags.push_back(monitor.observe(
            n, t, omega_relevant ? max_abs_omega_tau(f, omega_params, grid) : 0.0,
            field_max(f)));
        maybe_snapshot(f, t);
    }
    return result;
}

inline std::vector<RunResult> run_experiment(const RunConfig& cfg) {
    ResolvedSteps rs = resolve_steps(cfg);
    std::vector<RunResult> results;
    for (SchemeName s : cfg.schemes) results.push_back(run_single(s, cfg, rs));
    return results;
}

// ---------------------------------------------------------------------------
// Frame comparison

struct FrameComparisonRow {
    SchemeName scheme;
    double max_l2_f1 = 0;
    double max_l2_f2 = 0;
    double rho = 0;  // max_t l2_F2 / max_t l2_F1 over [0, t_window]
};

/// Frame-sensitivity ratio rho = max_t l2_F2 / max_t l2_F1 over [0, t_window].
inline double frame_sensitivity_ratio(const ErrorSeries& f1, const ErrorSeries& f2,
                                      double t_window) {
    double m1 = f1.max_l2_until(t_window);
    double m2 = f2.max_l2_until(t_window);
    return m1 > 0 ? m2 / m1 : std::numeric_limits<double>::infinity();
}

/// Run the comparison set in the lab frame and in cfg.frame with identical
/// (h, tau, nu) resolved from the lab frame, isolating frame effects.
inline std::vector<FrameComparisonRow> frame_compare(const RunConfig& cfg,
                                                     double t_window) {
    RunConfig f1 = cfg;
    f1.frame = FrameTransform::identity();
    ResolvedSteps rs = resolve_steps(f1);
    RunConfig f2 = cfg;

    std::vector<FrameComparisonRow> rows;
    for (SchemeName s : cfg.schemes) {
        RunResult r1 = run_single(s, f1, rs);
        RunResult r2 = run_single(s, f2, rs);
        FrameComparisonRow row;
        row.scheme = s;
        row.max_l2_f1 = r1.series.max_l2_until(t_window);
        row.max_l2_f2 = r2.series.max_l2_until(t_window);
        row.rho = frame_sensitivity_ratio(r1.series, r2.series, t_window);
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Convergence studies

struct ConvergenceRow {
    double h = 0, tau = 0, error = 0;
    double observed_order = std::nan("");  // vs previous row
    bool flagged = false;                  // error increased
};

struct ConvergenceStudy {
    SchemeName scheme;
    std::string probe;  // "spatial" | "temporal"
    std::vector<ConvergenceRow> rows;
    double final_order = std::nan("");  // headline order estimate
    std::string estimator;              // "pairwise" | "three_point"
    std::string reference_label;
};

namespace detail {

struct ProbeTemplate {
    double nu = 0.5;
    double t_final = 1.0;
    int base_nx = 101;
    int levels = 4;
    double cfl = 0.25;      // temporal probes: tau = cfl h / a
    double s_tilde = 0.5;   // spatial probes: tau = s_tilde h^2
    bool anchored = false;  // freeze Omega at the base level (invariant probe)
    bool fixed_grid = false;  // hold h, halve tau (explicit high-order temporal probe)
};

inline ProbeTemplate probe_template(SchemeName scheme, const std::string& probe) {
    ProbeTemplate t;
    if (probe == "spatial") {
        t.s_tilde = scheme == SchemeName::HighOrder ? 0.4 : 0.5;
        return t;
    }
    if (probe != "temporal") throw ConfigError("convergence: probe must be spatial|temporal");
    switch (scheme) {
        case SchemeName::Ftcs:
        case SchemeName::LaxWendroff:
            t.cfl = 0.25;
            break;
        case SchemeName::CrankNicolson:
            t.cfl = 0.6;
            break;
        case SchemeName::HighOrder:
            // explicit scheme with fourth-order viscosity: the diffusive
            // stability bound caps tau ~ h^2/nu, so halving h cannot expose
            // the tau^2 component; hold the grid and halve tau instead,
            // with the three-point estimator removing the spatial floor.
            t.fixed_grid = true;
            t.base_nx = 401;
            t.levels = 3;
            t.cfl = 0.6;
            break;
        case SchemeName::Invariant:
            t.cfl = 0.1;
            t.levels = 5;
            t.anchored = true;
            break;
    }
    return t;
}

}  // namespace detail

/// Refinement study per scheme/probe. Spatial probes halve h with
/// tau = s_tilde h^2; temporal probes halve h with tau = cfl h / a, except the
/// fixed-grid variant which halves tau on a frozen grid. Falls back to the
/// manufactured solution when the exact-solution residual audit fails.
inline ConvergenceStudy convergence_study(SchemeName scheme, const std::string& probe,
                                          std::optional<int> levels_override = std::nullopt,
                                          bool anchor_omega = true) {
    detail::ProbeTemplate tpl = detail::probe_template(scheme, probe);
    if (levels_override) tpl.levels = *levels_override;
    if (tpl.levels < 3) throw ConfigError("convergence: need at least 3 levels");

    ReferenceSolution ref = closed_form_solution(tpl.nu);
    if (burgers_residual_audit(ref, 200) > 1e-8) ref = manufactured_solution(tpl.nu);

    ConvergenceStudy study;
    study.scheme = scheme;
    study.probe = probe;
    study.estimator = tpl.fixed_grid ? "three_point" : "pairwise";
    study.reference_label = ref.label;

    BoundaryProvider bc = [&ref](double x, double t) { return ref(x, t).u; };
    std::optional<std::pair<double, double>> anchor;

    for (int level = 0; level < tpl.levels; ++level) {
        int nx = tpl.fixed_grid ? tpl.base_nx : (tpl.base_nx - 1) * (1 << level) + 1;
        double h = (RunConfig::x_max - RunConfig::x_min) / (nx - 1);
        Grid1D grid(RunConfig::x_min, h, nx);
        double a = detail::initial_speed(ref, grid);
        double tau_raw;
        if (probe == "spatial") tau_raw = tpl.s_tilde * h * h;
        else if (tpl.fixed_grid) tau_raw = tpl.cfl * h / a / (1 << level);
        else tau_raw = tpl.cfl * h / a;
        int n_steps = static_cast<int>(std::ceil(tpl.t_final / tau_raw - 1e-12));
        double tau = tpl.t_final / n_steps;

        CSpec cspec =
            scheme == SchemeName::Invariant ? CSpec::family(-0.01) : CSpec::zero();
        if (tpl.anchored && anchor_omega) {
            if (level == 0) anchor = {h, tau};
            cspec.anchor = anchor;
        }
        StepParams params(tau, tpl.nu, cspec);
        if (ref.source) params.source = ref.source;

        Field f(grid, 0.0);
        for (int i = -grid.ghost_depth; i < grid.n_points + grid.ghost_depth; ++i)
            f.at(grid, i) = ref(grid.x_at(i), 0.0).u;

        ConvergenceRow row;
        row.h = h;
        row.tau = tau;
        bool ok = true;
        for (int n = 1; n <= n_steps && ok; ++n) {
            try {
                f = step(scheme, f, params, grid, bc);
            } catch (const InstabilityError&) {
                ok = false;
            }
            f.time = n * tau;
        }
        row.error = ok ? l2_error(f, ref, tpl.t_final, grid)
                       : std::numeric_limits<double>::infinity();
        if (!study.rows.empty()) {
            double prev = study.rows.back().error;
            row.observed_order = std::log2(prev / row.error);
            row.flagged = row.error >= prev;
        }
        study.rows.push_back(row);
    }

    if (tpl.fixed_grid && study.rows.size() >= 3) {
        // successive differences cancel the fixed spatial floor
        auto e = study.rows;
        double d1 = e[e.size() - 3].error - e[e.size() - 2].error;
        double d2 = e[e.size() - 2].error - e[e.size() - 1].error;
        study.final_order = std::log2(d1 / d2);
    } else {
        study.final_order = study.rows.back().observed_order;
    }
    return study;
}

// ---------------------------------------------------------------------------
// Output emission

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Minimal deterministic SVG line plot: axes, ticks, one polyline per series.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(std::string label, const std::vector<double>& x,
                    const std::vector<double>& y) {
        series_.push_back({std::move(label), x, y});
    }

    std::string render() const {
        const double W = 720, H = 480, L = 70, R = 170, T = 40, B = 50;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.y[i])) continue;
                xmin = std::min(xmin, s.x[i]); xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]); ymax = std::max(ymax, s.y[i]);
            }
        if (xmin > xmax) { xmin = 0; xmax = 1; }
        if (ymin > ymax) { ymin = 0; ymax = 1; }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
        auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
        auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

        static const char* colors[] = {"#1b6ca8", "#c23b22", "#2e7d32",
                                       "#7b1fa2", "#ef6c00", "#455a64"};
        std::ostringstream out;
        char buf[128];
        auto f2 = [&](double v) {
            std::snprintf(buf, sizeof(buf), "%.2f", v);
            return std::string(buf);
        };
        auto tick = [&](double v) {
            std::snprintf(buf, sizeof(buf), "%.6g", v);
            return std::string(buf);
        };
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
            << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
        out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
        out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";
        // axes
        out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
            << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
            << H - B << "\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 5; ++k) {
            double xv = xmin + (xmax - xmin) * k / 5, xp = px(xv);
            double yv = ymin + (ymax - ymin) * k / 5, yp = py(yv);
            out << "<line x1=\"" << f2(xp) << "\" y1=\"" << H - B << "\" x2=\"" << f2(xp)
                << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << f2(xp) << "\" y=\"" << H - B + 20
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << tick(xv) << "</text>\n";
            out << "<line x1=\"" << L - 5 << "\" y1=\"" << f2(yp) << "\" x2=\"" << L
                << "\" y2=\"" << f2(yp) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << L - 8 << "\" y=\"" << f2(yp + 4)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                << tick(yv) << "</text>\n";
        }
        out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << xlabel_ << "</text>\n";
        out << "<text x=\"18\" y=\"" << (T + H - B) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 18 " << (T + H - B) / 2 << ")\">" << ylabel_
            << "</text>\n";
        for (std::size_t s = 0; s < series_.size(); ++s) {
            const auto& sr = series_[s];
            const char* color = colors[s % 6];
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < sr.x.size(); ++i) {
                if (!std::isfinite(sr.y[i])) continue;
                out << f2(px(sr.x[i])) << "," << f2(py(sr.y[i])) << " ";
            }
            out << "\"/>\n";
            double ly = T + 18 + 18 * static_cast<double>(s);
            out << "<line x1=\"" << W - R + 12 << "\" y1=\"" << f2(ly - 4) << "\" x2=\""
                << W - R + 36 << "\" y2=\"" << f2(ly - 4) << "\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
            out << "<text x=\"" << W - R + 42 << "\" y=\"" << f2(ly)
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << sr.label
                << "</text>\n";
        }
        out << "</svg>\n";
        return out.str();
    }

private:
    struct Series {
        std::string label;
        std::vector<double> x, y;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
};

}  // namespace detail

/// Write error.csv, snapshot CSVs, the resolved-parameter header, the config
/// echo, and the SVG plots into cfg.output_dir. Byte-stable for equal configs.
inline void emit_outputs(const std::vector<RunResult>& results, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    detail::write_file(dir / "config_resolved.cfg", config_echo(cfg));

    const bool comparison = results.size() > 1;
    for (const auto& r : results) {
        std::string suffix = comparison ? "_" + scheme_id(r.scheme) : "";
        std::ostringstream csv;
        csv << "t,l2\n";
        for (std::size_t i = 0; i < r.series.times.size(); ++i)
            csv << detail::fmt17(r.series.times[i]) << "," << detail::fmt17(r.series.l2[i])
                << "\n";
        detail::write_file(dir / ("error" + suffix + ".csv"), csv.str());

        for (const auto& snap : r.snapshots) {
            std::ostringstream s;
            s << "x,u_num,u_exact\n";
            for (std::size_t i = 0; i < snap.x.size(); ++i)
                s << detail::fmt17(snap.x[i]) << "," << detail::fmt17(snap.u_num[i]) << ","
                  << detail::fmt17(snap.u_exact[i]) << "\n";
            detail::write_file(dir / ("snapshot_t" + std::to_string(snap.id) + suffix + ".csv"),
                               s.str());
        }
    }

    // resolved-parameter header (shared across the comparison set)
    {
        const ResolvedSteps& rs = results.front().steps;
        std::ostringstream j;
        j << "{\n";
        j << "  \"schemes\": [";
        for (std::size_t i = 0; i < results.size(); ++i)
            j << (i ? ", " : "") << "\"" << scheme_id(results[i].scheme) << "\"";
        j << "],\n";
        j << "  \"frame\": \"" << cfg.frame.str() << "\",\n";
        j << "  \"nx\": " << cfg.nx << ",\n";
        j << "  \"h\": " << detail::fmt17(rs.h) << ",\n";
        j << "  \"tau\": " << detail::fmt17(rs.tau) << ",\n";
        j << "  \"nu\": " << detail::fmt17(rs.nu) << ",\n";
        j << "  \"a\": " << detail::fmt17(rs.a) << ",\n";
        j << "  \"n_steps\": " << rs.n_steps << ",\n";
        j << "  \"cfl\": " << detail::fmt17(cfg.cfl) << ",\n";
        j << "  \"c_kappa\": " << detail::fmt17(cfg.c_kappa) << ",\n";
        j << "  \"t_final\": " << detail::fmt17(cfg.t_final) << ",\n";
        bool any_instability = false;
        for (const auto& r : results) any_instability |= r.instability.has_value();
        j << "  \"instability\": " << (any_instability ? "true" : "false") << "\n";
        j << "}\n";
        detail::write_file(dir / "run.json", j.str());
    }

    // error plot (one polyline per scheme)
    {
        detail::SvgPlot plot("error L2 norm, frame " + cfg.frame.str(), "t", "l2 error");
        for (const auto& r : results)
            plot.add_series(scheme_id(r.scheme), r.series.times, r.series.l2);
        detail::write_file(dir / "error.svg", plot.render());
    }
    // snapshot plot at the first snapshot time, if any
    if (!results.front().snapshots.empty()) {
        const auto& first = results.front().snapshots.front();
        detail::SvgPlot plot("solution at t = " + std::to_string(first.time).substr(0, 6),
                             "x", "u");
        plot.add_series("exact", first.x, first.u_exact);
        for (const auto& r : results)
            if (!r.snapshots.empty())
                plot.add_series(scheme_id(r.scheme), r.snapshots.front().x,
                                r.snapshots.front().u_num);
        detail::write_file(dir / "snapshot.svg", plot.render());
    }
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepEntry {
    std::string path;
    bool ok = false;
    std::string message;
};

/// Run every *.cfg in the directory, one worker per config, no shared state.
inline std::vector<SweepEntry> sweep(const std::string& config_dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(config_dir))
        if (entry.path().extension() == ".cfg") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());

    std::vector<std::future<SweepEntry>> futures;
    for (const auto& path : paths) {
        futures.push_back(std::async(std::launch::async, [path]() {
            SweepEntry e{path, false, ""};
            try {
                std::ifstream in(path);
                std::stringstream ss;
                ss << in.rdbuf();
                RunConfig cfg = parse_config(ss.str());
                auto results = run_experiment(cfg);
                emit_outputs(results, cfg);
                for (const auto& r : results)
                    if (r.instability) {
                        e.message = "instability: " + r.instability->message;
                        return e;
                    }
                e.ok = true;
            } catch (const std::exception& ex) {
                e.message = ex.what();
            }
            return e;
        }));
    }
    std::vector<SweepEntry> out;
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

}  // namespace invfd
