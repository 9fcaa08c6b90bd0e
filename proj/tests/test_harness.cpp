#include "invfd/harness.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace invfd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("invfd_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing accepts the reference example") {
    RunConfig cfg = parse_config(
        "scheme=invariant\nre_h=2\ncfl=0.04\nnx=201\nt_final=20\nframe=galilean:1\n");
    REQUIRE(cfg.schemes.size() == 1);
    CHECK(cfg.schemes[0] == SchemeName::Invariant);
    CHECK(cfg.re_h == 2.0);
    CHECK(cfg.cfl == 0.04);
    CHECK(cfg.nx == 201);
    CHECK(cfg.frame.kind == FrameTransform::Kind::Galilean);
    CHECK(cfg.snapshot_times == std::vector<double>{5.0});
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_WITH(parse_config("scheme=ftcs\nnu=0.5\ncfl=0\n"),
                      Catch::Matchers::ContainsSubstring("cfl must be positive"));
    CHECK_THROWS_WITH(parse_config("scheme=ftcs\nnu=0.05\nre_h=2\n"),
                      Catch::Matchers::ContainsSubstring("both present"));
    CHECK_THROWS_WITH(parse_config("scheme=ftcs\nnu=0.5\nbogus=1\n"),
                      Catch::Matchers::ContainsSubstring("line 3"));
    CHECK_THROWS_WITH(parse_config("scheme=ftcs\nnu=abc\n"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_config("nu=0.5\n"),
                      Catch::Matchers::ContainsSubstring("scheme"));
    // comments and blank lines are fine
    CHECK_NOTHROW(parse_config("# a comment\n\nscheme = ftcs # trailing\nnu = 0.5\n"));
}

TEST_CASE("resolve_steps") {
    RunConfig cfg = parse_config("scheme=ftcs\nnu=0.5\nnx=201\ncfl=0.04\nt_final=1\n");
    ResolvedSteps rs = resolve_steps(cfg);
    CHECK(rs.h == 0.2);  // 40/200 exactly
    CHECK(rs.nu == 0.5);
    CHECK(rs.a > 2.0);
    // tau is the largest step <= cfl h / a that divides t_final
    CHECK(rs.tau <= cfg.cfl * rs.h / rs.a + 1e-15);
    CHECK(rs.n_steps * rs.tau == Catch::Approx(1.0).epsilon(1e-15));

    RunConfig cfg2 = parse_config("scheme=ftcs\nre_h=2\nnx=201\ncfl=0.04\nt_final=1\n");
    ResolvedSteps rs2 = resolve_steps(cfg2);
    CHECK(std::abs(rs2.a * rs2.h / rs2.nu - 2.0) <= 1e-8);
}

TEST_CASE("l2 error metric") {
    Grid1D g(0, 0.2, 201);
    ReferenceSolution ref = closed_form_solution(0.5);
    Field f(g, 0.0);
    for (int i = -g.ghost_depth; i < g.n_points + g.ghost_depth; ++i)
        f.at(g, i) = ref(g.x_at(i), 0.0).u;
    CHECK(l2_error(f, ref, 0.0, g) == 0.0);

    Field off = f;
    off.at(g, 57) += 1.0;
    CHECK(l2_error(off, ref, 0.0, g) == Catch::Approx(std::sqrt(0.2)).epsilon(1e-14));

    // independent naive re-summation oracle on pseudo-random data
    Field noisy = f;
    std::uint64_t s = 99;
    for (int i = 0; i < g.n_points; ++i) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        noisy.at(g, i) += static_cast<double>(s >> 40) / (1 << 24);
    }
    double direct = l2_error(noisy, ref, 0.0, g);
    double acc = 0;
    for (int i = 1; i < g.n_points - 1; ++i) {
        double d = noisy.at(g, i) - ref(g.x_at(i), 0.0).u;
        acc += d * d;
    }
    CHECK(direct == Catch::Approx(std::sqrt(0.2 * acc)).epsilon(1e-14));
}

TEST_CASE("runs are deterministic and CSVs round-trip") {
    fs::path dir = temp_dir("det");
    RunConfig cfg = parse_config("scheme=ftcs\nnu=0.5\nnx=101\ncfl=0.2\nt_final=0.5\n"
                                 "output_dir=" + (dir / "a").string() + "\n");
    auto r1 = run_experiment(cfg);
    emit_outputs(r1, cfg);
    RunConfig cfg2 = cfg;
    cfg2.output_dir = (dir / "b").string();
    auto r2 = run_experiment(cfg2);
    emit_outputs(r2, cfg2);
    CHECK(slurp(dir / "a" / "error.csv") == slurp(dir / "b" / "error.csv"));
    CHECK(slurp(dir / "a" / "error.svg") == slurp(dir / "b" / "error.svg"));
    CHECK(slurp(dir / "a" / "run.json") == slurp(dir / "b" / "run.json"));

    // 17-significant-digit round trip
    std::istringstream csv(slurp(dir / "a" / "error.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,l2");
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(std::stod(line.substr(0, comma)) == r1[0].series.times[row]);
        CHECK(std::stod(line.substr(comma + 1)) == r1[0].series.l2[row]);
        ++row;
    }
    CHECK(row == r1[0].series.times.size());
}

TEST_CASE("zero-duration run gives a single zero sample") {
    RunConfig cfg = parse_config("scheme=ftcs\nnu=0.5\nnx=101\ncfl=0.2\nt_final=0\n");
    auto rs = run_experiment(cfg);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].series.times == std::vector<double>{0.0});
    CHECK(rs[0].series.l2 == std::vector<double>{0.0});
}

TEST_CASE("empty snapshot list emits only the error outputs") {
    fs::path dir = temp_dir("nosnap");
    RunConfig cfg = parse_config("scheme=ftcs\nnu=0.5\nnx=101\ncfl=0.2\nt_final=0.2\n"
                                 "output_dir=" + (dir / "o").string() + "\n");
    cfg.snapshot_times.clear();
    emit_outputs(run_experiment(cfg), cfg);
    CHECK(fs::exists(dir / "o" / "error.csv"));
    CHECK(fs::exists(dir / "o" / "error.svg"));
    CHECK_FALSE(fs::exists(dir / "o" / "snapshot_t0.csv"));
    CHECK_FALSE(fs::exists(dir / "o" / "snapshot.svg"));
}

TEST_CASE("comparison mode emits one polyline per scheme") {
    fs::path dir = temp_dir("cmp");
    RunConfig cfg = parse_config("scheme=ftcs,invariant\nnu=0.5\nnx=101\ncfl=0.2\n"
                                 "t_final=0.2\nsnapshot_times=0.1\n"
                                 "output_dir=" + (dir / "o").string() + "\n");
    emit_outputs(run_experiment(cfg), cfg);
    CHECK(fs::exists(dir / "o" / "error_ftcs.csv"));
    CHECK(fs::exists(dir / "o" / "error_invariant.csv"));
    std::string svg = slurp(dir / "o" / "error.svg");
    CHECK(svg.find(">ftcs<") != std::string::npos);
    CHECK(svg.find(">invariant<") != std::string::npos);
}

TEST_CASE("instability aborts with a flagged partial series") {
    RunConfig cfg = parse_config("scheme=ftcs\nnu=0.5\nnx=401\ncfl=6\nt_final=2\n");
    auto rs = run_experiment(cfg);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].instability.has_value());
    CHECK(rs[0].series.times.size() < static_cast<std::size_t>(rs[0].steps.n_steps));
    // the monitor verdict on this configuration is unstable from the start,
    // and the records pinpoint where the field norm first doubles
    CHECK(rs[0].series.flags.front().verdict == Verdict::Unstable);
    double initial = rs[0].series.flags.front().field_max;
    std::size_t doubled = 0;
    while (doubled < rs[0].series.flags.size() &&
           rs[0].series.flags[doubled].field_max < 2 * initial)
        ++doubled;
    CHECK(doubled > 0);
    CHECK(doubled < rs[0].series.flags.size());
}

TEST_CASE("reference configuration satisfies the invariant-scheme conditions") {
    // Re_h = 2, CFL = 0.04: every recorded step passes the von Neumann checks
    RunConfig cfg = parse_config(
        "scheme=invariant\nre_h=2\ncfl=0.04\nnx=201\nt_final=1\n");
    auto rs = run_experiment(cfg);
    REQUIRE(rs.size() == 1);
    REQUIRE_FALSE(rs[0].instability.has_value());
    for (const auto& rec : rs[0].series.flags) {
        CHECK(rec.verdict == Verdict::Stable);
        CHECK(rec.max_abs_omega_tau < 0.05);
    }
}

TEST_CASE("build_problem samples the frame's own reference") {
    RunConfig cfg = parse_config("scheme=invariant\nnu=0.5\nnx=201\ncfl=0.04\nt_final=1\n");
    Grid1D grid(0.0, 0.2, 201);

    ReferenceSolution f1 = make_reference(cfg, 0.5);
    auto [field1, bc1] = build_problem(ProblemSetup(f1, cfg.frame, 1.0), grid);
    CHECK(field1.at(grid, 0) == exact_eval(0.0, 0.0, 0.5).u);
    CHECK(bc1(40.0, 0.7) == exact_eval(40.0, 0.7, 0.5).u);

    RunConfig cfg2 = cfg;
    cfg2.frame = FrameTransform::parse("galilean:1");
    ReferenceSolution f2 = make_reference(cfg2, 0.5);
    auto [field2, bc2] = build_problem(ProblemSetup(f2, cfg2.frame, 1.0), grid);
    // at t = 0 the Galilean frame shifts nothing in x and adds 1 to u
    for (int i : {0, 57, 200})
        CHECK(field2.at(grid, i) == Catch::Approx(field1.at(grid, i) + 1.0).epsilon(1e-14));

    Grid1D wrong(1.0, 0.2, 201);
    CHECK_THROWS_AS(build_problem(ProblemSetup(f1, cfg.frame, 1.0), wrong),
                    std::invalid_argument);
}

TEST_CASE("frame sensitivity ratio is a pure function of the two series") {
    ErrorSeries a, b;
    a.times = {0, 1, 2};
    a.l2 = {0, 0.2, 0.1};
    b.times = {0, 1, 2};
    b.l2 = {0, 0.3, 0.5};
    CHECK(frame_sensitivity_ratio(a, b, 2.0) == Catch::Approx(0.5 / 0.2));
    CHECK(frame_sensitivity_ratio(a, b, 1.0) == Catch::Approx(0.3 / 0.2));
}

TEST_CASE("sweep runs every config in the directory") {
    fs::path dir = temp_dir("sweep");
    fs::path out = dir / "out";
    for (const char* scheme : {"ftcs", "high_order"}) {
        std::ofstream cfg(dir / (std::string(scheme) + ".cfg"));
        cfg << "scheme=" << scheme << "\nnu=0.5\nnx=101\ncfl=0.2\nt_final=0.1\n"
            << "output_dir=" << (out / scheme).string() << "\n";
    }
    auto entries = sweep(dir.string());
    REQUIRE(entries.size() == 2);
    for (const auto& e : entries) {
        INFO(e.path << ": " << e.message);
        CHECK(e.ok);
    }
    CHECK(fs::exists(out / "ftcs" / "error.csv"));
    CHECK(fs::exists(out / "high_order" / "run.json"));

    // a broken member is reported without sinking the others
    {
        std::ofstream bad(dir / "broken.cfg");
        bad << "scheme=ftcs\nnu=0\n";
    }
    auto with_bad = sweep(dir.string());
    REQUIRE(with_bad.size() == 3);
    int ok_count = 0, bad_count = 0;
    for (const auto& e : with_bad) {
        ok_count += e.ok;
        if (!e.ok) {
            ++bad_count;
            CHECK(e.message.find("nu must be positive") != std::string::npos);
        }
    }
    CHECK(ok_count == 2);
    CHECK(bad_count == 1);
}

TEST_CASE("convergence study output shape") {
    ConvergenceStudy st = convergence_study(SchemeName::Ftcs, "spatial", 3);
    REQUIRE(st.rows.size() == 3);
    CHECK(st.rows[1].h == Catch::Approx(st.rows[0].h / 2));
    // tau targets h^2-scaling, then shrinks to divide t_final exactly
    CHECK(st.rows[1].tau == Catch::Approx(st.rows[0].tau / 4).epsilon(0.1));
    CHECK(std::isfinite(st.final_order));
    CHECK(st.reference_label == "closed_form");
    CHECK_THROWS_AS(convergence_study(SchemeName::Ftcs, "spatial", 2), ConfigError);
    CHECK_THROWS_AS(convergence_study(SchemeName::Ftcs, "sideways"), ConfigError);
}
