#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rch/inflation_lab.hpp"
#include "rch/report_io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

using namespace rch;

namespace {
InflationConfig tiny_config() {
    // Truncated horizon: exercises the full pipeline in well under a second
    // per N without waiting for the physical time scale.
    InflationConfig cfg;
    cfg.n_list = {6};
    cfg.samples = 8;
    cfg.time_horizon_factor = 0.05;
    cfg.d_check_stride = 2;
    return cfg;
}
}  // namespace

TEST_CASE("initial datum: spectral support and magnitude") {
    for (int N : {6, 7}) {
        TorusGrid grid(1 << (N + 8));
        Field u0 = build_initial_data(N, grid);

        // mass outside the carrier window
        const int carrier = 1 << (N + 5);
        const int w = 1 << (N + 1);
        real inside = 0, total = 0;
        for (int k = 1; k < grid.nyquist(); ++k) {
            const real m2 = std::norm(u0.spectrum()[k]);
            total += m2;
            if (k >= carrier - w && k <= carrier + w) inside += m2;
        }
        CHECK((total - inside) / total <= 1e-10);

        // ||u0_x||_inf is order N^{-1/10}
        const real uxmax = differentiate(u0).max_abs();
        const real scale = std::pow(real(N), -0.1);
        CHECK(uxmax >= 0.2 * scale);
        CHECK(uxmax <= 2.0 * scale);

        // u0 itself is tiny: the Helmholtz inverse divides by the carrier
        CHECK(u0.max_abs() <= 4.0 * scale / carrier);
    }
}

TEST_CASE("initial datum is bitwise deterministic") {
    TorusGrid grid(1 << 14);
    Field a = build_initial_data(6, grid);
    Field b = build_initial_data(6, grid);
    CHECK(std::memcmp(a.values().data(), b.values().data(),
                      a.values().size() * sizeof(real)) == 0);
}

TEST_CASE("grid rule violations are configuration errors") {
    TorusGrid small(1 << 10);
    CHECK_THROWS_AS(build_initial_data(6, small), ConfigError);
}

TEST_CASE("commutator diagnostic") {
    TorusGrid g(256);
    auto bank = build_filter_bank(g);

    Field c = Field::sample(g, [](real) { return 1.7; });
    auto dc = commutator_diag(c, bank);
    CHECK(dc.sum == 0.0);
    CHECK(dc.sum_2j == 0.0);
    CHECK(dc.sup_j == 0.0);

    // cos(11x): R_j = -(11/2) (phi_j(22) - phi_j(11)) sin(22x), so
    // ||R_j||_inf = (11/2) |phi_j(22) - phi_j(11)| -- an independent
    // evaluation order through the bank's sampled cutoffs.
    Field u = Field::sample(g, [](real x) { return std::cos(11 * x); });
    auto du = commutator_diag(u, bank);
    for (int j = -1; j <= bank.j_max; ++j) {
        const rvec& cut = bank.cutoff(j);
        const real expected = 5.5 * std::abs(cut[22] - cut[11]);
        CHECK(std::abs(du.rj_sup[j + 1] - expected) <= 1e-10);
    }
    CHECK(du.ratio_sum_2j > 0.0);
}

TEST_CASE("slope fit behavior") {
    // exact power law recovered exactly
    std::vector<real> x, y;
    for (int N : {6, 7, 8, 9, 10, 11}) {
        x.push_back(std::log2(real(N)));
        y.push_back(std::log2(std::pow(real(N), -0.37)));
    }
    SlopeFit f = fit_line(x, y);
    CHECK(f.defined);
    CHECK(f.slope == doctest::Approx(-0.37).epsilon(1e-12));
    CHECK(f.residual_rms <= 1e-12);

    // rescaling the data by N^{-s} shifts the slope by exactly -s
    std::vector<real> y2 = y;
    for (size_t i = 0; i < y2.size(); ++i) y2[i] += x[i] * (-0.25) * 1.0;
    SlopeFit f2 = fit_line(x, y2);
    CHECK(f2.slope - f.slope == doctest::Approx(-0.25).epsilon(1e-10));

    // degenerate fits are undefined, not a crash
    CHECK(!fit_line(std::vector<real>{1.0}, std::vector<real>{2.0}).defined);
    CHECK(!fit_line(std::vector<real>{}, std::vector<real>{}).defined);
}

TEST_CASE("truncated single run populates the full report entry") {
    const auto cfg = tiny_config();
    RunEntry e = run_single(6, 1.0, cfg);
    CHECK(e.completed);
    CHECK(!e.blown_up);
    CHECK(e.n == (1 << 14));
    CHECK(e.series.size() >= 8);

    // t = 0 row equals the u0 table
    CHECK(e.series[0].t == 0.0);
    CHECK(e.series[0].norm_b1 == doctest::Approx(e.u0_b1).epsilon(1e-14));
    CHECK(e.series[0].norm_c01 == doctest::Approx(e.u0_c01).epsilon(1e-12));

    // sanity of the t = 0 diagnostics
    CHECK(e.u0_b1 > 0.5);
    CHECK(e.u0_b1 < 2.0);
    CHECK(e.e0_b1 > 0.0);
    CHECK(e.u0_offband_mass <= 1e-10);
    CHECK(e.e0_equiv_ratio > 0.0);

    // mechanism checks exist and the forced inequality held
    CHECK(!e.mechanism.empty());
    CHECK(e.mechanism_ok);
    for (const auto& mc : e.mechanism) CHECK(mc.forced_inequality_ok);

    // over a tiny horizon the flow barely moves
    CHECK(e.yxi_min > 0.9);
    CHECK(e.yxi_max < 1.1);
    CHECK(e.window_ok);
    CHECK(e.peak_ratio >= 1.0);
}

TEST_CASE("run_single is deterministic") {
    const auto cfg = tiny_config();
    InflationReport a, b;
    a.config = cfg;
    b.config = cfg;
    a.runs.push_back(run_single(6, 1.0, cfg));
    b.runs.push_back(run_single(6, 1.0, cfg));
    CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("sweep records per-run failures and continues") {
    InflationConfig cfg = tiny_config();
    cfg.grid_offset = 6;  // alias-free condition fails for every N
    cfg.n_list = {6};
    InflationReport rep = run_sweep(cfg);
    REQUIRE(rep.runs.size() == 1);
    CHECK(!rep.runs[0].error.empty());
    CHECK(!rep.runs[0].completed);
    CHECK(!rep.trend_confirmed);
}

TEST_CASE("sweep fits and verdicts on a truncated two-point run") {
    InflationConfig cfg = tiny_config();
    cfg.n_list = {6, 7};
    InflationReport rep = run_sweep(cfg);
    REQUIRE(rep.runs.size() == 2);
    CHECK(rep.runs[0].completed);
    CHECK(rep.runs[1].completed);
    CHECK(rep.fit_u0_b1.defined);
    CHECK(rep.fit_u0_b1.slope < 0.0);  // the u0 norm decreases in N

    // single-N sweep: undefined fits, no crash
    cfg.n_list = {6};
    InflationReport one = run_sweep(cfg);
    CHECK(!one.fit_u0_b1.defined);
    CHECK(!one.trend_confirmed);
}

TEST_CASE("config validation") {
    InflationConfig cfg;
    cfg.n_list = {};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = InflationConfig{};
    cfg.omega = -2.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = InflationConfig{};
    cfg.dealias_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = InflationConfig{};
    cfg.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("report serialization round trip basics") {
    const auto cfg = tiny_config();
    InflationReport rep;
    rep.config = cfg;
    rep.runs.push_back(run_single(6, 0.0, cfg));

    const auto tmp = std::filesystem::temp_directory_path() / "rch_report_test.csv";
    write_report_csv(rep, tmp);
    std::ifstream in(tmp);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "N,t,norm_B1_inf1,norm_ux_B0_inf1,norm_ux_log,norm_C01,norm_E_B1,"
          "yxi_min,yxi_max,blowup_flag");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(rep.runs[0].series.size()));
    std::filesystem::remove(tmp);

    const std::string js = report_to_json(rep);
    CHECK(js.find("\"trend_confirmed\"") != std::string::npos);
    CHECK(js.find("\"mechanism\"") != std::string::npos);
}

TEST_CASE("field file round trip and validation") {
    TorusGrid g(64);
    Field u = Field::sample(g, [](real x) { return std::cos(3 * x) + 0.2; });
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "rch_field_test.csv";
    write_field_csv(u, path);
    Field back = read_field_csv(path);
    CHECK(back.size() == 64);
    CHECK((back - u).max_abs() <= 1e-15);

    // corrupt the sidecar
    {
        std::ofstream bad(path.string() + ".json");
        bad << "{ not json";
    }
    CHECK_THROWS_AS(read_field_csv(path), IoError);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
    CHECK_THROWS_AS(read_field_csv(path), IoError);
}
