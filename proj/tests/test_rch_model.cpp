#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rch/pde_solver.hpp"
#include "rch/rch_model.hpp"

#include "mpfr_coefficient_oracle.hpp"

#include <cmath>
#include <random>

using namespace rch;

namespace {
Field random_band_limited(const TorusGrid& grid, int klo, int khi, unsigned seed,
                          real amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<real> gauss(0.0, 1.0);
    cvec s(grid.size() / 2 + 1, cplx(0, 0));
    for (int k = klo; k <= khi; ++k) s[k] = amp * cplx(gauss(rng), gauss(rng));
    return Field::from_spectrum(grid, std::move(s));
}
}  // namespace

TEST_CASE("coefficients at zero rotation reduce to Camassa-Holm") {
    const auto m = compute_coefficients(0.0);
    CHECK(m.c == 1.0);
    CHECK(m.alpha == 0.5);
    CHECK(m.beta0 == 0.25);
    CHECK(m.beta == 5.0 / 12.0);
    CHECK(m.omega1 == 0.0);  // exact symbolic zero
    CHECK(m.omega2 == 0.0);
    CHECK(m.c2 == 0.0);
    CHECK(m.c3 == 0.0);
    CHECK(m.c1 == 1.0);
    CHECK(m.gamma == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(m.c0 == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(m.gamma_residual() <= 1e-12);
    CHECK(!m.has_quartic());
}

TEST_CASE("coefficients against the arbitrary-precision oracle") {
    for (real omega : {1.0, 0.3, 2.0, 5.0, 10.0}) {
        const auto m = compute_coefficients(omega);
        const auto o = rch::test_oracle::coefficients_mpfr(omega);
        auto close = [](real a, real b) {
            return std::abs(a - b) <= 1e-13 * std::max({1.0, std::abs(a), std::abs(b)});
        };
        CHECK(close(m.c, o.c));
        CHECK(close(m.alpha, o.alpha));
        CHECK(close(m.beta0, o.beta0));
        CHECK(close(m.beta, o.beta));
        CHECK(close(m.omega1, o.omega1));
        CHECK(close(m.omega2, o.omega2));
        CHECK(close(m.gamma, o.gamma));
        CHECK(close(m.c0, o.c0));
        CHECK(close(m.c1, o.c1));
        CHECK(close(m.c2, o.c2));
        CHECK(close(m.c3, o.c3));
    }
    CHECK(compute_coefficients(1.0).c ==
          doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("gamma root: residual and uniqueness across the physical range") {
    for (real omega = 0.0; omega <= 10.0; omega += 0.01) {
        const auto m = compute_coefficients(omega);
        CHECK(m.gamma_residual() <= 1e-12);
        // one real root throughout [0, 10]: the smallest-|.|-selection never
        // has to disambiguate
        CHECK(!m.multiple_real_roots);
    }
    CHECK_THROWS_AS(compute_coefficients(-1.0), ConfigError);
}

TEST_CASE("rhs basics") {
    TorusGrid g(128);
    const auto m0 = compute_coefficients(0.0);
    CHECK(rhs(Field::zero(g), m0).max_abs() == 0.0);

    Field c = Field::sample(g, [](real) { return 0.7; });
    CHECK(rhs(c, m0).max_abs() <= 1e-14);

    // small-amplitude: tendency is O(eps^2)
    real prev = -1;
    for (real eps : {0.1, 0.05, 0.025, 0.0125}) {
        Field u = Field::sample(g, [&](real x) { return eps * std::cos(x); });
        const real ratio = rhs(u, m0).max_abs() / (eps * eps);
        if (prev > 0) CHECK(std::abs(ratio - prev) <= 0.5 * prev);
        prev = ratio;
    }

    rvec v(g.size(), 0.0);
    v[3] = std::numeric_limits<real>::quiet_NaN();
    CHECK_THROWS_AS(rhs(Field::from_values(g, std::move(v)), m0), NumericError);
}

TEST_CASE("zero-rotation tendency equals the Camassa-Holm nonlocal form") {
    TorusGrid g(256);
    const auto m0 = compute_coefficients(0.0);
    Field u = random_band_limited(g, 1, 40, 17, 0.3);
    Field ux = differentiate(u);
    Field ch = differentiate(helmholtz_inverse(
                                 multiply_dealias(ux, ux).scaled(0.5) +
                                 multiply_dealias(u, u)))
                   .scaled(-1.0) -
               multiply_dealias(u, ux);
    const real scale = std::max(1.0, ch.max_abs());
    CHECK((rhs(u, m0) - ch).max_abs() <= 1e-13 * scale);
}

TEST_CASE("hot-path tendency matches the literal operator") {
    TorusGrid g(256);
    for (real omega : {0.0, 1.0}) {
        const auto m = compute_coefficients(omega);
        Field u = random_band_limited(g, 1, 60, 29, 0.4);
        Field reference = rhs(dealias(u), m);

        RhsWorkspace ws(g.size(), m, 2.0 / 3.0);
        cvec uhat(g.size() / 2 + 1, cplx(0, 0));
        const int kcut = dealias_cutoff(g.size(), 2.0 / 3.0);
        for (int k = 0; k <= kcut; ++k) uhat[k] = u.spectrum()[k];
        cvec out;
        real ux_max = 0, u_max = 0;
        ws.tendency(uhat, out, &ux_max, &u_max);
        Field fast = Field::from_spectrum(g, cvec(out));

        const real scale = std::max(1.0, reference.max_abs());
        CHECK((fast - reference).max_abs() <= 1e-12 * scale);
        CHECK(ux_max == doctest::Approx(differentiate(dealias(u)).max_abs()).epsilon(1e-12));
        CHECK(u_max == doctest::Approx(dealias(u).max_abs()).epsilon(1e-12));
    }
}

TEST_CASE("mean of the tendency is the mean of -u u_x") {
    TorusGrid g(256);
    const auto m = compute_coefficients(1.0);
    for (unsigned seed : {5u, 6u}) {
        Field u = random_band_limited(g, 1, 50, seed, 0.5);
        Field ud = dealias(u);
        Field ux = differentiate(ud);
        real adv_mean = 0;
        for (int i = 0; i < g.size(); ++i)
            adv_mean += ud.values()[i] * ux.values()[i];
        adv_mean /= g.size();
        CHECK(std::abs(rhs(u, m).mean() - (-adv_mean)) <= 1e-12);
    }
}

TEST_CASE("compute_E") {
    TorusGrid g(256);
    CHECK(compute_E(Field::zero(g)).max_abs() == 0.0);

    // u with u_x = cos(kx): E = (k/2) sin(2kx) / (1 + 4k^2)
    const int k = 5;
    Field u = Field::sample(g, [&](real x) { return std::sin(k * x) / k; });
    Field e = compute_E(u);
    real err = 0;
    for (int i = 0; i < g.size(); ++i) {
        const real x = g.point(i);
        err = std::max(err, std::abs(e.values()[i] -
                                     0.5 * k * std::sin(2 * k * x) / (1.0 + 4.0 * k * k)));
    }
    CHECK(err <= 1e-9);
}

TEST_CASE("E vs u_x^2 Besov comparability window") {
    TorusGrid g(512);
    auto bank = build_filter_bank(g);
    for (unsigned seed : {41u, 42u, 43u}) {
        Field u = random_band_limited(g, 8, 64, seed);
        Field ux = differentiate(u);
        Field ux2 = multiply_dealias(ux, ux);
        Field e = compute_E(u);
        const real a = besov_from_blocks(block_sup_norms(e.spectrum(), bank), 1.0, 1.0);
        const real b = besov_from_blocks(block_sup_norms(ux2.spectrum(), bank), 0.0, 1.0);
        const real ratio = a / b;
        CHECK(ratio >= 1.0 / 3.0);
        CHECK(ratio <= 3.0);
    }
}

namespace {
// Centered finite differences of E (or u_x) across consecutive solver steps.
struct FdProbe {
    Field minus, center, plus;
    real dt;
};

FdProbe three_states(real omega, real dt, int warmup) {
    TorusGrid g(256);
    const auto m = compute_coefficients(omega);
    Field u0 = Field::sample(g, [](real x) {
        return 0.4 * std::cos(x) + 0.25 * std::sin(2 * x) + 0.1 * std::cos(3 * x);
    });
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = (warmup + 2) * dt;
    cfg.snapshot_stride = 1;
    Trajectory t = integrate(u0, m, cfg);
    return {t.state_field(warmup - 1), t.state_field(warmup), t.state_field(warmup + 1),
            dt};
}
}  // namespace

TEST_CASE("F closes the E transport equation") {
    for (real omega : {0.0, 1.0}) {
        const auto m = compute_coefficients(omega);
        const auto p = three_states(omega, 1e-4, 50);
        Field dEdt = (compute_E(p.plus) - compute_E(p.minus)).scaled(1.0 / (2 * p.dt));
        Field adv = multiply_dealias(dealias(p.center), differentiate(compute_E(p.center)));
        Field resid = dEdt + adv - compute_F(p.center, m);
        const real scale = std::max(dEdt.max_abs(), 1e-30);
        CHECK(resid.max_abs() / scale <= 1e-4);
    }
}

TEST_CASE("F is cubic at small amplitude (zero rotation)") {
    TorusGrid g(128);
    const auto m0 = compute_coefficients(0.0);
    CHECK(compute_F(Field::zero(g), m0).max_abs() == 0.0);
    real prev = -1;
    for (real eps : {0.2, 0.1, 0.05, 0.025}) {
        Field u = Field::sample(g, [&](real x) { return eps * std::cos(x); });
        const real ratio = compute_F(u, m0).max_abs() / (eps * eps * eps);
        if (prev > 0) CHECK(std::abs(ratio - prev) <= 0.5 * prev);
        prev = ratio;
    }
}

TEST_CASE("H closes the slope equation") {
    TorusGrid g(128);
    const auto m0 = compute_coefficients(0.0);
    CHECK(compute_H(Field::zero(g), m0).max_abs() == 0.0);
    Field c = Field::sample(g, [](real) { return 0.8; });
    CHECK(compute_H(c, m0).max_abs() <= 1e-14);

    for (real omega : {0.0, 1.0}) {
        const auto m = compute_coefficients(omega);
        const auto p = three_states(omega, 1e-4, 50);
        Field duxdt =
            (differentiate(p.plus) - differentiate(p.minus)).scaled(1.0 / (2 * p.dt));
        Field uc = dealias(p.center);
        Field ux = differentiate(uc);
        Field uxx = differentiate(ux);
        Field resid = duxdt + multiply_dealias(uc, uxx) +
                      multiply_dealias(ux, ux).scaled(0.5) - compute_H(p.center, m);
        const real scale = std::max(duxdt.max_abs(), 1e-30);
        CHECK(resid.max_abs() / scale <= 1e-4);
    }
}

TEST_CASE("degenerate root branches") {
    using rch::detail::gamma_real_roots;
    // linear: -2 g + 0.8 = 0
    auto lin = gamma_real_roots(0.0, 0.0, -2.0, 0.8);
    REQUIRE(lin.size() == 1);
    CHECK(lin[0] == doctest::Approx(0.4).epsilon(1e-14));
    // quadratic with two real roots: g^2 - 3g + 2
    auto quad = gamma_real_roots(0.0, 1.0, -3.0, 2.0);
    REQUIRE(quad.size() == 2);
    // quadratic without real roots reports the failure
    CHECK_THROWS_AS(gamma_real_roots(0.0, 1.0, 0.0, 1.0), NumericError);
    // cubic with three real roots: (g-1)(g-2)(g-3)
    auto cub = gamma_real_roots(1.0, -6.0, 11.0, -6.0);
    CHECK(cub.size() == 3);
}
