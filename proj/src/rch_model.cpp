#include "rch/rch_model.hpp"

#include "rch/errors.hpp"
#include "rch/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace rch {

namespace {

// Evaluate the defining cubic  a3 g^3 + a2 g^2 + a1 g + a0  and derivative.
struct Cubic {
    real a3, a2, a1, a0;
    real operator()(real g) const { return ((a3 * g + a2) * g + a1) * g + a0; }
    real deriv(real g) const { return (3.0 * a3 * g + 2.0 * a2) * g + a1; }
};

}  // namespace

namespace detail {

// All real roots of the cubic (or quadratic/linear degenerations), by
// closed form. Coefficient scale decides degeneration.
std::vector<real> gamma_real_roots(real a3, real a2, real a1, real a0) {
    const Cubic q{a3, a2, a1, a0};
    const real scale = std::max({std::abs(q.a3), std::abs(q.a2), std::abs(q.a1),
                                 std::abs(q.a0)});
    const real tiny = 1e-14 * scale;
    std::vector<real> roots;
    if (std::abs(q.a3) > tiny) {
        // Depressed cubic t^3 + p t + q0, g = t - a2/(3 a3)
        const real b = q.a2 / q.a3, c = q.a1 / q.a3, d = q.a0 / q.a3;
        const real p = c - b * b / 3.0;
        const real q0 = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        const real shift = -b / 3.0;
        const real disc = q0 * q0 / 4.0 + p * p * p / 27.0;
        if (disc > 0.0) {
            const real s = std::sqrt(disc);
            const real u = std::cbrt(-q0 / 2.0 + s);
            const real v = std::cbrt(-q0 / 2.0 - s);
            roots.push_back(u + v + shift);
        } else {
            // three real roots
            const real r = std::sqrt(-p * p * p / 27.0);
            const real phi = std::acos(std::clamp(-q0 / (2.0 * r), -1.0, 1.0));
            const real m = 2.0 * std::sqrt(-p / 3.0);
            for (int i = 0; i < 3; ++i)
                roots.push_back(m * std::cos((phi + 2.0 * M_PI * i) / 3.0) + shift);
        }
    } else if (std::abs(q.a2) > tiny) {
        const real disc = q.a1 * q.a1 - 4.0 * q.a2 * q.a0;
        if (disc < 0.0)
            throw NumericError(
                "compute_coefficients: quadratic for gamma has no real root "
                "(discriminant = " + std::to_string(disc) + ")");
        const real s = std::sqrt(disc);
        // Stable quadratic roots
        const real q1 = -0.5 * (q.a1 + std::copysign(s, q.a1));
        roots.push_back(q1 / q.a2);
        if (q1 != 0.0) roots.push_back(q.a0 / q1);
    } else {
        roots.push_back(-q.a0 / q.a1);
    }
    return roots;
}

}  // namespace detail

real ModelCoefficients::gamma_residual() const {
    const real g = gamma;
    return std::abs(c - beta0 / beta - 2.0 * g + (omega1 / (alpha * alpha)) * g * g -
                    (omega2 / (alpha * alpha * alpha)) * g * g * g);
}

ModelCoefficients compute_coefficients(real omega) {
    if (!(omega >= 0.0) || !std::isfinite(omega))
        throw ConfigError("compute_coefficients: omega must be finite and >= 0");
    ModelCoefficients m{};
    m.omega = omega;
    const real c = std::sqrt(1.0 + omega * omega) - omega;
    const real c2 = c * c;
    const real d = c2 + 1.0;
    m.c = c;
    m.alpha = c2 / d;
    m.beta0 = c * (c2 * c2 + 6.0 * c2 - 1.0) / (6.0 * d * d);
    m.beta = (3.0 * c2 * c2 + 8.0 * c2 - 1.0) / (6.0 * d * d);
    m.omega1 = -3.0 * c * (c2 - 1.0) * (c2 - 2.0) / (2.0 * d * d * d);
    m.omega2 = (c2 - 1.0) * (c2 - 1.0) * (c2 - 2.0) * (8.0 * c2 - 1.0) /
               (2.0 * d * d * d * d * d);

    const real a2s = m.alpha * m.alpha;
    const real a3s = a2s * m.alpha;
    const Cubic q{-m.omega2 / a3s, m.omega1 / a2s, -2.0, m.c - m.beta0 / m.beta};

    std::vector<real> roots = detail::gamma_real_roots(q.a3, q.a2, q.a1, q.a0);
    m.multiple_real_roots = roots.size() > 1;
    real g = *std::min_element(roots.begin(), roots.end(),
                               [](real a, real b) { return std::abs(a) < std::abs(b); });
    // Newton polish on the original equation.
    for (int it = 0; it < 60; ++it) {
        const real f = q(g);
        if (std::abs(f) <= 1e-14) break;
        const real fp = q.deriv(g);
        if (fp == 0.0) break;
        g -= f / fp;
    }
    m.gamma = g;
    m.c0 = m.beta0 / m.beta - g;
    m.c1 = 1.0 + 3.0 * g * g * m.omega2 / (2.0 * a3s) - m.omega1 * g / a2s;
    m.c2 = m.omega1 / (3.0 * a2s) - m.omega2 * g / a3s;
    m.c3 = m.omega2 / (4.0 * a3s);
    return m;
}

// ---------------------------------------------------------------------------
// Field-level operators (diagnostics; literal product forms)
// ---------------------------------------------------------------------------

namespace {
Field apply_neg_dx_helmholtz(const Field& w) {
    // -dx (1-dxx)^{-1} w
    return differentiate(helmholtz_inverse(w)).scaled(-1.0);
}

void check_finite(const Field& u, const char* who) {
    for (real v : u.values())
        if (!std::isfinite(v)) throw NumericError(std::string(who) + ": non-finite input");
}
}  // namespace

Field rhs(const Field& u, const ModelCoefficients& coeffs, real fraction) {
    check_finite(u, "rhs");
    const Field ud = dealias(u, fraction);
    const Field ux = differentiate(ud);
    const Field q2 = multiply_dealias(ud, ud, fraction);
    const Field qx = multiply_dealias(ux, ux, fraction);
    Field w = qx.scaled(0.5) + q2.scaled(coeffs.c1);
    if (coeffs.has_quartic()) {
        const Field q3 = multiply_dealias(q2, ud, fraction);
        const Field q4 = multiply_dealias(q2, q2, fraction);
        w = w + q3.scaled(coeffs.c2) + q4.scaled(coeffs.c3);
    }
    const Field adv = multiply_dealias(ud, ux, fraction);
    return apply_neg_dx_helmholtz(w) - adv;
}

Field compute_E(const Field& u, real fraction) {
    const Field ux = differentiate(dealias(u, fraction));
    const Field qx = multiply_dealias(ux, ux, fraction);
    return apply_neg_dx_helmholtz(qx.scaled(0.5));
}

Field compute_H(const Field& u, const ModelCoefficients& coeffs, real fraction) {
    const Field ud = dealias(u, fraction);
    const Field ux = differentiate(ud);
    const Field q2 = multiply_dealias(ud, ud, fraction);
    const Field qx = multiply_dealias(ux, ux, fraction);
    const Field q3 = multiply_dealias(q2, ud, fraction);
    const Field q4 = multiply_dealias(q2, q2, fraction);
    const Field poly = q2.scaled(coeffs.c1) + q3.scaled(coeffs.c2) + q4.scaled(coeffs.c3);
    return poly - helmholtz_inverse(qx.scaled(0.5) + poly);
}

Field compute_F(const Field& u, const ModelCoefficients& coeffs, real fraction) {
    const Field ud = dealias(u, fraction);
    const Field ux = differentiate(ud);
    const Field q2 = multiply_dealias(ud, ud, fraction);
    const Field qx = multiply_dealias(ux, ux, fraction);
    const Field q3 = multiply_dealias(q2, ud, fraction);
    const Field q4 = multiply_dealias(q2, q2, fraction);
    const Field q5 = multiply_dealias(q2, q3, fraction);
    const Field cub =
        q3.scaled(coeffs.c1 / 3.0) + q4.scaled(coeffs.c2 / 4.0) + q5.scaled(coeffs.c3 / 5.0);
    const Field lam_qx = helmholtz_inverse(qx.scaled(0.5));
    const Field t2 = multiply_dealias(ud, lam_qx, fraction);
    const Field u_ux2 = multiply_dealias(ud, qx, fraction);
    const Field inner =
        helmholtz_inverse(qx.scaled(0.5) + q2.scaled(coeffs.c1) + q3.scaled(coeffs.c2) +
                          q4.scaled(coeffs.c3));
    const Field t4 = differentiate(multiply_dealias(ux, inner, fraction));
    return cub - t2 - helmholtz_inverse(cub - u_ux2.scaled(0.5) - t4);
}

// ---------------------------------------------------------------------------
// Hot path
// ---------------------------------------------------------------------------

RhsWorkspace::RhsWorkspace(int n, const ModelCoefficients& coeffs, real fraction)
    : n_(n),
      kcut_(dealias_cutoff(n, fraction)),
      c1_(coeffs.c1),
      c2_(coeffs.c2),
      c3_(coeffs.c3),
      quartic_(coeffs.has_quartic()),
      u_(n),
      ux_(n),
      w_(n),
      s1_(n / 2 + 1),
      s2_(n / 2 + 1),
      s3_(n / 2 + 1) {}

void RhsWorkspace::tendency(const cvec& u_hat, cvec& out, real* ux_max, real* u_max) {
    const int n = n_;
    const int nk = n / 2 + 1;
    const real inv_n = 1.0 / n;
    out.resize(nk);

    // u and u_x in physical space (band of u_hat is already <= kcut).
    fft::inverse(n, u_hat.data(), u_.data());
    for (int i = 0; i < n; ++i) u_[i] *= inv_n;
    s1_[0] = cplx(0, 0);
    for (int k = 1; k <= kcut_; ++k) s1_[k] = cplx(0, k) * u_hat[k];
    for (int k = kcut_ + 1; k < nk; ++k) s1_[k] = cplx(0, 0);
    fft::inverse(n, s1_.data(), ux_.data());
    for (int i = 0; i < n; ++i) ux_[i] *= inv_n;

    if (u_max) {
        real m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(u_[i]));
        *u_max = m;
    }
    if (ux_max) {
        real m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(ux_[i]));
        *ux_max = m;
    }

    // s1 <- (u^2)^, s2 <- (u_x^2)^, both truncated.
    for (int i = 0; i < n; ++i) w_[i] = u_[i] * u_[i];
    fft::forward(n, w_.data(), s1_.data());
    for (int i = 0; i < n; ++i) w_[i] = ux_[i] * ux_[i];
    fft::forward(n, w_.data(), s2_.data());

    // W^ = (u_x^2)^/2 + c1 (u^2)^ [+ c2 (u^3)^ + c3 (u^4)^] on the retained band.
    if (quartic_) {
        for (int k = 0; k <= kcut_; ++k) s3_[k] = s1_[k];
        for (int k = kcut_ + 1; k < nk; ++k) s3_[k] = cplx(0, 0);
        fft::inverse(n, s3_.data(), w_.data());  // w <- u2d * n
        // u2d * (c2 u + c3 u2d); u2d carries the 1/n normalization inline
        for (int i = 0; i < n; ++i) {
            const real u2d = w_[i] * inv_n;
            w_[i] = u2d * (c2_ * u_[i] + c3_ * u2d);
        }
        fft::forward(n, w_.data(), s3_.data());
        for (int k = 0; k <= kcut_; ++k) s2_[k] = 0.5 * s2_[k] + c1_ * s1_[k] + s3_[k];
    } else {
        for (int k = 0; k <= kcut_; ++k) s2_[k] = 0.5 * s2_[k] + c1_ * s1_[k];
    }

    // out = -ik/2 (u^2)^  - ik/(1+k^2) W^   (advection written as -(u u_x)^ =
    // -dx(u^2)^/2; identical on the retained band for band-limited input).
    out[0] = cplx(0, 0);
    for (int k = 1; k <= kcut_; ++k) {
        const real kk = k;
        const cplx ik(0, kk);
        out[k] = -0.5 * ik * s1_[k] - ik / (1.0 + kk * kk) * s2_[k];
    }
    for (int k = kcut_ + 1; k < nk; ++k) out[k] = cplx(0, 0);
}

}  // namespace rch
