#pragma once

#include "rch/field.hpp"
#include "rch/spectral_ops.hpp"

#include <vector>

namespace rch {

/// Scalar parameters of the rescaled rotation Camassa-Holm equation
///   u_t + u u_x = -dx (1-dxx)^{-1} ( u_x^2/2 + c1 u^2 + c2 u^3 + c3 u^4 )
/// as functions of the rotation speed Omega. gamma is the real root of
///   c - beta0/beta - 2 g + (omega1/alpha^2) g^2 - (omega2/alpha^3) g^3 = 0
/// (smallest in absolute value when several are real).
struct ModelCoefficients {
    real omega;
    real c, alpha, beta0, beta, omega1, omega2;
    real gamma;
    real c0;            // beta0/beta - gamma
    real c1, c2, c3;
    bool multiple_real_roots = false;  // cubic had 3 real roots (warned)

    /// Residual of the defining cubic at gamma.
    real gamma_residual() const;
    bool has_quartic() const { return c2 != 0.0 || c3 != 0.0; }
};

ModelCoefficients compute_coefficients(real omega);

namespace detail {
/// Real roots of a3 g^3 + a2 g^2 + a1 g + a0, degenerating to the quadratic
/// or linear case when leading coefficients vanish relative to the
/// coefficient scale. A quadratic without real roots throws NumericError.
std::vector<real> gamma_real_roots(real a3, real a2, real a1, real a0);
}  // namespace detail

/// Full tendency of the rescaled equation:
///   rhs(u) = -u u_x - dx (1-dxx)^{-1} ( u_x^2/2 + c1 u^2 + c2 u^3 + c3 u^4 ),
/// every pointwise product dealiased before the multiplier is applied
/// (u^3 as (u^2)_dealiased * u, u^4 as (u^2)_dealiased^2).
Field rhs(const Field& u, const ModelCoefficients& coeffs,
          real dealias_fraction = 2.0 / 3.0);

/// E = -(1-dxx)^{-1} dx (u_x^2 / 2).
Field compute_E(const Field& u, real dealias_fraction = 2.0 / 3.0);

/// Forcing of the transport equation dE/dt + u E_x = F along solutions:
///   F = c1/3 u^3 + c2/4 u^4 + c3/5 u^5 - u (1-dxx)^{-1}(u_x^2/2)
///       - (1-dxx)^{-1}( c1/3 u^3 + c2/4 u^4 + c3/5 u^5 - u u_x^2 / 2
///                       - dx[ u_x (1-dxx)^{-1}(u_x^2/2 + c1 u^2 + c2 u^3 + c3 u^4) ] ).
Field compute_F(const Field& u, const ModelCoefficients& coeffs,
                real dealias_fraction = 2.0 / 3.0);

/// Forcing of the slope equation u_xt + u u_xx = -u_x^2/2 + H:
///   H = c1 u^2 + c2 u^3 + c3 u^4
///       - (1-dxx)^{-1}( u_x^2/2 + c1 u^2 + c2 u^3 + c3 u^4 ).
Field compute_H(const Field& u, const ModelCoefficients& coeffs,
                real dealias_fraction = 2.0 / 3.0);

/// Reusable buffers + plans for the time-stepping hot path. tendency()
/// computes rhs() on raw spectra (length n/2+1, content zero above kcut)
/// and reports ||u_x||_inf of the input state as a by-product.
class RhsWorkspace {
  public:
    RhsWorkspace(int n, const ModelCoefficients& coeffs, real dealias_fraction);

    void tendency(const cvec& u_hat, cvec& out, real* ux_max = nullptr,
                  real* u_max = nullptr);

    int cutoff() const { return kcut_; }

  private:
    int n_, kcut_;
    real c1_, c2_, c3_;
    bool quartic_;
    rvec u_, ux_, w_;
    cvec s1_, s2_, s3_;
};

}  // namespace rch
