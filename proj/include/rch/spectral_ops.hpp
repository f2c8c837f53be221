#pragma once

#include "rch/field.hpp"

#include <span>
#include <vector>

namespace rch {

/// d/dx as the Fourier multiplier i*k; the Nyquist mode is zeroed
/// (odd-derivative convention).
Field differentiate(const Field& u);

/// (1 - d^2/dx^2)^{-1}: multiplier 1/(1+k^2), Nyquist included.
Field helmholtz_inverse(const Field& u);

/// Zero all modes with |k| > fraction*(n/2). Default is the 2/3 rule.
Field dealias(const Field& u, real fraction = 2.0 / 3.0);

/// Pointwise product followed by dealias, the only way products are formed
/// anywhere in the model layer.
Field multiply_dealias(const Field& a, const Field& b, real fraction = 2.0 / 3.0);

/// Trigonometric (spectral) interpolation of u at arbitrary positions
/// (reduced mod 2*pi). Exact on band-limited data up to rounding: small
/// problems use direct summation of the Fourier series; large ones an
/// oversampled fine grid with high-order local interpolation (relative
/// error ~1e-12).
std::vector<real> evaluate_offgrid(const Field& u, std::span<const real> positions);

/// Retained-band cutoff index for the given dealias fraction: modes with
/// k > dealias_cutoff(n, fraction) are zeroed.
int dealias_cutoff(int n, real fraction);

/// Precomputed oversampled samples of one field for repeated scattered
/// evaluation (the flow map's inner loop). The fine grid is sized from the
/// field's spectral band; eval() does 12-point barycentric Lagrange
/// interpolation, ~1e-12 relative accuracy on full-band data.
class FineGrid {
  public:
    FineGrid() = default;
    /// Build from a raw half-spectrum of length n/2+1 (unnormalized) whose
    /// content is zero above `band`.
    FineGrid(std::span<const cplx> spectrum, int n, int band);
    explicit FineGrid(const Field& u) : FineGrid(u.spectrum(), u.size(), u.band()) {}

    real eval(real position) const;
    int fine_size() const { return m_; }

    /// w = (1-t)*a + t*b pointwise; grids must match.
    static FineGrid blend(const FineGrid& a, const FineGrid& b, real t);

  private:
    int m_ = 0;
    rvec w_;
};

namespace kernels {
// Raw-spectrum versions used by the time-stepping hot path; all operate on
// half-spectra of length n/2+1.

inline void derivative(std::span<const cplx> in, std::span<cplx> out, int n) {
    out[0] = cplx(0, 0);
    for (int k = 1; k < n / 2; ++k) out[k] = cplx(0, k) * in[k];
    out[n / 2] = cplx(0, 0);
}

inline void helmholtz(std::span<const cplx> in, std::span<cplx> out, int n) {
    for (int k = 0; k <= n / 2; ++k) out[k] = in[k] / (1.0 + real(k) * real(k));
}

inline void truncate(std::span<cplx> s, int n, int kcut) {
    for (int k = kcut + 1; k <= n / 2; ++k) s[k] = cplx(0, 0);
}
}  // namespace kernels

}  // namespace rch
