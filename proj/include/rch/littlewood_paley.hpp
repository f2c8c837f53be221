#pragma once

#include "rch/field.hpp"

#include <limits>
#include <vector>

namespace rch {

/// Continuous cutoff profiles. chi is the mollified step built from
/// theta(t) = f(t)/(f(t)+f(1-t)), f(t) = exp(-1/t) (t>0):
///   chi(xi) = 1 - theta((|xi| - 3/4)/(4/3 - 3/4)),
/// so chi == 1 on |xi| <= 3/4 and supp chi = {|xi| <= 4/3}. phi(xi) =
/// chi(xi/2) - chi(xi) is supported on the annulus 3/4 <= |xi| <= 8/3 and
/// equals 1 on [4/3, 3/2].
real chi_profile(real xi);
real phi_profile(real xi);

/// Sampled dyadic partition of unity on a grid's wavenumbers: chi(k) plus
/// phi(2^{-j} k) for j = 0..j_max, where j_max is the largest j with
/// (8/3)*2^j <= n/2 (top block support still inside the grid).
struct DyadicFilterBank {
    TorusGrid grid;
    int j_max;
    rvec chi;                    // chi(k), k = 0..n/2
    std::vector<rvec> phi;      // phi(2^{-j} k)

    const rvec& cutoff(int j) const;  // j = -1 -> chi, 0..j_max -> phi[j]
    /// Largest wavenumber where the partition of unity sums to 1:
    /// (3/2)*2^{j_max}.
    int covered_band() const { return (3 * (1 << j_max)) / 2; }
};

DyadicFilterBank build_filter_bank(const TorusGrid& grid);

/// Besov index (s, p, r); p in {2, inf}, r in [1, inf]. log_weight selects
/// the space with norm sup_j j*2^{js}*||Delta_j u||_inf and forces
/// p = r = inf.
struct BesovIndex {
    real s;
    real p;
    real r;
    bool log_weight = false;

    BesovIndex(real s_, real p_, real r_, bool log_ = false);
    static constexpr real inf = std::numeric_limits<real>::infinity();
};

/// Delta_j u: j <= -2 gives 0, j = -1 the chi multiplier, j >= 0 the
/// phi(2^{-j} .) multiplier. j > j_max is out of range.
Field block(const Field& u, int j, const DyadicFilterBank& bank);

/// S_N u = sum_{-1 <= j < N} Delta_j u, i.e. the chi(2^{-N} .) multiplier.
/// Requires 0 <= N <= j_max + 1.
Field low_pass(const Field& u, int N, const DyadicFilterBank& bank);

/// || (2^{js} ||Delta_j u||_{L^p})_{j=-1..j_max} ||_{l^r}. L^inf is the grid
/// max; L^2 is rms * sqrt(2*pi).
real besov_norm(const Field& u, const BesovIndex& idx, const DyadicFilterBank& bank);

/// sup_{j>=1} j * 2^{js} * ||Delta_j u||_inf (j = -1, 0 carry weight 0).
real besov_log_norm(const Field& u, real s, const DyadicFilterBank& bank);

/// Per-block L^inf norms ||Delta_j u||_inf for j = -1..j_max, computed from
/// a raw spectrum. Index 0 of the result is j = -1. This is the workhorse
/// behind both norms; exposed for the experiment runner's time series.
std::vector<real> block_sup_norms(std::span<const cplx> spectrum,
                                  const DyadicFilterBank& bank);

real besov_from_blocks(const std::vector<real>& sup, real s, real r);
real besov_log_from_blocks(const std::vector<real>& sup, real s);

}  // namespace rch
