#pragma once

#include "rch/littlewood_paley.hpp"
#include "rch/pde_solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rch {

/// Norm-inflation experiment configuration. Grid rule: n = 2^{N + grid_offset}
/// (carrier 2^{N+5}); horizon t_end = time_horizon_factor * N^{-1/2}; the
/// time step is CFL-based on the carrier, dt = min(dt_cap,
/// courant / (2^{N+5} * u_ref)) with u_ref = max(u_ref_floor,
/// ||u0||_inf + t_end * ||rhs(u0)||_inf).
struct InflationConfig {
    std::vector<int> n_list{6, 7, 8};
    real omega = 1.0;
    int samples = 64;               // >= 64 uniform snapshots
    real dealias_fraction = 2.0 / 3.0;
    real time_horizon_factor = 2.0;
    real dt_cap = 1e-3;
    real courant = 0.1;
    real u_ref_floor = 0.05;
    int grid_offset = 8;
    int flow_substeps = 1;
    int d_check_stride = 4;         // D(t) every k-th sample
    real blowup_threshold = 1e6;
    int fft_threads = 0;            // 0 = auto

    void validate() const;
};

/// One sample of the per-run time series (the CSV row, minus N).
struct SampleRow {
    real t;
    real norm_b1;        // ||u||_{B^1_{inf,1}}
    real norm_ux_b0;     // ||u_x||_{B^0_{inf,1}}
    real norm_ux_log;    // ||u_x||_{B^0_{inf,inf,1}}
    real norm_c01;       // ||u||_inf + ||u_x||_inf
    real norm_e_b1;      // ||E(t)||_{B^1_{inf,1}}
    real rj_sum;         // sum_j ||R_j||_inf
    real rj_sum_2j;      // sum_j 2^j ||R_j||_inf
    real rj_sup_j;       // sup_j j ||R_j||_inf
    real yxi_min, yxi_max;
};

/// Lower-bound mechanism check at one time: D(t) and the triangle-inequality
/// chain evaluated with every sup on the same xi sub-grids.
struct MechanismCheck {
    real t;
    real d_value;           // sum_j 2^j || (D_j u) o y - D_j u0 - t D_j E0 ||
    real b1_composed;       // sum_j 2^j || (D_j u) o y ||
    real u0_b1_sub;         // sum_j 2^j || D_j u0 || on the same points
    real e0_b1_sub;         //   "     for E0
    real lower_bound_margin;  // b1_composed + u0_b1_sub - (t*e0_b1_sub - d)
    bool forced_inequality_ok;
    bool spec_inequality_ok;  // b1(t) >= t ||E0||_B1 - D(t), as stated
};

struct RunEntry {
    int N = 0;
    real omega = 0.0;
    int n = 0;
    real dt = 0.0;
    long long steps = 0;
    real t_end_target = 0.0;
    real t_end_achieved = 0.0;

    // t = 0 table
    real u0_b1 = 0, u0_b1log = 0, u0x2_b0 = 0, u0_c01 = 0, e0_b1 = 0;
    real e0_equiv_ratio = 0;       // ||E0||_B1 / ||u0x^2||_B0
    real u0_offband_mass = 0;      // spectral mass outside the carrier window

    std::vector<SampleRow> series;
    std::vector<MechanismCheck> mechanism;

    real peak_ratio = 0;           // max_t ||u||_B1 / ||u0||_B1
    real pearson_proxy = 0;        // corr(||u(t)||_B1, t*||E0||_B1), pre-breaking
    real yxi_min = 1, yxi_max = 1;
    real window_exit_time = std::numeric_limits<real>::quiet_NaN();
    real c_envelope = 0;           // measured a-priori-estimate constant
    real ux_log_sup_ratio = 0;     // max_t ||u_x||_log / N^{9/10}

    bool completed = false;
    bool blown_up = false;
    bool window_ok = false;        // y_xi within [0.4, 2.5] over the horizon
    bool e0_equiv_ok = false;      // ratio within [1/4, 4]
    bool mechanism_ok = false;     // forced inequality held at all checks
    std::vector<std::string> warnings;
    std::string error;             // nonempty if the run failed outright
};

struct SlopeFit {
    bool defined = false;
    real slope = std::numeric_limits<real>::quiet_NaN();
    real stderr_slope = std::numeric_limits<real>::quiet_NaN();
    real intercept = std::numeric_limits<real>::quiet_NaN();
    real residual_rms = std::numeric_limits<real>::quiet_NaN();
};

/// Least-squares fit of y against x (both already log-scaled by the caller).
SlopeFit fit_line(std::span<const real> x, std::span<const real> y);

struct InflationReport {
    InflationConfig config;
    std::vector<RunEntry> runs;
    SlopeFit fit_u0_b1;       // log2 ||u0||_B1 vs log2 N
    SlopeFit fit_u0_b1log;
    SlopeFit fit_u0x2_b0;
    SlopeFit fit_peak_ratio;
    bool trend_confirmed = false;  // peaks strictly increasing and u0 slope < 0
    bool all_windows_ok = false;
};

/// The norm-inflation initial datum
///   u0 = -N^{-1/10} (1-dxx)^{-1} dx [ cos(2^{N+5} x) (1 + N^{-1/10} S_N h) ],
/// h = torus step (1 on [0, pi), 0 on [pi, 2 pi)). The grid must keep
/// u0x^2 alias-free under the dealias fraction.
Field build_initial_data(int N, const TorusGrid& grid,
                         real dealias_fraction = 2.0 / 3.0);

/// Commutator diagnostic R_j = Delta_j(u u_x) - u Delta_j u_x with per-block
/// sup norms, the three aggregates, and their ratios against the product
/// bounds' right-hand sides.
struct CommutatorDiag {
    std::vector<real> rj_sup;   // ||R_j||_inf, index 0 = block -1
    real sum = 0, sum_2j = 0, sup_j = 0;
    real ratio_sum_2j = 0;      // sum_2j / (||u_x||_B0 * ||u||_B1)
    real ratio_sum = 0;         // sum / (||u_x||_B0 * max(||u||_B0, ||u||_log0))
    real ratio_sup_j = 0;       // sup_j / (||u_x||_B0 * ||u||_log0)
};

CommutatorDiag commutator_diag(const Field& u, const DyadicFilterBank& bank);

RunEntry run_single(int N, real omega, const InflationConfig& cfg);
InflationReport run_sweep(const InflationConfig& cfg);

}  // namespace rch
