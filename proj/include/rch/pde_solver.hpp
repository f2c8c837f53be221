#pragma once

#include "rch/rch_model.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace rch {

/// Fixed-step classical RK4 configuration. dt * (max retained wavenumber) *
/// (expected ||u||_inf) <= 0.5 is advisory (warn, not error).
struct SolverConfig {
    real dt = 1e-3;
    real t_end = 1.0;
    real dealias_fraction = 2.0 / 3.0;
    real blowup_threshold = 1e6;   // max allowed ||u_x||_inf
    int snapshot_stride = 1;       // steps between recorded snapshots
};

/// Time series of spectral snapshots (truncated to the retained band) plus
/// per-snapshot monitor data. Snapshot 0 is the initial state; the last one
/// is the final accepted state.
struct Trajectory {
    TorusGrid grid;
    int kcut;
    real dealias_fraction;
    std::vector<real> times;
    std::vector<cvec> states;        // length kcut+1 each
    std::vector<real> u_max;         // ||u||_inf per snapshot
    std::vector<real> ux_max;        // ||u_x||_inf per snapshot
    std::vector<real> ux_max_integral;  // int_0^t ||u_x||_inf, step-accumulated
    bool blown_up = false;
    real blowup_time = std::numeric_limits<real>::quiet_NaN();
    bool cfl_warning = false;

    Field state_field(size_t idx) const;
    /// Full half-spectrum (n/2+1) of snapshot idx.
    cvec full_spectrum(size_t idx) const;
};

Trajectory integrate(const Field& u0, const ModelCoefficients& coeffs,
                     const SolverConfig& cfg);

/// Characteristics y(t, xi) with dy/dt = u(t, y), y(0) = xi, integrated by
/// RK4 over the snapshot intervals with u linear in time between snapshots.
/// Returns one position list per snapshot time (first entry = xi, winding
/// not reduced).
std::vector<std::vector<real>> flow_map(const Trajectory& traj,
                                        std::span<const real> xi,
                                        int substeps = 1);

/// Streaming variant of flow_map for large xi grids: visit(idx, y) is called
/// once per snapshot index with the positions at traj.times[idx].
void flow_map_visit(const Trajectory& traj, std::span<const real> xi, int substeps,
                    const std::function<void(size_t, const std::vector<real>&)>& visit);

struct FlowGradientResult {
    std::vector<std::vector<real>> y_xi;  // per snapshot time, on the xi grid
    real min_y_xi = 1.0;
    real max_y_xi = 1.0;
};

/// y_xi on a uniform xi grid of m points, from spectral differentiation of
/// the periodic perturbation y - xi. m should resolve at least 4x the
/// solution band.
FlowGradientResult flow_gradient(const Trajectory& traj, int m, int substeps = 1);

/// Independent route for y_xi: integrate the variational equation
/// d/dt y_xi = u_x(t, y) y_xi alongside the characteristics.
std::vector<std::vector<real>> flow_gradient_variational(const Trajectory& traj,
                                                         std::span<const real> xi,
                                                         int substeps = 1);

}  // namespace rch
