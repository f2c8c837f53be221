#include "rch/pde_solver.hpp"

#include "rch/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rch {

Field Trajectory::state_field(size_t idx) const {
    return Field::from_spectrum(grid, full_spectrum(idx));
}

cvec Trajectory::full_spectrum(size_t idx) const {
    cvec s(grid.size() / 2 + 1, cplx(0, 0));
    const cvec& st = states.at(idx);
    std::copy(st.begin(), st.end(), s.begin());
    return s;
}

Trajectory integrate(const Field& u0, const ModelCoefficients& coeffs,
                     const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("integrate: dt must be positive");
    const int n = u0.size();
    const int nk = n / 2 + 1;
    const int kcut = dealias_cutoff(n, cfg.dealias_fraction);

    Trajectory traj{u0.grid(), kcut, cfg.dealias_fraction, {}, {}, {}, {}, {}};
    RhsWorkspace ws(n, coeffs, cfg.dealias_fraction);

    // State: full half-spectrum, zero above kcut.
    cvec u(nk, cplx(0, 0));
    for (int k = 0; k <= kcut; ++k) u[k] = u0.spectrum()[k];

    const real u0_max = u0.max_abs();
    traj.cfl_warning = cfg.dt * kcut * u0_max > 0.5;

    const long long nsteps = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-12));
    const int stride = std::max(1, cfg.snapshot_stride);

    cvec k1(nk), k2(nk), k3(nk), k4(nk), tmp(nk);
    real ux_sup = 0.0, u_sup = 0.0, v_int = 0.0;

    auto snapshot = [&](real t) {
        traj.times.push_back(t);
        traj.states.emplace_back(u.begin(), u.begin() + kcut + 1);
        traj.u_max.push_back(u_sup);
        traj.ux_max.push_back(ux_sup);
        traj.ux_max_integral.push_back(v_int);
    };

    ws.tendency(u, k1, &ux_sup, &u_sup);  // also fills monitors for t = 0
    snapshot(0.0);

    real t = 0.0;
    for (long long step = 0; step < nsteps; ++step) {
        const real dt = cfg.dt;
        ws.tendency(u, k1, &ux_sup, &u_sup);
        v_int += ux_sup * dt;  // left-endpoint quadrature of ||u_x||_inf

        for (int k = 0; k <= kcut; ++k) tmp[k] = u[k] + 0.5 * dt * k1[k];
        ws.tendency(tmp, k2);
        for (int k = 0; k <= kcut; ++k) tmp[k] = u[k] + 0.5 * dt * k2[k];
        ws.tendency(tmp, k3);
        for (int k = 0; k <= kcut; ++k) tmp[k] = u[k] + dt * k3[k];
        ws.tendency(tmp, k4);
        for (int k = 0; k <= kcut; ++k)
            u[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        t += dt;

        bool finite = true;
        for (int k = 0; k <= kcut; k += 64)
            if (!std::isfinite(u[k].real()) || !std::isfinite(u[k].imag())) finite = false;

        if (!finite || ux_sup > cfg.blowup_threshold) {
            traj.blown_up = true;
            traj.blowup_time = t;
            if (finite) snapshot(t);
            return traj;
        }
        if ((step + 1) % stride == 0 || step == nsteps - 1) {
            // Refresh monitors for the accepted state before recording.
            ws.tendency(u, k1, &ux_sup, &u_sup);
            if (!std::isfinite(ux_sup)) {
                traj.blown_up = true;
                traj.blowup_time = t;
                return traj;
            }
            snapshot(t);
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Flow map
// ---------------------------------------------------------------------------

namespace {

struct FlowOde {
    const FineGrid* ua;       // u at interval start
    const FineGrid* ub;       // u at interval end
    const FineGrid* ga = nullptr;  // u_x, only for the variational route
    const FineGrid* gb = nullptr;
    real ta, tb;

    real u_at(real t, real y) const {
        const real w = (t - ta) / (tb - ta);
        return (1.0 - w) * ua->eval(y) + w * ub->eval(y);
    }
    real ux_at(real t, real y) const {
        const real w = (t - ta) / (tb - ta);
        return (1.0 - w) * ga->eval(y) + w * gb->eval(y);
    }
};

// One RK4 step of dy/dt = u(t,y) [and optionally dz/dt = ux(t,y) z].
void rk4_flow_step(const FlowOde& f, real t, real h, std::vector<real>& y,
                   std::vector<real>* z) {
    const size_t m = y.size();
    for (size_t i = 0; i < m; ++i) {
        const real yi = y[i];
        const real k1 = f.u_at(t, yi);
        const real k2 = f.u_at(t + h / 2, yi + h / 2 * k1);
        const real k3 = f.u_at(t + h / 2, yi + h / 2 * k2);
        const real k4 = f.u_at(t + h, yi + h * k3);
        real zi = 0, l1 = 0, l2 = 0, l3 = 0, l4 = 0;
        if (z) {
            zi = (*z)[i];
            l1 = f.ux_at(t, yi) * zi;
            l2 = f.ux_at(t + h / 2, yi + h / 2 * k1) * (zi + h / 2 * l1);
            l3 = f.ux_at(t + h / 2, yi + h / 2 * k2) * (zi + h / 2 * l2);
            l4 = f.ux_at(t + h, yi + h * k3) * (zi + h * l3);
            (*z)[i] = zi + h / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
        }
        y[i] = yi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
}

cvec spectral_derivative_of(const cvec& full, int n) {
    cvec d(full.size());
    kernels::derivative(full, d, n);
    return d;
}

// Shared driver; with_gradient selects the variational companion.
void flow_core(const Trajectory& traj, std::span<const real> xi, int substeps,
               bool with_gradient,
               const std::function<void(size_t, const std::vector<real>&,
                                        const std::vector<real>&)>& visit) {
    const int n = traj.grid.size();
    const int band = traj.kcut;
    std::vector<real> y(xi.begin(), xi.end());
    std::vector<real> z(with_gradient ? xi.size() : 0, 1.0);

    visit(0, y, z);
    if (traj.times.size() < 2) return;

    cvec spec_b = traj.full_spectrum(0);
    FineGrid fb(spec_b, n, band);
    FineGrid gb;
    if (with_gradient) gb = FineGrid(spectral_derivative_of(spec_b, n), n, band);

    for (size_t i = 0; i + 1 < traj.times.size(); ++i) {
        FineGrid fa = std::move(fb);
        FineGrid ga = std::move(gb);
        spec_b = traj.full_spectrum(i + 1);
        fb = FineGrid(spec_b, n, band);
        if (with_gradient) gb = FineGrid(spectral_derivative_of(spec_b, n), n, band);

        FlowOde f{&fa, &fb, with_gradient ? &ga : nullptr,
                  with_gradient ? &gb : nullptr, traj.times[i], traj.times[i + 1]};
        const int ns = std::max(1, substeps);
        const real h = (traj.times[i + 1] - traj.times[i]) / ns;
        for (int s = 0; s < ns; ++s)
            rk4_flow_step(f, traj.times[i] + s * h, h, y, with_gradient ? &z : nullptr);

        visit(i + 1, y, z);
    }
}

}  // namespace

std::vector<std::vector<real>> flow_map(const Trajectory& traj,
                                        std::span<const real> xi, int substeps) {
    std::vector<std::vector<real>> out;
    out.reserve(traj.times.size());
    flow_core(traj, xi, substeps, false,
              [&](size_t, const std::vector<real>& y, const std::vector<real>&) {
                  out.push_back(y);
              });
    return out;
}

void flow_map_visit(const Trajectory& traj, std::span<const real> xi, int substeps,
                    const std::function<void(size_t, const std::vector<real>&)>& visit) {
    flow_core(traj, xi, substeps, false,
              [&](size_t i, const std::vector<real>& y, const std::vector<real>&) {
                  visit(i, y);
              });
}

FlowGradientResult flow_gradient(const Trajectory& traj, int m, int substeps) {
    if (m < 16 || (m & (m - 1)) != 0)
        throw ConfigError("flow_gradient: xi grid size must be a power of two >= 16");
    const real two_pi = 2.0 * std::numbers::pi;
    std::vector<real> xi(m);
    for (int i = 0; i < m; ++i) xi[i] = two_pi * i / m;

    auto ys = flow_map(traj, xi, substeps);
    FlowGradientResult res;
    res.y_xi.reserve(ys.size());

    rvec pert(m);
    cvec spec(m / 2 + 1), dspec(m / 2 + 1);
    rvec deriv(m);
    for (const auto& y : ys) {
        for (int i = 0; i < m; ++i) pert[i] = y[i] - xi[i];
        fft::forward(m, pert.data(), spec.data());
        kernels::derivative(spec, dspec, m);
        fft::inverse_scaled(m, dspec.data(), deriv.data());
        std::vector<real> yx(m);
        for (int i = 0; i < m; ++i) {
            yx[i] = 1.0 + deriv[i];
            res.min_y_xi = std::min(res.min_y_xi, yx[i]);
            res.max_y_xi = std::max(res.max_y_xi, yx[i]);
        }
        res.y_xi.push_back(std::move(yx));
    }
    return res;
}

std::vector<std::vector<real>> flow_gradient_variational(const Trajectory& traj,
                                                         std::span<const real> xi,
                                                         int substeps) {
    std::vector<std::vector<real>> out;
    out.reserve(traj.times.size());
    flow_core(traj, xi, substeps, true,
              [&](size_t, const std::vector<real>&, const std::vector<real>& z) {
                  out.push_back(z);
              });
    return out;
}

}  // namespace rch
