#include "rch/littlewood_paley.hpp"

#include "rch/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rch {

namespace {
real mollifier(real t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

real theta(real t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const real a = mollifier(t);
    const real b = mollifier(1.0 - t);
    return a / (a + b);
}
}  // namespace

real chi_profile(real xi) {
    return 1.0 - theta((std::abs(xi) - 0.75) / (4.0 / 3.0 - 0.75));
}

real phi_profile(real xi) { return chi_profile(xi / 2.0) - chi_profile(xi); }

const rvec& DyadicFilterBank::cutoff(int j) const {
    if (j == -1) return chi;
    return phi.at(j);
}

DyadicFilterBank build_filter_bank(const TorusGrid& grid) {
    const int n = grid.size();
    int j_max = -1;
    while ((8.0 / 3.0) * std::pow(2.0, j_max + 1) <= n / 2) ++j_max;
    if (j_max < 2)
        throw ConfigError("build_filter_bank: grid too small (j_max = " +
                          std::to_string(j_max) + " < 2)");

    DyadicFilterBank bank{grid, j_max, rvec(n / 2 + 1), {}};
    for (int k = 0; k <= n / 2; ++k) bank.chi[k] = chi_profile(k);
    bank.phi.reserve(j_max + 1);
    for (int j = 0; j <= j_max; ++j) {
        rvec pj(n / 2 + 1);
        const real scale = std::pow(2.0, -j);
        for (int k = 0; k <= n / 2; ++k) pj[k] = phi_profile(scale * k);
        bank.phi.push_back(std::move(pj));
    }
    return bank;
}

BesovIndex::BesovIndex(real s_, real p_, real r_, bool log_)
    : s(s_), p(p_), r(r_), log_weight(log_) {
    if (!(p == 2.0 || p == inf))
        throw ConfigError("BesovIndex: p must be 2 or inf");
    if (!(r >= 1.0))
        throw ConfigError("BesovIndex: r must be in [1, inf]");
    if (log_weight && !(p == inf && r == inf))
        throw ConfigError("BesovIndex: log_weight requires p = r = inf");
}

Field block(const Field& u, int j, const DyadicFilterBank& bank) {
    if (j > bank.j_max)
        throw ConfigError("block: j = " + std::to_string(j) + " exceeds j_max = " +
                          std::to_string(bank.j_max));
    if (j <= -2) return Field::zero(u.grid());
    const rvec& c = bank.cutoff(j);
    cvec s(u.spectrum().size());
    for (size_t k = 0; k < s.size(); ++k) s[k] = c[k] * u.spectrum()[k];
    return Field::from_spectrum(u.grid(), std::move(s));
}

Field low_pass(const Field& u, int N, const DyadicFilterBank& bank) {
    if (N < 0 || N > bank.j_max + 1)
        throw ConfigError("low_pass: N out of range [0, j_max+1]");
    const real scale = std::pow(2.0, -N);
    cvec s(u.spectrum().size());
    for (size_t k = 0; k < s.size(); ++k)
        s[k] = chi_profile(scale * k) * u.spectrum()[k];
    return Field::from_spectrum(u.grid(), std::move(s));
}

std::vector<real> block_sup_norms(std::span<const cplx> spectrum,
                                  const DyadicFilterBank& bank) {
    const int n = bank.grid.size();
    std::vector<real> sup(bank.j_max + 2, 0.0);
    cvec s(n / 2 + 1);
    rvec v(n);
    for (int j = -1; j <= bank.j_max; ++j) {
        const rvec& c = bank.cutoff(j);
        for (int k = 0; k <= n / 2; ++k) s[k] = c[k] * spectrum[k];
        fft::inverse_scaled(n, s.data(), v.data());
        real m = 0.0;
        for (real x : v) m = std::max(m, std::abs(x));
        sup[j + 1] = m;
    }
    return sup;
}

real besov_from_blocks(const std::vector<real>& sup, real s, real r) {
    const real inf = BesovIndex::inf;
    if (r == inf) {
        real m = 0.0;
        for (size_t i = 0; i < sup.size(); ++i) {
            const int j = static_cast<int>(i) - 1;
            m = std::max(m, std::pow(2.0, j * s) * sup[i]);
        }
        return m;
    }
    real acc = 0.0;
    for (size_t i = 0; i < sup.size(); ++i) {
        const int j = static_cast<int>(i) - 1;
        const real term = std::pow(2.0, j * s) * sup[i];
        acc += (r == 1.0) ? term : std::pow(term, r);
    }
    return (r == 1.0) ? acc : std::pow(acc, 1.0 / r);
}

real besov_log_from_blocks(const std::vector<real>& sup, real s) {
    real m = 0.0;
    for (size_t i = 2; i < sup.size(); ++i) {  // j >= 1
        const int j = static_cast<int>(i) - 1;
        m = std::max(m, j * std::pow(2.0, j * s) * sup[i]);
    }
    return m;
}

namespace {
real lp_norm(const Field& f, real p) {
    if (p == BesovIndex::inf) return f.max_abs();
    // L^2 on [0, 2*pi): sqrt(integral of f^2) = rms * sqrt(2*pi)
    real acc = 0.0;
    for (real v : f.values()) acc += v * v;
    return std::sqrt(acc / f.size()) * std::sqrt(2.0 * std::numbers::pi);
}
}  // namespace

real besov_norm(const Field& u, const BesovIndex& idx, const DyadicFilterBank& bank) {
    if (idx.log_weight)
        throw ConfigError("besov_norm: use besov_log_norm for log-weighted spaces");
    if (idx.p == BesovIndex::inf) {
        return besov_from_blocks(block_sup_norms(u.spectrum(), bank), idx.s, idx.r);
    }
    std::vector<real> norms(bank.j_max + 2);
    for (int j = -1; j <= bank.j_max; ++j)
        norms[j + 1] = lp_norm(block(u, j, bank), idx.p);
    return besov_from_blocks(norms, idx.s, idx.r);
}

real besov_log_norm(const Field& u, real s, const DyadicFilterBank& bank) {
    return besov_log_from_blocks(block_sup_norms(u.spectrum(), bank), s);
}

}  // namespace rch
