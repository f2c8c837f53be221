#include "rch/spectral_ops.hpp"

#include "rch/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rch {

namespace {
constexpr real two_pi = 2.0 * std::numbers::pi;

real wrap(real x) {
    real y = std::fmod(x, two_pi);
    return y < 0 ? y + two_pi : y;
}
}  // namespace

int dealias_cutoff(int n, real fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("dealias: fraction must be in (0, 1]");
    return static_cast<int>(std::floor(fraction * (n / 2) + 1e-9));
}

Field differentiate(const Field& u) {
    const int n = u.size();
    cvec s(n / 2 + 1);
    kernels::derivative(u.spectrum(), s, n);
    return Field::from_spectrum(u.grid(), std::move(s));
}

Field helmholtz_inverse(const Field& u) {
    const int n = u.size();
    cvec s(n / 2 + 1);
    kernels::helmholtz(u.spectrum(), s, n);
    return Field::from_spectrum(u.grid(), std::move(s));
}

Field dealias(const Field& u, real fraction) {
    const int n = u.size();
    const int kcut = dealias_cutoff(n, fraction);
    cvec s(u.spectrum().begin(), u.spectrum().end());
    kernels::truncate(s, n, kcut);
    return Field::from_spectrum(u.grid(), std::move(s));
}

Field multiply_dealias(const Field& a, const Field& b, real fraction) {
    if (!(a.grid() == b.grid())) throw ConfigError("multiply_dealias: grid mismatch");
    rvec prod(a.size());
    for (int i = 0; i < a.size(); ++i) prod[i] = a.values()[i] * b.values()[i];
    return dealias(Field::from_values(a.grid(), std::move(prod)), fraction);
}

// ---------------------------------------------------------------------------
// Off-grid evaluation
// ---------------------------------------------------------------------------

namespace {

// Direct summation of the Fourier series: exact, O(n) per point.
real eval_direct(std::span<const cplx> s, int n, real pos) {
    real acc = s[0].real();
    for (int k = 1; k < n / 2; ++k) {
        acc += 2.0 * (s[k].real() * std::cos(k * pos) - s[k].imag() * std::sin(k * pos));
    }
    acc += s[n / 2].real() * std::cos((n / 2) * pos);
    return acc / n;
}

constexpr int kLagrangePoints = 12;

// Binomial barycentric weights for 12 equispaced nodes.
constexpr real kBaryWeight[kLagrangePoints] = {
    1, -11, 55, -165, 330, -462, 462, -330, 165, -55, 11, -1};

int next_pow2(int v) {
    int p = 1;
    while (p < v) p *= 2;
    return p;
}

}  // namespace

FineGrid::FineGrid(std::span<const cplx> spectrum, int n, int band) {
    // 24x oversampling of the band keeps the 12-point stencil error ~1e-13.
    m_ = next_pow2(std::max(256, 24 * std::max(band, 1)));
    cvec big(m_ / 2 + 1, cplx(0, 0));
    const int keep = std::min(n / 2, m_ / 2);
    for (int k = 0; k <= keep; ++k) big[k] = spectrum[k] * (real(m_) / n);
    w_.resize(m_);
    fft::inverse_scaled(m_, big.data(), w_.data());
}

real FineGrid::eval(real position) const {
    const real t = wrap(position) * (m_ / two_pi);
    const int cell = static_cast<int>(std::floor(t));
    const real frac = t - cell;
    // Nodes cell-5 .. cell+6 (12 points); distances in grid units.
    real num = 0.0, den = 0.0;
    for (int j = 0; j < kLagrangePoints; ++j) {
        const int idx = (cell - 5 + j) & (m_ - 1);
        const real d = frac - (j - 5);
        if (std::abs(d) < 1e-12) return w_[idx];
        const real q = kBaryWeight[j] / d;
        num += q * w_[idx];
        den += q;
    }
    return num / den;
}

FineGrid FineGrid::blend(const FineGrid& a, const FineGrid& b, real t) {
    if (a.m_ != b.m_) throw ConfigError("FineGrid::blend: size mismatch");
    FineGrid out;
    out.m_ = a.m_;
    out.w_.resize(a.w_.size());
    for (size_t i = 0; i < a.w_.size(); ++i)
        out.w_[i] = (1.0 - t) * a.w_[i] + t * b.w_[i];
    return out;
}

std::vector<real> evaluate_offgrid(const Field& u, std::span<const real> positions) {
    const int n = u.size();
    std::vector<real> out(positions.size());
    const long long work = static_cast<long long>(n) * positions.size();
    if (work <= (1 << 22)) {
        for (size_t i = 0; i < positions.size(); ++i)
            out[i] = eval_direct(u.spectrum(), n, wrap(positions[i]));
    } else {
        FineGrid fg(u);
        for (size_t i = 0; i < positions.size(); ++i) out[i] = fg.eval(positions[i]);
    }
    return out;
}

}  // namespace rch
