#include "rch/field.hpp"

#include "rch/fft.hpp"

#include <algorithm>
#include <cmath>

namespace rch {

Field Field::from_values(const TorusGrid& grid, rvec values) {
    if (static_cast<int>(values.size()) != grid.size())
        throw ConfigError("Field::from_values: size mismatch");
    cvec spec(grid.size() / 2 + 1);
    fft::forward(grid.size(), values.data(), spec.data());
    return Field(grid, std::move(values), std::move(spec));
}

Field Field::from_spectrum(const TorusGrid& grid, cvec spectrum) {
    if (static_cast<int>(spectrum.size()) != grid.size() / 2 + 1)
        throw ConfigError("Field::from_spectrum: size mismatch");
    // Real-valuedness: k=0 and Nyquist carry no imaginary part.
    spectrum[0] = cplx(spectrum[0].real(), 0.0);
    spectrum[grid.size() / 2] = cplx(spectrum[grid.size() / 2].real(), 0.0);
    rvec vals(grid.size());
    fft::inverse_scaled(grid.size(), spectrum.data(), vals.data());
    return Field(grid, std::move(vals), std::move(spectrum));
}

Field Field::sample(const TorusGrid& grid, const std::function<real(real)>& f) {
    rvec vals(grid.size());
    for (int i = 0; i < grid.size(); ++i) vals[i] = f(grid.point(i));
    return from_values(grid, std::move(vals));
}

Field Field::zero(const TorusGrid& grid) {
    return Field(grid, rvec(grid.size(), 0.0), cvec(grid.size() / 2 + 1, cplx(0, 0)));
}

real Field::max_abs() const {
    real m = 0.0;
    for (real v : values_) m = std::max(m, std::abs(v));
    return m;
}

real Field::mean() const { return spectrum_[0].real() / grid_.size(); }

int Field::band() const {
    for (int k = grid_.size() / 2; k > 0; --k)
        if (spectrum_[k] != cplx(0, 0)) return k;
    return 0;
}

Field Field::operator+(const Field& o) const {
    if (!(grid_ == o.grid_)) throw ConfigError("Field: grid mismatch");
    rvec v(values_.size());
    cvec s(spectrum_.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
    for (size_t i = 0; i < s.size(); ++i) s[i] = spectrum_[i] + o.spectrum_[i];
    return Field(grid_, std::move(v), std::move(s));
}

Field Field::operator-(const Field& o) const {
    if (!(grid_ == o.grid_)) throw ConfigError("Field: grid mismatch");
    rvec v(values_.size());
    cvec s(spectrum_.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
    for (size_t i = 0; i < s.size(); ++i) s[i] = spectrum_[i] - o.spectrum_[i];
    return Field(grid_, std::move(v), std::move(s));
}

Field Field::scaled(real a) const {
    rvec v(values_.size());
    cvec s(spectrum_.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = a * values_[i];
    for (size_t i = 0; i < s.size(); ++i) s[i] = a * spectrum_[i];
    return Field(grid_, std::move(v), std::move(s));
}

}  // namespace rch
