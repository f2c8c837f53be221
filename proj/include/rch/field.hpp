#pragma once

#include "rch/aligned.hpp"
#include "rch/torus_grid.hpp"

#include <functional>
#include <span>

namespace rch {

/// Real scalar function on a TorusGrid, carrying both its samples and its
/// raw half-spectrum u_hat(k), k = 0..n/2 (unnormalized DFT; negative modes
/// implied by conjugate symmetry). Immutable once constructed: every
/// operation returns a new Field, so sharing across threads is safe.
class Field {
  public:
    static Field from_values(const TorusGrid& grid, rvec values);
    static Field from_spectrum(const TorusGrid& grid, cvec spectrum);
    /// Sample a function at the grid points.
    static Field sample(const TorusGrid& grid, const std::function<real(real)>& f);
    static Field zero(const TorusGrid& grid);

    const TorusGrid& grid() const { return grid_; }
    int size() const { return grid_.size(); }
    const rvec& values() const { return values_; }
    const cvec& spectrum() const { return spectrum_; }

    real max_abs() const;
    real mean() const;
    /// Largest k with a (exactly) nonzero spectral coefficient; 0 for the
    /// zero field and pure constants.
    int band() const;

    Field operator+(const Field& o) const;
    Field operator-(const Field& o) const;
    Field scaled(real a) const;

  private:
    Field(TorusGrid grid, rvec values, cvec spectrum)
        : grid_(grid), values_(std::move(values)), spectrum_(std::move(spectrum)) {}

    TorusGrid grid_;
    rvec values_;
    cvec spectrum_;
};

}  // namespace rch
