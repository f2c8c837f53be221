#pragma once

#include "rch/errors.hpp"

#include <cmath>
#include <numbers>

namespace rch {

/// Uniform periodic grid on [0, 2*pi): x_i = 2*pi*i/n. Wavenumbers are the
/// integers -n/2..n/2-1; the half-spectrum index k = 0..n/2 is used
/// throughout (real fields), with k = n/2 playing the Nyquist role.
class TorusGrid {
  public:
    explicit TorusGrid(int n) : n_(n) {
        if (n < 16 || (n & (n - 1)) != 0)
            throw ConfigError("TorusGrid: n must be a power of two >= 16, got " +
                              std::to_string(n));
    }

    int size() const { return n_; }
    int nyquist() const { return n_ / 2; }
    static constexpr real period() { return 2.0 * std::numbers::pi; }
    real spacing() const { return period() / n_; }
    real point(int i) const { return period() * i / n_; }

    bool operator==(const TorusGrid& o) const { return n_ == o.n_; }

  private:
    int n_;
};

}  // namespace rch
