#pragma once

#include "rch/aligned.hpp"

namespace rch::fft {

/// Set the FFTW thread count. Only effective before the first transform;
/// later calls are ignored (plans are cached per size). 0 picks a default
/// of min(2, hardware threads).
void set_threads(int t);
int threads();

/// Unnormalized real-to-complex DFT: out[k] = sum_i in[i] e^{-2*pi*i*k*i/n},
/// k = 0..n/2. Buffers must be 16-byte aligned (use rch::avec) and distinct.
void forward(int n, const real* in, cplx* out);

/// Unnormalized complex-to-real inverse; caller scales by 1/n.
/// Preserves the input spectrum.
void inverse(int n, const cplx* in, real* out);

/// Inverse scaled by 1/n (values of the field whose raw spectrum is `in`).
void inverse_scaled(int n, const cplx* in, real* out);

}  // namespace rch::fft
