#include "rch/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <thread>

namespace rch::fft {

namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex g_mutex;
std::map<int, PlanPair> g_plans;
int g_threads = 0;
bool g_started = false;

// Plans are created once per size with FFTW_ESTIMATE: planning is then a
// deterministic function of (n, threads), which keeps repeated runs
// bit-identical. Probe buffers are fftw_malloc'd (aligned); execution uses
// the new-array interface on caller buffers with the same alignment.
const PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(g_mutex);
    auto it = g_plans.find(n);
    if (it != g_plans.end()) return it->second;

    if (!g_started) {
        fftw_init_threads();
        if (g_threads <= 0) {
            unsigned hw = std::thread::hardware_concurrency();
            g_threads = hw >= 2 ? 2 : 1;
        }
        g_started = true;
    }
    fftw_plan_with_nthreads(g_threads);

    real* pr = fftw_alloc_real(n);
    cplx* pc = reinterpret_cast<cplx*>(fftw_alloc_complex(n / 2 + 1));
    PlanPair pp;
    pp.r2c = fftw_plan_dft_r2c_1d(n, pr, reinterpret_cast<fftw_complex*>(pc),
                                  FFTW_ESTIMATE);
    pp.c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(pc), pr,
                                  FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    fftw_free(pr);
    fftw_free(pc);
    return g_plans.emplace(n, pp).first->second;
}

}  // namespace

void set_threads(int t) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_started && t > 0) g_threads = t;
}

int threads() {
    std::lock_guard<std::mutex> lock(g_mutex);
    return g_threads;
}

void forward(int n, const real* in, cplx* out) {
    const PlanPair& pp = plans_for(n);
    fftw_execute_dft_r2c(pp.r2c, const_cast<real*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void inverse(int n, const cplx* in, real* out) {
    const PlanPair& pp = plans_for(n);
    fftw_execute_dft_c2r(pp.c2r,
                         reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         out);
}

void inverse_scaled(int n, const cplx* in, real* out) {
    inverse(n, in, out);
    const real s = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] *= s;
}

}  // namespace rch::fft
