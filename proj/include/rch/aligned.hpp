#pragma once

#include <complex>
#include <cstdlib>
#include <new>
#include <vector>

namespace rch {

using real = double;
using cplx = std::complex<double>;

/// 64-byte aligned allocator so vectors can be handed straight to FFTW's
/// new-array execute interface (plans are created on aligned buffers).
template <class T>
struct AlignedAlloc {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    AlignedAlloc() noexcept = default;
    template <class U>
    AlignedAlloc(const AlignedAlloc<U>&) noexcept {}

    T* allocate(std::size_t n) {
        if (n == 0) return nullptr;
        void* p = std::aligned_alloc(alignment, round_up(n * sizeof(T)));
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { std::free(p); }

    template <class U>
    bool operator==(const AlignedAlloc<U>&) const noexcept { return true; }

  private:
    static std::size_t round_up(std::size_t bytes) {
        return (bytes + alignment - 1) / alignment * alignment;
    }
};

template <class T>
using avec = std::vector<T, AlignedAlloc<T>>;

using rvec = avec<real>;
using cvec = avec<cplx>;

}  // namespace rch
