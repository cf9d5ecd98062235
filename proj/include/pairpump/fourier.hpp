#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <new>
#include <span>
#include <vector>

#include <fftw3.h>

#include "pairpump/errors.hpp"

namespace pairpump {

namespace detail {
// The FFTW planner is not re-entrant; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

inline constexpr std::size_t kSimdAlignment = 64;

/// Allocator returning kSimdAlignment-aligned storage so FFTW can use its
/// vectorized codelets.
template <class T>
struct AlignedAllocator {
    using value_type = T;

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kSimdAlignment}));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{kSimdAlignment}); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

/// In-place unnormalized 1D complex DFT pair of fixed length.
/// forward: X_m = sum_j x_j exp(-2 pi i m j / n); backward uses the opposite sign.
/// Plans use FFTW_ESTIMATE so the chosen algorithm, and hence the rounding, is
/// reproducible from run to run. Buffers aligned to kSimdAlignment take the
/// vectorized plan; anything else falls back to an unaligned plan.
class FourierTransform {
public:
    explicit FourierTransform(std::size_t n) : n_(n) {
        if (n == 0) throw ArgumentError("FourierTransform: zero length");
        ComplexBuffer scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard lock(detail::fftw_planner_mutex());
        const int len = static_cast<int>(n);
        forward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        forward_unaligned_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        backward_unaligned_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!forward_ || !backward_ || !forward_unaligned_ || !backward_unaligned_)
            throw NumericalError("FFTW planning failed");
    }

    ~FourierTransform() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        for (auto p : {forward_, backward_, forward_unaligned_, backward_unaligned_})
            if (p) fftw_destroy_plan(p);
    }

    FourierTransform(const FourierTransform&) = delete;
    FourierTransform& operator=(const FourierTransform&) = delete;

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<std::complex<double>> data) const { run(forward_, forward_unaligned_, data); }
    void backward(std::span<std::complex<double>> data) const { run(backward_, backward_unaligned_, data); }

private:
    void run(fftw_plan aligned, fftw_plan unaligned, std::span<std::complex<double>> data) const {
        if (data.size() != n_) throw ArgumentError("FourierTransform: length mismatch");
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        const bool simd_ok = reinterpret_cast<std::uintptr_t>(p) % kSimdAlignment == 0;
        fftw_execute_dft(simd_ok ? aligned : unaligned, p, p);
    }

    std::size_t n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
    fftw_plan forward_unaligned_ = nullptr;
    fftw_plan backward_unaligned_ = nullptr;
};

} // namespace pairpump
