#pragma once

#include <burstlab/error.hpp>

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>

namespace burstlab::fft {

namespace detail {

/// FFTW's planner is not thread-safe; execution of distinct plans is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan p) const noexcept {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

}  // namespace detail

/// Aligned buffer owned by FFTW's allocator.
template <class T>
class Buffer {
public:
    explicit Buffer(std::size_t n) : n_(n), data_(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
        if (!data_) throw std::bad_alloc();
    }
    T* data() noexcept { return data_.get(); }
    const T* data() const noexcept { return data_.get(); }
    std::size_t size() const noexcept { return n_; }
    T& operator[](std::size_t i) noexcept { return data_.get()[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_.get()[i]; }
    std::span<T> span() noexcept { return {data_.get(), n_}; }

private:
    std::size_t n_;
    std::unique_ptr<T, detail::FftwFree> data_;
};

using Complex = std::complex<double>;

/// In-place complex DFT of fixed length, X_k = sum_j x_j exp(-2 pi i jk/n).
/// FFTW_ESTIMATE keeps plans (and therefore output bits) independent of timing.
class ComplexTransform {
public:
    explicit ComplexTransform(std::size_t n) : buf_(n) {
        std::lock_guard lock(detail::planner_mutex());
        auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
        plan_.reset(fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD, FFTW_ESTIMATE));
        if (!plan_) throw NumericError("FFTW failed to create a complex plan");
    }
    std::span<Complex> data() noexcept { return buf_.span(); }
    void execute() noexcept { fftw_execute(plan_.get()); }

private:
    Buffer<Complex> buf_;
    detail::PlanHandle plan_;
};

/// Real-to-half-complex DFT of fixed length n (n/2 + 1 outputs).
class RealTransform {
public:
    explicit RealTransform(std::size_t n) : in_(n), out_(n / 2 + 1) {
        std::lock_guard lock(detail::planner_mutex());
        plan_.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.data(),
                                         reinterpret_cast<fftw_complex*>(out_.data()), FFTW_ESTIMATE));
        if (!plan_) throw NumericError("FFTW failed to create a real plan");
    }
    std::span<double> input() noexcept { return in_.span(); }
    std::span<const Complex> output() const noexcept { return {out_.data(), out_.size()}; }
    void execute() noexcept { fftw_execute(plan_.get()); }

private:
    Buffer<double> in_;
    Buffer<Complex> out_;
    detail::PlanHandle plan_;
};

}  // namespace burstlab::fft
