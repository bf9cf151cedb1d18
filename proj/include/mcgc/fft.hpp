#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <mutex>
#include <new>
#include <vector>

#include <fftw3.h>

namespace mcgc::fft {

// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

namespace detail {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

/**
 * Plans keyed by (size, columns), created once and kept for the life of the
 * process. Planning needs the lock; the new-array execute functions used
 * with these plans may run concurrently.
 */
inline PlanPair cached_plans(std::size_t size, std::size_t columns) {
    static std::map<std::pair<std::size_t, std::size_t>, PlanPair> cache;
    std::lock_guard lock(planner_mutex());
    const auto key = std::make_pair(size, columns);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const std::size_t bins = size / 2 + 1;
    auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * size * columns));
    auto* spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins * columns));
    if (real == nullptr || spec == nullptr) {
        fftw_free(real);
        fftw_free(spec);
        throw std::bad_alloc();
    }
    const int n[] = {static_cast<int>(size)};
    const int howmany = static_cast<int>(columns);
    PlanPair plans;
    plans.forward = fftw_plan_many_dft_r2c(1, n, howmany, real, nullptr, 1, static_cast<int>(size), spec, nullptr, 1,
                                           static_cast<int>(bins), FFTW_ESTIMATE);
    plans.backward = fftw_plan_many_dft_c2r(1, n, howmany, spec, nullptr, 1, static_cast<int>(bins), real, nullptr, 1,
                                            static_cast<int>(size), FFTW_ESTIMATE);
    fftw_free(real);
    fftw_free(spec);
    if (plans.forward == nullptr || plans.backward == nullptr) throw std::runtime_error("FFTW planning failed");
    cache.emplace(key, plans);
    return plans;
}

}  // namespace detail

namespace detail {

/**
 * Per-thread cache of FFTW-aligned buffers. Large transforms are called
 * repeatedly with the same sizes, and returning their buffers to the system
 * between calls makes every call pay for fresh pages.
 */
class BufferPool {
public:
    static constexpr std::size_t max_cached_bytes = std::size_t{256} << 20;

    BufferPool() = default;
    BufferPool(const BufferPool&) = delete;
    BufferPool& operator=(const BufferPool&) = delete;
    ~BufferPool() {
        for (auto& [bytes, ptr] : free_) fftw_free(ptr);
    }

    void* take(std::size_t bytes) {
        if (auto it = free_.find(bytes); it != free_.end()) {
            void* ptr = it->second;
            free_.erase(it);
            cached_ -= bytes;
            return ptr;
        }
        void* ptr = fftw_malloc(bytes);
        if (ptr == nullptr) throw std::bad_alloc();
        return ptr;
    }

    void give(void* ptr, std::size_t bytes) noexcept {
        if (ptr == nullptr) return;
        if (cached_ + bytes > max_cached_bytes) {
            fftw_free(ptr);
            return;
        }
        try {
            free_.emplace(bytes, ptr);
            cached_ += bytes;
        } catch (...) {
            fftw_free(ptr);
        }
    }

private:
    std::multimap<std::size_t, void*> free_;
    std::size_t cached_ = 0;
};

inline BufferPool& buffer_pool() {
    thread_local BufferPool pool;
    return pool;
}

}  // namespace detail

/**
 * Batched real DFT of `columns` real sequences of length `size`, stored
 * column-major. forward() maps the input columns to size/2 + 1 complex
 * coefficients each and leaves the input intact; backward() maps the
 * coefficients to the separate output columns, unnormalized (scaled by
 * `size`) as in FFTW, and overwrites the coefficients.
 */
class RealColumns {
public:
    RealColumns(std::size_t size, std::size_t columns)
        : size_(size), columns_(columns), bins_(size / 2 + 1), plans_(detail::cached_plans(size, columns)) {
        auto& pool = detail::buffer_pool();
        try {
            input_ = static_cast<double*>(pool.take(real_bytes()));
            output_ = static_cast<double*>(pool.take(real_bytes()));
            spec_ = static_cast<fftw_complex*>(pool.take(spec_bytes()));
        } catch (...) {
            release_buffers();
            throw;
        }
    }

    RealColumns(const RealColumns&) = delete;
    RealColumns& operator=(const RealColumns&) = delete;

    ~RealColumns() { release_buffers(); }

    std::size_t size() const noexcept { return size_; }
    std::size_t bins() const noexcept { return bins_; }

    double* column(std::size_t j) noexcept { return input_ + j * size_; }
    const double* result(std::size_t j) const noexcept { return output_ + j * size_; }
    std::complex<double>* spectrum(std::size_t j) noexcept {
        return reinterpret_cast<std::complex<double>*>(spec_ + j * bins_);
    }

    void forward() { fftw_execute_dft_r2c(plans_.forward, input_, spec_); }
    void backward() { fftw_execute_dft_c2r(plans_.backward, spec_, output_); }

private:
    std::size_t real_bytes() const noexcept { return sizeof(double) * size_ * columns_; }
    std::size_t spec_bytes() const noexcept { return sizeof(fftw_complex) * bins_ * columns_; }

    void release_buffers() noexcept {
        auto& pool = detail::buffer_pool();
        pool.give(input_, real_bytes());
        pool.give(output_, real_bytes());
        pool.give(spec_, spec_bytes());
        input_ = output_ = nullptr;
        spec_ = nullptr;
    }

    std::size_t size_, columns_, bins_;
    detail::PlanPair plans_;
    double* input_ = nullptr;
    double* output_ = nullptr;
    fftw_complex* spec_ = nullptr;
};

/// Full-length DFT of a real sequence, X_k = sum_j x_j exp(-2 pi i jk/N).
inline std::vector<std::complex<double>> dft(const std::vector<double>& x) {
    const std::size_t N = x.size();
    RealColumns plan(N, 1);
    std::copy(x.begin(), x.end(), plan.column(0));
    plan.forward();
    std::vector<std::complex<double>> out(N);
    const auto* spec = plan.spectrum(0);
    for (std::size_t k = 0; k < plan.bins(); ++k) out[k] = spec[k];
    for (std::size_t k = plan.bins(); k < N; ++k) out[k] = std::conj(spec[N - k]);
    return out;
}

/// Inverse of dft() for Hermitian input; returns the real part.
inline std::vector<double> inverse_dft_real(const std::vector<std::complex<double>>& X) {
    const std::size_t N = X.size();
    RealColumns plan(N, 1);
    auto* spec = plan.spectrum(0);
    for (std::size_t k = 0; k < plan.bins(); ++k) spec[k] = X[k];
    plan.backward();
    std::vector<double> out(plan.result(0), plan.result(0) + N);
    for (auto& v : out) v /= static_cast<double>(N);
    return out;
}

}  // namespace mcgc::fft
