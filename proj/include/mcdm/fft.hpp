// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>

namespace mcdm::detail {

// FFTW planning is not thread-safe; execution through the new-array
// interface is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Unnormalized forward/backward DFT pair of a fixed length.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("Fft: zero length");
        std::lock_guard lock(fftw_planner_mutex());
        fftw_complex* buf = fftw_alloc_complex(n);
        const int len = static_cast<int>(n);
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, flags);
        fftw_free(buf);
        if (!forward_ || !backward_) throw std::runtime_error("Fft: FFTW planning failed");
    }

    ~Fft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }

    /// out[k] = sum_n in[n] e^{-j2pi kn/N}. `in` and `out` may alias.
    void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
        run(forward_, in, out);
    }

    /// out[n] = sum_k in[k] e^{+j2pi kn/N}, no 1/N.
    void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
        run(backward_, in, out);
    }

private:
    void run(fftw_plan plan, std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) const {
        if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("Fft: length mismatch");
        // Plans are in-place, so the new-array call must be in-place too.
        if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
        // std::complex<double> is layout-compatible with fftw_complex.
        auto* buf = reinterpret_cast<fftw_complex*>(out.data());
        fftw_execute_dft(plan, buf, buf);
    }

    std::size_t n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace mcdm::detail
