#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ewlab::fft {

enum class Direction {
    forward,  // X(m) = sum_n x(n) e^{-2 pi i m n / size}
    backward, // X(m) = sum_n x(n) e^{+2 pi i m n / size}, unnormalized
};

// One-dimensional complex DFT of a fixed size. Plans are built with
// FFTW_ESTIMATE so results are bit-reproducible from run to run.
class Plan {
public:
    Plan(std::size_t size, Direction direction);
    ~Plan();
    Plan(Plan&&) noexcept;
    Plan& operator=(Plan&&) noexcept;
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    std::size_t size() const noexcept { return size_; }

    // in and out must both have size() elements; they may alias.
    void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

private:
    struct Impl;
    std::size_t size_;
    std::unique_ptr<Impl> impl_;
};

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> in,
                                            Direction direction);

} // namespace ewlab::fft
