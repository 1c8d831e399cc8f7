#include "ewlab/fft.hpp"

#include "ewlab/error.hpp"

#include <algorithm>
#include <fftw3.h>

namespace ewlab::fft {

struct Plan::Impl {
    fftw_complex* buffer = nullptr;
    fftw_plan plan = nullptr;

    ~Impl()
    {
        if (plan)
            fftw_destroy_plan(plan);
        if (buffer)
            fftw_free(buffer);
    }
};

Plan::Plan(std::size_t size, Direction direction) : size_(size), impl_(std::make_unique<Impl>())
{
    if (size == 0)
        throw ValidationError(ErrorKind::size, "DFT size must be positive");
    impl_->buffer = fftw_alloc_complex(size);
    if (!impl_->buffer)
        throw std::bad_alloc();
    const int sign = direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    impl_->plan = fftw_plan_dft_1d(static_cast<int>(size), impl_->buffer, impl_->buffer, sign,
                                   FFTW_ESTIMATE);
}

Plan::~Plan() = default;
Plan::Plan(Plan&&) noexcept = default;
Plan& Plan::operator=(Plan&&) noexcept = default;

void Plan::execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out)
{
    if (in.size() != size_ || out.size() != size_)
        throw ValidationError(ErrorKind::length, "DFT buffer does not match plan size");
    auto* buf = reinterpret_cast<std::complex<double>*>(impl_->buffer);
    std::copy(in.begin(), in.end(), buf);
    fftw_execute(impl_->plan);
    std::copy(buf, buf + size_, out.begin());
}

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> in,
                                            Direction direction)
{
    std::vector<std::complex<double>> out(in.size());
    Plan plan(in.size(), direction);
    plan.execute(in, out);
    return out;
}

} // namespace ewlab::fft
