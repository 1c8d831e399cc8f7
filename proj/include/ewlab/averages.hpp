#pragma once

// Weighted multilinear ergodic averages
//
//     A_N = (1/N) sum_{n=1}^{N} nu(n) prod_j f_j(T^{a_j n} x)
//
// along single orbits, and the finitary bilinear form on Z_J
//
//     B_N(j) = (1/N) sum_{n=1}^{N} nu(n) f(j + n) g(j - n)
//
// evaluated directly and on the Fourier side.

#include "ewlab/arith.hpp"
#include "ewlab/dynsys.hpp"
#include "ewlab/report.hpp"

#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

namespace ewlab::averages {

using Complex = std::complex<double>;

// A function on Z_J. Norms use the averaged convention ((1/J) sum |f|^p)^{1/p}.
struct FinitaryField {
    std::vector<Complex> values;

    FinitaryField() = default;
    explicit FinitaryField(std::vector<Complex> v) : values(std::move(v)) {}
    static FinitaryField constant(std::size_t modulus, Complex value);
    static FinitaryField delta(std::size_t modulus, std::size_t at);

    std::size_t modulus() const noexcept { return values.size(); }
    Complex operator[](std::size_t j) const noexcept { return values[j]; }

    double norm(double p) const;
    double sup_norm() const;
    // (tau_s f)(j) = f(j - s)
    FinitaryField shifted(std::int64_t s) const;
};

struct AverageSeries {
    std::vector<std::uint64_t> grid;
    std::vector<Complex> values;
    // sup|nu| * prod_j sup|f_j|, the pointwise bound on every summand
    double bound = 0.0;
    report::Meta meta;
};

AverageSeries prefix_series(const arith::WeightSequence& w,
                            std::span<const dynsys::OrbitSequence> orbits,
                            std::span<const std::uint64_t> grid);

// Dyadic points and I_rho points up to n_max, plus n_max itself.
std::vector<std::uint64_t> default_grid(std::uint64_t n_max, double rho);

struct ReductionCheck {
    Complex via_average;  // prefix_series over the two character orbits
    Complex via_exp_sum;  // e((k1+k2)x) (1/N) sum nu(n) e((k1 a + k2 b) n alpha)
};

ReductionCheck rotation_reduction_check(const arith::WeightSequence& w,
                                        const dynsys::SystemSpec& rotation, std::int64_t k1,
                                        std::int64_t k2, std::int64_t a, std::int64_t b,
                                        dynsys::Fixed x, std::uint64_t n);

// Running sums S_N(j) = sum_{n<=N} nu(n) f(j+n) g(j-n), advanced one n at a
// time. Both finitary_direct and the block maximal functions are built on it,
// so B_N agrees bit-for-bit between them.
class BilinearAccumulator {
public:
    BilinearAccumulator(const FinitaryField& f, const FinitaryField& g,
                        const arith::WeightSequence& w);

    std::uint64_t position() const noexcept { return n_; }
    // Advances to n = target (target < J, target <= w.limit()).
    void advance_to(std::uint64_t target);
    // B_N at the current position N >= 1.
    FinitaryField average() const;
    void average_into(std::vector<Complex>& out) const;

private:
    const FinitaryField& f_;
    const FinitaryField& g_;
    const arith::WeightSequence& w_;
    std::uint64_t n_ = 0;
    std::vector<Complex> sums_;
};

FinitaryField finitary_direct(const FinitaryField& f, const FinitaryField& g,
                              const arith::WeightSequence& w, std::uint64_t n);

// Same B_N through characters of Z_J: for every m one circular convolution
// h * (g conj(chi_m)) with h = nu 1_[1,N] / N, then
// B(j) = (1/J) sum_m F(f)(chi_m) (h * g conj(chi_m))(j) chi_m(2j),
// where F(f)(chi) = sum_n f(n) chi(-n).
FinitaryField finitary_fourier(const FinitaryField& f, const FinitaryField& g,
                               const arith::WeightSequence& w, std::uint64_t n);

struct CesaroReport {
    double rho = 0.0;
    std::uint64_t tail_start = 0;
    std::size_t tail_points = 0;
    double lacunary_tail_sup = 0.0; // sup |A_N| over N in I_rho, N >= tail_start
    double full_tail_sup = 0.0;     // sup |A_N| over all grid N >= tail_start
    double gap_term_max = 0.0;      // max bound*(P_{m+1}-P_m)/P_m over tail blocks
    double gap_term_last = 0.0;     // the same at the last complete block
    double gap_limit = 0.0;         // bound*(rho-1)
    std::size_t interpolation_violations = 0;
};

// tail_start = 0 selects ceil(sqrt(max N)).
CesaroReport cesaro_diagnostics(const AverageSeries& series, double rho,
                                std::uint64_t tail_start = 0);

void write_csv(std::ostream& out, const AverageSeries& series);

} // namespace ewlab::averages
