#pragma once

// Weighted exponential sums S(theta) = sum_{n<=N} nu(n) e(n^k theta) and
// their maxima over frequency grids.

#include "ewlab/arith.hpp"
#include "ewlab/averages.hpp"
#include "ewlab/dynsys.hpp"
#include "ewlab/report.hpp"

#include <complex>
#include <cstdint>
#include <ostream>
#include <vector>

namespace ewlab::expsum {

using Complex = std::complex<double>;

inline constexpr unsigned max_power = 4;

// theta is a fixed-point fraction; n^k theta mod 1 is exact integer arithmetic.
Complex exp_sum(const arith::WeightSequence& w, std::uint64_t n, dynsys::Fixed theta,
                unsigned k);
Complex exp_sum(const arith::WeightSequence& w, std::uint64_t n, double theta, unsigned k);

struct GridMax {
    double max_norm = 0.0;     // max_m |S(m/G)| / N
    std::uint64_t argmax = 0;  // m
    double argmax_theta = 0.0; // m / G
};

// k = 1 needs G >= 4N and runs one zero-padded DFT; k >= 2 scans directly.
GridMax max_over_grid(const arith::WeightSequence& w, std::uint64_t n, unsigned k,
                      std::uint64_t grid_size);

// S(m/G) for every m, k = 1, computed by one length-G DFT (terms fold mod G).
std::vector<Complex> grid_values(const arith::WeightSequence& w, std::uint64_t first,
                                 std::uint64_t last, std::uint64_t grid_size);

struct ShortInterval {
    std::uint64_t terms = 0;   // M + 1
    double max_norm = 0.0;     // max |sum_{N<=n<=N+M}| / (M+1)
    double max_norm_by_m = 0.0; // same maximum divided by M
    double argmax_theta = 0.0;
};

std::uint64_t zhan_threshold(std::uint64_t n, double epsilon);

ShortInterval short_interval_max(const arith::WeightSequence& w, std::uint64_t n,
                                 std::uint64_t m, std::uint64_t grid_size);

struct SpectralCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};

inline constexpr double spectral_slack = 0.02;

// lhs = || j -> (1/N) sum_{n<=N} nu(n) g(j-n) chi_m(n) ||_{l2(Z_J)},
// rhs = max_over_grid(w, N, 1, 4N).max_norm * ||g||_{l2}.
SpectralCheck spectral_norm_check(const averages::FinitaryField& g,
                                  const arith::WeightSequence& w, std::uint64_t n,
                                  std::uint64_t character);
// All characters at once, sharing the grid maximum; entry m is character m.
std::vector<SpectralCheck> spectral_norm_check_all(const averages::FinitaryField& g,
                                                   const arith::WeightSequence& w,
                                                   std::uint64_t n);

struct DecayRow {
    std::uint64_t n = 0;
    unsigned k = 1;
    std::uint64_t grid_size = 0;
    double max_norm = 0.0;
    double argmax_theta = 0.0;
};

struct DecayReport {
    std::vector<DecayRow> rows;
    arith::WeightKind weight = arith::WeightKind::liouville;
    // least-squares fit max_norm ~ C / log^A N over A in {1,2,3}
    int fitted_a = 0;
    double fitted_c = 0.0;
    report::Meta meta;
};

DecayReport decay_report(const arith::WeightSequence& w, const std::vector<std::uint64_t>& ns,
                         unsigned k, const std::vector<std::uint64_t>& grid_sizes);

void fit_log_decay(DecayReport& report);

// Columns: N, k, G, max_norm, argmax_theta, fitted_A, fitted_C.
void write_csv(std::ostream& out, const DecayReport& report);

} // namespace ewlab::expsum
