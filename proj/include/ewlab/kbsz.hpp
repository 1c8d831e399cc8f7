#pragma once

// Prime-dilate correlations (1/N) sum F(np) conj(F(nq)) and weighted averages
// (1/N) sum nu(n) F(n): the two sides of the Katai-Bourgain-Sarnak-Ziegler
// orthogonality criterion, evaluated at finite N.

#include "ewlab/arith.hpp"
#include "ewlab/dynsys.hpp"
#include "ewlab/report.hpp"

#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace ewlab::kbsz {

using Complex = std::complex<double>;

bool is_prime(std::uint64_t n);
std::vector<std::uint32_t> prime_window(std::uint32_t lo, std::uint32_t hi);

// F is indexed from 1: sequence[n-1] = F(n).
Complex prime_pair_correlation(std::span<const Complex> sequence, std::uint64_t p,
                               std::uint64_t q, std::uint64_t n);

struct CriterionOptions {
    std::uint32_t p_min = 11;
    std::uint32_t p_max = 97;
    double threshold = 0.1;        // reporting heuristic, not a theorem
    std::uint64_t correlation_n = 0; // 0: use the last grid point
};

struct CorrelationReport {
    std::string sequence;
    std::string label;
    std::vector<std::uint32_t> primes;
    std::uint64_t correlation_n = 0;
    std::vector<Complex> matrix; // row-major, c(p_i, p_j, correlation_n)
    std::vector<std::uint64_t> grid;
    std::vector<Complex> weighted; // w(N) on the grid
    double threshold = 0.0;
    double max_offdiagonal = 0.0;
    bool hypothesis_plausible = false;
    double aperiodicity = 0.0; // max over (a,b) of |(1/N) sum nu(an+b)|
    bool aperiodic_plausible = false;
    report::Meta config;

    Complex at(std::size_t i, std::size_t j) const { return matrix[i * primes.size() + j]; }
};

CorrelationReport criterion_report(std::span<const Complex> sequence, std::string descriptor,
                                   const arith::WeightSequence& w,
                                   std::span<const std::uint64_t> grid,
                                   const CriterionOptions& options = {});

// max over 1 <= a <= max_a, 0 <= b <= max_b of |(1/N) sum_{n<=N} nu(an+b)|, N = (limit-b)/a.
double aperiodicity(const arith::WeightSequence& w, unsigned max_a = 8, unsigned max_b = 8);

// F(n) = prod_j f_j(T^{a_j n} x) for distinct positive powers a_j.
std::vector<Complex> product_observable(const dynsys::SystemSpec& sys,
                                        std::span<const dynsys::Observable> observables,
                                        std::span<const std::int64_t> powers, dynsys::State x,
                                        std::uint64_t length);

// F(n) = prod_j f_j(T_j^n x) for rotations T_j with distinct angles.
CorrelationReport commuting_experiment(std::span<const dynsys::SystemSpec> rotations,
                                       std::span<const dynsys::Observable> observables,
                                       dynsys::State x, const arith::WeightSequence& w,
                                       std::span<const std::uint64_t> grid,
                                       const CriterionOptions& options = {});

void write_json(std::ostream& out, const CorrelationReport& report);

} // namespace ewlab::kbsz
