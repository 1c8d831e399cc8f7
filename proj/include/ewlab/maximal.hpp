#pragma once

// Lacunary block maximal functions on Z_J and the sqrt(K) inequality.

#include "ewlab/averages.hpp"
#include "ewlab/dynsys.hpp"

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

namespace ewlab::maximal {

using averages::FinitaryField;

// I_rho = { ceil(rho^n) : n >= 0 } intersected with [1, n_max].
struct LacunaryGrid {
    double rho = 2.0;
    std::vector<std::uint64_t> points;

    // N_k for k = 1, 2, ...: the k-th element of I_rho.
    std::uint64_t block_point(std::size_t k) const;
    // Consecutive pairs (N_k, N_{k+1}).
    std::vector<std::pair<std::uint64_t, std::uint64_t>> blocks() const;
    bool contains(std::uint64_t n) const;
};

LacunaryGrid lacunary_grid(double rho, std::uint64_t n_max);

// m_{N0,N1}(f,g)(j) = sup over N in I_rho cap [N0, N1] of |B_N(j) - B_{N0}(j)|.
FinitaryField block_maximal(const FinitaryField& f, const FinitaryField& g,
                            const arith::WeightSequence& w, const LacunaryGrid& grid,
                            std::uint64_t n0, std::uint64_t n1);

struct MaximalStats {
    double rho = 0.0;
    std::size_t blocks = 0; // K
    std::vector<double> block_l1;         // ||m_{N_k,N_{k+1}}||_{l1}, k = 1..K
    std::vector<double> cumulative_ratio; // ratio for K' = 1..K
    double f_norm = 0.0;
    double g_norm = 0.0;
    double ratio = 0.0; // sum_k block_l1 / (sqrt(K) ||f||_2 ||g||_2)
};

MaximalStats sqrtK_ratio(const FinitaryField& f, const FinitaryField& g,
                         const arith::WeightSequence& w, double rho, std::size_t k);

struct TransferenceCheck {
    double seq_side = 0.0; // ||m_{N0,N1}(f,g)||_{l1} from the sequence-space form
    double dyn_side = 0.0; // same quantity from orbits of the shift on Z_J
};

TransferenceCheck transference_check(const dynsys::SystemSpec& shift, const FinitaryField& f,
                                     const FinitaryField& g, const arith::WeightSequence& w,
                                     double rho, std::uint64_t n0, std::uint64_t n1);

// Columns: trial, rho, K, block, block_l1, cumulative_ratio.
void write_csv(std::ostream& out, const std::vector<MaximalStats>& trials,
               const report::Meta& meta);

} // namespace ewlab::maximal
