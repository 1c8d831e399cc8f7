#include "ewlab/maximal.hpp"

#include "ewlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace ewlab::maximal {

std::uint64_t LacunaryGrid::block_point(std::size_t k) const
{
    if (k < 1 || k > points.size())
        throw ValidationError(ErrorKind::range,
                              fmt::format("N_{} requested but I_rho has {} points", k, points.size()));
    return points[k - 1];
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> LacunaryGrid::blocks() const
{
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        out.emplace_back(points[i], points[i + 1]);
    return out;
}

bool LacunaryGrid::contains(std::uint64_t n) const
{
    return std::binary_search(points.begin(), points.end(), n);
}

LacunaryGrid lacunary_grid(double rho, std::uint64_t n_max)
{
    if (!(rho > 1.0) || !std::isfinite(rho))
        throw ValidationError(ErrorKind::validation, fmt::format("rho={} must be a finite real > 1", rho));
    if (n_max < 1)
        throw ValidationError(ErrorKind::validation, "N_max must be >= 1");
    LacunaryGrid grid;
    grid.rho = rho;
    for (int e = 0;; ++e) {
        const double power = std::pow(rho, e);
        // shave relative 1e-12 so an exact integer power with upward float error stays put
        const double up = std::ceil(power * (1.0 - 1e-12));
        if (up > static_cast<double>(n_max))
            break;
        const auto point = static_cast<std::uint64_t>(up);
        if (grid.points.empty() || point > grid.points.back())
            grid.points.push_back(point);
    }
    return grid;
}

namespace {

void check_endpoints(const FinitaryField& f, const LacunaryGrid& grid, std::uint64_t n0,
                     std::uint64_t n1)
{
    if (!grid.contains(n0) || !grid.contains(n1))
        throw ValidationError(ErrorKind::validation,
                              fmt::format("block endpoints N0={}, N1={} must lie in I_rho (rho={})",
                                          n0, n1, grid.rho));
    if (n1 < n0)
        throw ValidationError(ErrorKind::validation, fmt::format("N1={} < N0={}", n1, n0));
    if (n1 >= f.modulus())
        throw ValidationError(ErrorKind::window,
                              fmt::format("N1={} >= J={}: the window would wrap around Z_J", n1,
                                          f.modulus()));
}

double mean(const std::vector<double>& v)
{
    double total = 0.0;
    for (double x : v)
        total += x;
    return v.empty() ? 0.0 : total / static_cast<double>(v.size());
}

// sup over grid points N in [n0, n1] of |B_N - B_{n0}|, pointwise; acc must sit below n0.
std::vector<double> sweep_block(averages::BilinearAccumulator& acc, const LacunaryGrid& grid,
                                std::uint64_t n0, std::uint64_t n1)
{
    std::vector<averages::Complex> base, current;
    acc.advance_to(n0);
    acc.average_into(base);
    std::vector<double> sup(base.size(), 0.0);
    for (auto n : grid.points) {
        if (n <= n0 || n > n1)
            continue;
        acc.advance_to(n);
        acc.average_into(current);
        for (std::size_t j = 0; j < sup.size(); ++j)
            sup[j] = std::max(sup[j], std::abs(current[j] - base[j]));
    }
    return sup;
}

} // namespace

FinitaryField block_maximal(const FinitaryField& f, const FinitaryField& g,
                            const arith::WeightSequence& w, const LacunaryGrid& grid,
                            std::uint64_t n0, std::uint64_t n1)
{
    check_endpoints(f, grid, n0, n1);
    averages::BilinearAccumulator acc(f, g, w);
    const auto sup = sweep_block(acc, grid, n0, n1);
    return FinitaryField(std::vector<averages::Complex>(sup.begin(), sup.end()));
}

MaximalStats sqrtK_ratio(const FinitaryField& f, const FinitaryField& g,
                         const arith::WeightSequence& w, double rho, std::size_t k)
{
    if (k < 1)
        throw ValidationError(ErrorKind::validation, "K must be >= 1");
    if (f.modulus() < 2)
        throw ValidationError(ErrorKind::validation, "finitary modulus J must be >= 2");
    const auto grid = lacunary_grid(rho, f.modulus() - 1);
    if (grid.points.size() < k + 1)
        throw ValidationError(ErrorKind::validation,
                              fmt::format("K={} needs {} points of I_rho below J={}, only {} exist", k,
                                          k + 1, f.modulus(), grid.points.size()));

    MaximalStats stats;
    stats.rho = rho;
    stats.blocks = k;
    stats.f_norm = f.norm(2.0);
    stats.g_norm = g.norm(2.0);
    const double scale = stats.f_norm * stats.g_norm;

    // One accumulator for all blocks: each block starts where the previous ended.
    averages::BilinearAccumulator acc(f, g, w);
    double cumulative = 0.0;
    for (std::size_t block = 1; block <= k; ++block) {
        const auto sup = sweep_block(acc, grid, grid.block_point(block), grid.block_point(block + 1));
        const double l1 = mean(sup);
        stats.block_l1.push_back(l1);
        cumulative += l1;
        const double denom = std::sqrt(static_cast<double>(block)) * scale;
        stats.cumulative_ratio.push_back(denom > 0.0 ? cumulative / denom : 0.0);
    }
    stats.ratio = stats.cumulative_ratio.back();
    return stats;
}

TransferenceCheck transference_check(const dynsys::SystemSpec& shift, const FinitaryField& f,
                                     const FinitaryField& g, const arith::WeightSequence& w,
                                     double rho, std::uint64_t n0, std::uint64_t n1)
{
    if (!shift.is_cyclic() || shift.modulus() != f.modulus() || shift.modulus() != g.modulus())
        throw ValidationError(ErrorKind::validation,
                              fmt::format("transference needs cyclic_shift matching the fields: "
                                          "system {}, fields J={} and J={}",
                                          shift.description(), f.modulus(), g.modulus()));
    const auto grid = lacunary_grid(rho, f.modulus() - 1);
    check_endpoints(f, grid, n0, n1);

    TransferenceCheck check;
    {
        const auto sup = block_maximal(f, g, w, grid, n0, n1);
        double total = 0.0;
        for (const auto& v : sup.values)
            total += v.real();
        check.seq_side = total / static_cast<double>(f.modulus());
    }

    // (Z_J, S, uniform) as a dynamical system: averages along each orbit, then
    // integrate the maximal function over x.
    const auto obs_f = dynsys::Observable::table(f.values);
    const auto obs_g = dynsys::Observable::table(g.values);
    std::vector<std::uint64_t> points;
    for (auto p : grid.points)
        if (p >= n0 && p <= n1)
            points.push_back(p);

    double total = 0.0;
    for (std::uint64_t x = 0; x < f.modulus(); ++x) {
        const std::vector<dynsys::OrbitSequence> orbits{
            dynsys::orbit_observable(shift, obs_f, dynsys::State{x}, +1, n1),
            dynsys::orbit_observable(shift, obs_g, dynsys::State{x}, -1, n1),
        };
        const auto series = averages::prefix_series(w, orbits, points);
        double sup = 0.0;
        for (const auto& v : series.values)
            sup = std::max(sup, std::abs(v - series.values.front()));
        total += sup;
    }
    check.dyn_side = total / static_cast<double>(f.modulus());
    return check;
}

void write_csv(std::ostream& out, const std::vector<MaximalStats>& trials, const report::Meta& meta)
{
    report::write_csv_meta(out, meta);
    out << "trial,rho,K,block,block_l1,cumulative_ratio\n";
    for (std::size_t t = 0; t < trials.size(); ++t) {
        const auto& s = trials[t];
        for (std::size_t b = 0; b < s.block_l1.size(); ++b)
            out << t << ',' << report::number(s.rho) << ',' << s.blocks << ',' << b + 1 << ','
                << report::number(s.block_l1[b]) << ',' << report::number(s.cumulative_ratio[b])
                << '\n';
    }
}

} // namespace ewlab::maximal
