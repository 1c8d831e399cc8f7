#include "ewlab/expsum.hpp"

#include "ewlab/error.hpp"
#include "ewlab/fft.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace ewlab::expsum {

namespace {

__extension__ typedef unsigned __int128 u128;

void check_length(const arith::WeightSequence& w, std::uint64_t n)
{
    if (n < 1 || n > w.limit())
        throw ValidationError(ErrorKind::range,
                              fmt::format("N={} outside [1, {}] (weight table limit)", n, w.limit()));
}

void check_power(unsigned k)
{
    if (k < 1 || k > max_power)
        throw ValidationError(ErrorKind::validation,
                              fmt::format("power k={} outside [1, {}]", k, max_power));
}

// n^k, or a range error once it leaves 128 bits.
u128 checked_power(std::uint64_t n, unsigned k)
{
    u128 result = 1;
    for (unsigned i = 0; i < k; ++i) {
        if (n != 0 && result > std::numeric_limits<u128>::max() / n)
            throw ValidationError(ErrorKind::range,
                                  fmt::format("n^k overflows 128 bits at n={}, k={}", n, k));
        result *= n;
    }
    return result;
}

std::vector<Complex> twiddles(std::uint64_t grid_size)
{
    std::vector<Complex> table(grid_size);
    for (std::uint64_t t = 0; t < grid_size; ++t)
        table[t] = dynsys::unit_phase(dynsys::fixed_from_ratio(static_cast<std::int64_t>(t), grid_size));
    return table;
}

GridMax argmax_of(const std::vector<Complex>& values, std::uint64_t grid_size, double scale)
{
    GridMax best;
    double best_abs = -1.0;
    for (std::uint64_t m = 0; m < values.size(); ++m) {
        const double a = std::abs(values[m]);
        if (a > best_abs) {
            best_abs = a;
            best.argmax = m;
        }
    }
    best.max_norm = best_abs / scale;
    best.argmax_theta = static_cast<double>(best.argmax) / static_cast<double>(grid_size);
    return best;
}

} // namespace

Complex exp_sum(const arith::WeightSequence& w, std::uint64_t n, dynsys::Fixed theta, unsigned k)
{
    check_length(w, n);
    check_power(k);
    Complex sum = 0.0;
    if (k == 1) {
        std::uint64_t phase = 0;
        for (std::uint64_t i = 1; i <= n; ++i) {
            phase += theta.raw;
            sum += w[i] * dynsys::unit_phase(dynsys::Fixed{phase});
        }
        return sum;
    }
    for (std::uint64_t i = 1; i <= n; ++i) {
        const auto reduced = static_cast<std::uint64_t>(checked_power(i, k)); // mod 2^64
        sum += w[i] * dynsys::unit_phase(dynsys::Fixed{reduced * theta.raw});
    }
    return sum;
}

Complex exp_sum(const arith::WeightSequence& w, std::uint64_t n, double theta, unsigned k)
{
    return exp_sum(w, n, dynsys::fixed_from_double(theta), k);
}

std::vector<Complex> grid_values(const arith::WeightSequence& w, std::uint64_t first,
                                 std::uint64_t last, std::uint64_t grid_size)
{
    if (first < 1 || first > last)
        throw ValidationError(ErrorKind::validation,
                              fmt::format("summation range [{}, {}] is empty", first, last));
    check_length(w, last);
    if (grid_size < 1 || grid_size > (std::uint64_t{1} << 30))
        throw ValidationError(ErrorKind::size, fmt::format("grid size G={} outside [1, 2^30]", grid_size));
    std::vector<Complex> folded(grid_size, 0.0);
    for (std::uint64_t n = first; n <= last; ++n)
        folded[n % grid_size] += w[n];
    // backward transform carries e^{+2 pi i m n / G}, matching S(theta)'s sign
    fft::Plan plan(grid_size, fft::Direction::backward);
    plan.execute(folded, folded);
    return folded;
}

GridMax max_over_grid(const arith::WeightSequence& w, std::uint64_t n, unsigned k,
                      std::uint64_t grid_size)
{
    check_length(w, n);
    check_power(k);
    if (k == 1) {
        if (grid_size < 4 * n)
            throw ValidationError(ErrorKind::validation,
                                  fmt::format("grid size G={} below the density floor 4N={}",
                                              grid_size, 4 * n));
        return argmax_of(grid_values(w, 1, n, grid_size), grid_size, static_cast<double>(n));
    }
    if (grid_size < 1)
        throw ValidationError(ErrorKind::validation, "grid size G must be >= 1");

    // Direct scan. theta = m/G, so n^k m/G mod 1 only needs r_n = n^k mod G and
    // the phase index advances by r_n per step in m.
    const auto table = twiddles(grid_size);
    std::vector<std::uint64_t> residue(n);
    std::vector<std::uint64_t> index(n, 0);
    for (std::uint64_t i = 1; i <= n; ++i)
        residue[i - 1] = static_cast<std::uint64_t>(checked_power(i, k) % grid_size);

    // real weights: |S(theta)| = |S(1 - theta)|, half the grid suffices
    const bool real = w.is_real();
    const std::uint64_t scan = real ? grid_size / 2 + 1 : grid_size;
    std::vector<Complex> values(scan);
    std::vector<double> real_w;
    std::vector<Complex> complex_w;
    if (real) {
        real_w.resize(n);
        for (std::uint64_t i = 1; i <= n; ++i)
            real_w[i - 1] = w[i].real();
    } else {
        complex_w = w.values(n);
    }

    auto step = [&](std::uint64_t i) {
        const std::uint64_t next = index[i] + residue[i];
        index[i] = next >= grid_size ? next - grid_size : next;
    };
    for (std::uint64_t m = 0; m < scan; ++m) {
        if (real) {
            double re = 0.0, im = 0.0;
            for (std::uint64_t i = 0; i < n; ++i) {
                const Complex t = table[index[i]];
                re += real_w[i] * t.real();
                im += real_w[i] * t.imag();
                step(i);
            }
            values[m] = Complex(re, im);
        } else {
            Complex acc = 0.0;
            for (std::uint64_t i = 0; i < n; ++i) {
                acc += complex_w[i] * table[index[i]];
                step(i);
            }
            values[m] = acc;
        }
    }
    return argmax_of(values, grid_size, static_cast<double>(n));
}

std::uint64_t zhan_threshold(std::uint64_t n, double epsilon)
{
    return static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), 0.625 + epsilon)));
}

ShortInterval short_interval_max(const arith::WeightSequence& w, std::uint64_t n,
                                 std::uint64_t m, std::uint64_t grid_size)
{
    if (n < 1)
        throw ValidationError(ErrorKind::validation, "short interval start N must be >= 1");
    const auto floor = zhan_threshold(n, 0.0);
    if (m < floor)
        throw ValidationError(ErrorKind::precondition,
                              fmt::format("interval length M={} below ceil(N^(5/8))={} for N={}",
                                          m, floor, n));
    if (n + m > w.limit())
        throw ValidationError(ErrorKind::range,
                              fmt::format("N+M={} exceeds weight table limit {}", n + m, w.limit()));

    ShortInterval result;
    result.terms = m + 1;
    const auto values = grid_values(w, n, n + m, grid_size);
    const auto best = argmax_of(values, grid_size, static_cast<double>(m + 1));
    result.max_norm = best.max_norm;
    result.max_norm_by_m = best.max_norm * static_cast<double>(m + 1) / static_cast<double>(m);
    result.argmax_theta = best.argmax_theta;
    return result;
}

namespace {

void check_spectral(const averages::FinitaryField& g, const arith::WeightSequence& w,
                    std::uint64_t n)
{
    if (g.modulus() < 2 || n < 1 || n >= g.modulus())
        throw ValidationError(ErrorKind::validation,
                              fmt::format("need 1 <= N < J, got N={}, J={}", n, g.modulus()));
    check_length(w, n);
}

double spectral_lhs(const averages::FinitaryField& g, const arith::WeightSequence& w,
                    std::uint64_t n, std::uint64_t character, std::vector<Complex>& scratch)
{
    const std::uint64_t J = g.modulus();
    scratch.assign(J, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::uint64_t i = 1; i <= n; ++i) {
        const auto chi = dynsys::unit_phase(
            dynsys::fixed_from_ratio(static_cast<std::int64_t>((character * i) % J), J));
        const Complex c = w[i] * chi * inv_n;
        // u(j) += c g(j - i)
        std::uint64_t src = (J - i % J) % J;
        for (std::uint64_t j = 0; j < J; ++j) {
            scratch[j] += c * g[src];
            if (++src == J)
                src = 0;
        }
    }
    double energy = 0.0;
    for (const auto& v : scratch)
        energy += std::norm(v);
    return std::sqrt(energy / static_cast<double>(J));
}

} // namespace

SpectralCheck spectral_norm_check(const averages::FinitaryField& g, const arith::WeightSequence& w,
                                  std::uint64_t n, std::uint64_t character)
{
    check_spectral(g, w, n);
    if (character >= g.modulus())
        throw ValidationError(ErrorKind::validation,
                              fmt::format("character index m={} outside Z_{}", character, g.modulus()));
    std::vector<Complex> scratch;
    SpectralCheck check;
    check.lhs = spectral_lhs(g, w, n, character, scratch);
    check.rhs = max_over_grid(w, n, 1, 4 * n).max_norm * g.norm(2.0);
    return check;
}

std::vector<SpectralCheck> spectral_norm_check_all(const averages::FinitaryField& g,
                                                   const arith::WeightSequence& w, std::uint64_t n)
{
    check_spectral(g, w, n);
    const double rhs = max_over_grid(w, n, 1, 4 * n).max_norm * g.norm(2.0);
    std::vector<SpectralCheck> checks(g.modulus());
    std::vector<Complex> scratch;
    for (std::uint64_t m = 0; m < g.modulus(); ++m)
        checks[m] = {spectral_lhs(g, w, n, m, scratch), rhs};
    return checks;
}

DecayReport decay_report(const arith::WeightSequence& w, const std::vector<std::uint64_t>& ns,
                         unsigned k, const std::vector<std::uint64_t>& grid_sizes)
{
    if (ns.size() != grid_sizes.size())
        throw ValidationError(ErrorKind::length,
                              fmt::format("{} values of N but {} grid sizes", ns.size(),
                                          grid_sizes.size()));
    DecayReport report;
    report.weight = w.kind();
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto best = max_over_grid(w, ns[i], k, grid_sizes[i]);
        report.rows.push_back({ns[i], k, grid_sizes[i], best.max_norm, best.argmax_theta});
    }
    fit_log_decay(report);
    return report;
}

void fit_log_decay(DecayReport& report)
{
    report.fitted_a = 0;
    report.fitted_c = 0.0;
    double best_residual = std::numeric_limits<double>::infinity();
    for (int a = 1; a <= 3; ++a) {
        double sxy = 0.0, sxx = 0.0;
        bool usable = !report.rows.empty();
        for (const auto& row : report.rows) {
            if (row.n < 2) {
                usable = false;
                break;
            }
            const double x = std::pow(std::log(static_cast<double>(row.n)), -a);
            sxy += x * row.max_norm;
            sxx += x * x;
        }
        if (!usable)
            return;
        const double c = sxy / sxx;
        double residual = 0.0;
        for (const auto& row : report.rows) {
            const double x = std::pow(std::log(static_cast<double>(row.n)), -a);
            residual += (row.max_norm - c * x) * (row.max_norm - c * x);
        }
        if (residual < best_residual) {
            best_residual = residual;
            report.fitted_a = a;
            report.fitted_c = c;
        }
    }
}

void write_csv(std::ostream& out, const DecayReport& report)
{
    auto meta = report.meta;
    if (std::none_of(meta.begin(), meta.end(), [](const auto& e) { return e.first == "weight"; }))
        meta.emplace_back("weight", std::string(arith::to_string(report.weight)));
    report::write_csv_meta(out, meta);
    out << "N,k,G,max_norm,argmax_theta,fitted_A,fitted_C\n";
    for (const auto& row : report.rows)
        out << row.n << ',' << row.k << ',' << row.grid_size << ',' << report::number(row.max_norm)
            << ',' << report::number(row.argmax_theta) << ',' << report.fitted_a << ','
            << report::number(report.fitted_c) << '\n';
}

} // namespace ewlab::expsum
