#include "ewlab/averages.hpp"

#include "ewlab/error.hpp"
#include "ewlab/expsum.hpp"
#include "ewlab/fft.hpp"
#include "ewlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <set>

namespace ewlab::averages {

FinitaryField FinitaryField::constant(std::size_t modulus, Complex value)
{
    return FinitaryField(std::vector<Complex>(modulus, value));
}

FinitaryField FinitaryField::delta(std::size_t modulus, std::size_t at)
{
    if (at >= modulus)
        throw ValidationError(ErrorKind::range, fmt::format("delta at {} outside Z_{}", at, modulus));
    std::vector<Complex> v(modulus, 0.0);
    v[at] = 1.0;
    return FinitaryField(std::move(v));
}

double FinitaryField::norm(double p) const
{
    if (values.empty())
        return 0.0;
    double total = 0.0;
    for (const auto& v : values)
        total += std::pow(std::abs(v), p);
    return std::pow(total / static_cast<double>(values.size()), 1.0 / p);
}

double FinitaryField::sup_norm() const
{
    double sup = 0.0;
    for (const auto& v : values)
        sup = std::max(sup, std::abs(v));
    return sup;
}

FinitaryField FinitaryField::shifted(std::int64_t s) const
{
    const auto J = static_cast<std::int64_t>(values.size());
    std::vector<Complex> out(values.size());
    for (std::int64_t j = 0; j < J; ++j)
        out[j] = values[((j - s) % J + J) % J];
    return FinitaryField(std::move(out));
}

AverageSeries prefix_series(const arith::WeightSequence& w,
                            std::span<const dynsys::OrbitSequence> orbits,
                            std::span<const std::uint64_t> grid)
{
    if (grid.empty())
        throw ValidationError(ErrorKind::validation, "average grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1]))
            throw ValidationError(ErrorKind::validation,
                                  "average grid must be strictly ascending positive integers");
    }
    const std::uint64_t n_max = grid.back();
    if (n_max > w.limit())
        throw ValidationError(ErrorKind::length,
                              fmt::format("grid reaches N={} but weight table stops at {}", n_max,
                                          w.limit()));
    for (const auto& orbit : orbits)
        if (orbit.values.size() < n_max)
            throw ValidationError(ErrorKind::length,
                                  fmt::format("orbit of {} has length {} < max grid N={}",
                                              orbit.meta.observable, orbit.values.size(), n_max));

    AverageSeries series;
    series.grid.assign(grid.begin(), grid.end());
    series.values.reserve(grid.size());

    double weight_sup = 0.0;
    Complex sum = 0.0;
    std::size_t next = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const Complex nu = w[n];
        weight_sup = std::max(weight_sup, std::abs(nu));
        Complex term = nu;
        for (const auto& orbit : orbits)
            term *= orbit.values[n - 1];
        sum += term;
        if (n == grid[next]) {
            series.values.push_back(sum / static_cast<double>(n));
            ++next;
        }
    }

    series.bound = weight_sup;
    series.meta.emplace_back("weight", std::string(arith::to_string(w.kind())));
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const auto& m = orbits[i].meta;
        series.bound *= orbits[i].sup_norm;
        series.meta.emplace_back(fmt::format("orbit{}", i),
                                 fmt::format("{} {} x={} a={}", m.system, m.observable,
                                             m.start.value, m.power));
    }
    return series;
}

std::vector<std::uint64_t> default_grid(std::uint64_t n_max, double rho)
{
    std::set<std::uint64_t> points;
    for (std::uint64_t p = 1; p <= n_max; p *= 2) {
        points.insert(p);
        if (p > n_max / 2)
            break;
    }
    for (auto p : maximal::lacunary_grid(rho, n_max).points)
        points.insert(p);
    points.insert(n_max);
    return {points.begin(), points.end()};
}

ReductionCheck rotation_reduction_check(const arith::WeightSequence& w,
                                        const dynsys::SystemSpec& rotation, std::int64_t k1,
                                        std::int64_t k2, std::int64_t a, std::int64_t b,
                                        dynsys::Fixed x, std::uint64_t n)
{
    if (!rotation.is_rotation())
        throw ValidationError(ErrorKind::validation,
                              "rotation_reduction_check needs a rotation, got " +
                                  rotation.description());
    const auto alpha = std::get<dynsys::Rotation>(rotation.variant()).alpha;
    const dynsys::State start{x.raw};

    const std::vector<dynsys::OrbitSequence> orbits{
        dynsys::orbit_observable(rotation, dynsys::Observable::character(k1), start, a, n),
        dynsys::orbit_observable(rotation, dynsys::Observable::character(k2), start, b, n),
    };
    const std::uint64_t grid[] = {n};
    ReductionCheck check;
    check.via_average = prefix_series(w, orbits, grid).values.front();

    const auto u = [](std::int64_t v) { return static_cast<std::uint64_t>(v); };
    const dynsys::Fixed theta{(u(k1) * u(a) + u(k2) * u(b)) * alpha.raw};
    const dynsys::Fixed offset{(u(k1) + u(k2)) * x.raw};
    check.via_exp_sum = dynsys::unit_phase(offset) * expsum::exp_sum(w, n, theta, 1) /
                        static_cast<double>(n);
    return check;
}

BilinearAccumulator::BilinearAccumulator(const FinitaryField& f, const FinitaryField& g,
                                         const arith::WeightSequence& w)
    : f_(f), g_(g), w_(w), sums_(f.modulus(), 0.0)
{
    if (f.modulus() != g.modulus())
        throw ValidationError(ErrorKind::validation,
                              fmt::format("field moduli differ: {} vs {}", f.modulus(), g.modulus()));
    if (f.modulus() < 2)
        throw ValidationError(ErrorKind::validation, "finitary modulus J must be >= 2");
}

void BilinearAccumulator::advance_to(std::uint64_t target)
{
    const std::uint64_t J = f_.modulus();
    if (target >= J)
        throw ValidationError(ErrorKind::window,
                              fmt::format("N={} >= J={}: the window would wrap around Z_J", target, J));
    if (target > w_.limit())
        throw ValidationError(ErrorKind::range,
                              fmt::format("N={} exceeds weight table limit {}", target, w_.limit()));
    if (target < n_)
        throw ValidationError(ErrorKind::validation,
                              fmt::format("accumulator is at N={}, cannot rewind to {}", n_, target));
    for (std::uint64_t n = n_ + 1; n <= target; ++n) {
        const Complex nu = w_[n];
        if (nu == 0.0)
            continue;
        // j + n and j - n mod J, stepped with j
        std::uint64_t plus = n % J;
        std::uint64_t minus = (J - n % J) % J;
        for (std::uint64_t j = 0; j < J; ++j) {
            sums_[j] += nu * (f_[plus] * g_[minus]);
            if (++plus == J)
                plus = 0;
            if (++minus == J)
                minus = 0;
        }
    }
    n_ = target;
}

void BilinearAccumulator::average_into(std::vector<Complex>& out) const
{
    if (n_ == 0)
        throw ValidationError(ErrorKind::validation, "average at N=0 is undefined");
    out.resize(sums_.size());
    const double scale = static_cast<double>(n_);
    for (std::size_t j = 0; j < sums_.size(); ++j)
        out[j] = sums_[j] / scale;
}

FinitaryField BilinearAccumulator::average() const
{
    FinitaryField out;
    average_into(out.values);
    return out;
}

namespace {

void check_finitary(const FinitaryField& f, const FinitaryField& g, const arith::WeightSequence& w,
                    std::uint64_t n)
{
    if (f.modulus() != g.modulus())
        throw ValidationError(ErrorKind::validation,
                              fmt::format("field moduli differ: {} vs {}", f.modulus(), g.modulus()));
    if (n < 1)
        throw ValidationError(ErrorKind::validation, "N must be >= 1");
    if (n >= f.modulus())
        throw ValidationError(ErrorKind::window,
                              fmt::format("N={} >= J={}: the window would wrap around Z_J", n,
                                          f.modulus()));
    if (n > w.limit())
        throw ValidationError(ErrorKind::range,
                              fmt::format("N={} exceeds weight table limit {}", n, w.limit()));
}

} // namespace

FinitaryField finitary_direct(const FinitaryField& f, const FinitaryField& g,
                              const arith::WeightSequence& w, std::uint64_t n)
{
    check_finitary(f, g, w, n);
    BilinearAccumulator acc(f, g, w);
    acc.advance_to(n);
    return acc.average();
}

FinitaryField finitary_fourier(const FinitaryField& f, const FinitaryField& g,
                               const arith::WeightSequence& w, std::uint64_t n)
{
    check_finitary(f, g, w, n);
    const std::uint64_t J = f.modulus();

    std::vector<Complex> h(J, 0.0);
    for (std::uint64_t i = 1; i <= n; ++i)
        h[i] = w[i] / static_cast<double>(n);

    fft::Plan forward(J, fft::Direction::forward);
    fft::Plan backward(J, fft::Direction::backward);
    std::vector<Complex> f_hat(J), g_hat(J), h_hat(J);
    forward.execute(f.values, f_hat);
    forward.execute(g.values, g_hat);
    forward.execute(h, h_hat);

    // chi_m(t) = e^{2 pi i m t / J}
    std::vector<Complex> chi(J);
    for (std::uint64_t t = 0; t < J; ++t)
        chi[t] = dynsys::unit_phase(dynsys::fixed_from_ratio(static_cast<std::int64_t>(t), J));

    const double inv_j = 1.0 / static_cast<double>(J);
    std::vector<Complex> result(J, 0.0);
    std::vector<Complex> spectrum(J), conv(J);
    for (std::uint64_t m = 0; m < J; ++m) {
        if (f_hat[m] == 0.0)
            continue;
        // DFT of g conj(chi_m) is g_hat shifted by m
        for (std::uint64_t k = 0; k < J; ++k) {
            const std::uint64_t km = k + m < J ? k + m : k + m - J;
            spectrum[k] = h_hat[k] * g_hat[km];
        }
        backward.execute(spectrum, conv);
        // conv(j) / J = (h * (g conj(chi_m)))(j); weight by F(f)(chi_m) chi_m(2j) / J
        const Complex coeff = f_hat[m] * inv_j * inv_j;
        const std::uint64_t step = (2 * m) % J;
        std::uint64_t phase = 0;
        for (std::uint64_t j = 0; j < J; ++j) {
            result[j] += coeff * conv[j] * chi[phase];
            phase += step;
            if (phase >= J)
                phase -= J;
        }
    }
    return FinitaryField(std::move(result));
}

CesaroReport cesaro_diagnostics(const AverageSeries& series, double rho, std::uint64_t tail_start)
{
    if (!(rho > 1.0))
        throw ValidationError(ErrorKind::validation, fmt::format("rho={} must exceed 1", rho));
    if (series.grid.size() != series.values.size() || series.grid.empty())
        throw ValidationError(ErrorKind::length, "series grid and values differ in length");

    const std::uint64_t n_max = series.grid.back();
    const auto lacunary = maximal::lacunary_grid(rho, n_max);
    std::vector<std::size_t> at; // index into series.grid of each I_rho point
    for (auto p : lacunary.points) {
        const auto it = std::lower_bound(series.grid.begin(), series.grid.end(), p);
        if (it == series.grid.end() || *it != p)
            throw ValidationError(ErrorKind::validation,
                                  fmt::format("grid too sparse: I_rho point {} (rho={}) missing", p, rho));
        at.push_back(static_cast<std::size_t>(it - series.grid.begin()));
    }

    CesaroReport report;
    report.rho = rho;
    report.tail_start = tail_start ? tail_start
                                   : static_cast<std::uint64_t>(std::ceil(std::sqrt(double(n_max))));
    report.gap_limit = series.bound * (rho - 1.0);

    std::size_t first_tail = at.size();
    for (std::size_t i = 0; i < at.size(); ++i) {
        if (lacunary.points[i] >= report.tail_start) {
            first_tail = i;
            break;
        }
    }
    report.tail_points = at.size() - first_tail;
    if (report.tail_points < 2)
        throw ValidationError(ErrorKind::validation,
                              fmt::format("grid too sparse: {} I_rho points at or above tail start {}",
                                          report.tail_points, report.tail_start));

    for (std::size_t i = first_tail; i < at.size(); ++i)
        report.lacunary_tail_sup = std::max(report.lacunary_tail_sup, std::abs(series.values[at[i]]));
    for (std::size_t i = 0; i < series.grid.size(); ++i)
        if (series.grid[i] >= report.tail_start)
            report.full_tail_sup = std::max(report.full_tail_sup, std::abs(series.values[i]));

    for (std::size_t i = first_tail; i + 1 < at.size(); ++i) {
        const double lo = static_cast<double>(lacunary.points[i]);
        const double hi = static_cast<double>(lacunary.points[i + 1]);
        const double gap = series.bound * (hi - lo) / lo;
        report.gap_term_max = std::max(report.gap_term_max, gap);
        report.gap_term_last = gap;

        // every grid N in [P_m, P_{m+1}) obeys |A_N| <= |A_{P_m}| + gap
        const double anchor = std::abs(series.values[at[i]]);
        for (std::size_t g = at[i]; g < at[i + 1]; ++g)
            if (std::abs(series.values[g]) > anchor + gap + 1e-12)
                ++report.interpolation_violations;
    }
    return report;
}

void write_csv(std::ostream& out, const AverageSeries& series)
{
    report::write_csv_meta(out, series.meta);
    out << "N,re,im,abs\n";
    for (std::size_t i = 0; i < series.grid.size(); ++i) {
        const auto v = series.values[i];
        out << series.grid[i] << ',' << report::number(v.real()) << ','
            << report::number(v.imag()) << ',' << report::number(std::abs(v)) << '\n';
    }
}

} // namespace ewlab::averages
