#include "ewlab/averages.hpp"
#include "ewlab/error.hpp"
#include "ewlab/expsum.hpp"
#include "ewlab/fft.hpp"
#include "ewlab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace ewlab;
using averages::Complex;
using averages::FinitaryField;
using arith::WeightKind;

namespace {

arith::WeightSequence zeros(std::uint64_t n)
{
    return arith::WeightSequence::custom(std::vector<Complex>(n, 0.0));
}

// Oracle: B_N(j) summed from scratch with explicit modular indices.
FinitaryField naive_bilinear(const FinitaryField& f, const FinitaryField& g, const arith::WeightSequence& w,
                             std::uint64_t n)
{
    const auto j_mod = f.modulus();
    std::vector<Complex> out(j_mod);
    for (std::size_t j = 0; j < j_mod; ++j) {
        Complex s = 0.0;
        for (std::uint64_t k = 1; k <= n; ++k)
            s += w[k] * f[(j + k) % j_mod] * g[(j + j_mod * n - k) % j_mod];
        out[j] = s / static_cast<double>(n);
    }
    return FinitaryField(std::move(out));
}

double max_diff(const FinitaryField& a, const FinitaryField& b)
{
    double d = 0.0;
    for (std::size_t j = 0; j < a.modulus(); ++j)
        d = std::max(d, std::abs(a[j] - b[j]));
    return d;
}

FinitaryField random_complex_field(std::size_t j, std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> v(j);
    for (auto& x : v)
        x = Complex(u(gen), u(gen));
    return FinitaryField(std::move(v));
}

} // namespace

TEST_CASE("finitary norms and shifts")
{
    const FinitaryField f({3.0, Complex(0.0, 4.0), 0.0, 0.0});
    CHECK(f.norm(1.0) == doctest::Approx(7.0 / 4.0));
    CHECK(f.norm(2.0) == doctest::Approx(std::sqrt(25.0 / 4.0)));
    CHECK(f.sup_norm() == 4.0);
    const auto s = f.shifted(1);
    CHECK(s[1] == 3.0);
    CHECK(s[2] == Complex(0.0, 4.0));
    CHECK(f.shifted(-3).values == s.values);
}

TEST_CASE("prefix series examples")
{
    const auto rot = dynsys::SystemSpec::rotation(dynsys::golden_alpha());
    const std::vector<dynsys::OrbitSequence> ones{
        dynsys::orbit_observable(rot, dynsys::Observable::character(0), dynsys::State{0}, 1, 100),
        dynsys::orbit_observable(rot, dynsys::Observable::character(0), dynsys::State{0}, 2, 100),
    };
    const std::vector<std::uint64_t> grid{1, 10, 50, 100};

    for (auto v : averages::prefix_series(zeros(100), ones, grid).values)
        CHECK(v == 0.0);
    for (auto v : averages::prefix_series(arith::weight_table(WeightKind::constant_one, 100), ones, grid).values)
        CHECK(v == 1.0);
    const auto lambda = averages::prefix_series(arith::weight_table(WeightKind::liouville, 100), ones, grid);
    CHECK(lambda.values[1] == 0.0);
}

TEST_CASE("prefix series validation")
{
    const auto rot = dynsys::SystemSpec::rotation(dynsys::golden_alpha());
    const std::vector<dynsys::OrbitSequence> orbit{
        dynsys::orbit_observable(rot, dynsys::Observable::character(1), dynsys::State{0}, 1, 50)};
    const auto w = arith::weight_table(WeightKind::liouville, 100);
    const std::vector<std::uint64_t> too_long{10, 60};
    const std::vector<std::uint64_t> unsorted{10, 5};
    CHECK_THROWS_AS(averages::prefix_series(w, orbit, too_long), ValidationError);
    CHECK_THROWS_AS(averages::prefix_series(w, orbit, unsorted), ValidationError);
    CHECK_THROWS_AS(averages::prefix_series(arith::weight_table(WeightKind::liouville, 20), orbit,
                                            std::vector<std::uint64_t>{10, 30}),
                    ValidationError);
}

TEST_CASE("prefix consistency and triangle bound")
{
    const auto rot = dynsys::SystemSpec::rotation(dynsys::sqrt2_alpha());
    const auto ind = dynsys::Observable::interval_indicator(dynsys::fixed_from_ratio(1, 5),
                                                            dynsys::fixed_from_ratio(3, 5));
    const std::vector<dynsys::OrbitSequence> orbits{
        dynsys::orbit_observable(rot, dynsys::Observable::character(3), dynsys::State{17}, 1, 5000),
        dynsys::orbit_observable(rot, ind, dynsys::State{17}, 2, 5000),
        dynsys::orbit_observable(rot, dynsys::Observable::character(-1), dynsys::State{17}, 5, 5000),
    };
    const auto w = arith::weight_table(WeightKind::moebius, 5000);
    const auto grid = averages::default_grid(5000, 1.3);
    const auto series = averages::prefix_series(w, orbits, grid);
    CHECK(series.bound == 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto n = grid[i];
        Complex direct = 0.0;
        double abs_weight = 0.0;
        for (std::uint64_t k = 1; k <= n; ++k) {
            direct += w[k] * orbits[0].values[k - 1] * orbits[1].values[k - 1] * orbits[2].values[k - 1];
            abs_weight += std::abs(w[k]);
        }
        direct /= static_cast<double>(n);
        REQUIRE(std::abs(series.values[i] - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
        REQUIRE(std::abs(series.values[i]) <= abs_weight / static_cast<double>(n) + 1e-15);
    }
}

TEST_CASE("default grid holds dyadic and lacunary points")
{
    const auto grid = averages::default_grid(100, 1.5);
    for (std::uint64_t p : {1, 2, 4, 8, 16, 32, 64, 100})
        CHECK(std::binary_search(grid.begin(), grid.end(), p));
    for (std::uint64_t p : {3, 6, 12, 18, 26, 39, 58, 87})
        CHECK(std::binary_search(grid.begin(), grid.end(), p));
    CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("rotation reduction check")
{
    const auto rot = dynsys::SystemSpec::rotation(dynsys::golden_alpha());
    const auto w = arith::weight_table(WeightKind::liouville, 100000);

    const auto trivial = averages::rotation_reduction_check(w, rot, 0, 0, 1, 2, dynsys::Fixed{12345}, 1000);
    const auto mean = arith::partial_sum(w, 1000) / 1000.0;
    CHECK(std::abs(trivial.via_average - mean) < 1e-15);
    CHECK(std::abs(trivial.via_exp_sum - mean) < 1e-15);

    const auto x = dynsys::fixed_from_ratio(1, 7);
    const auto check = averages::rotation_reduction_check(w, rot, 1, 1, 1, 2, x, 1000);
    const auto alpha = dynsys::golden_alpha();
    const auto second = dynsys::unit_phase(dynsys::Fixed{2 * x.raw}) *
                        expsum::exp_sum(w, 1000, dynsys::Fixed{3 * alpha.raw}, 1) / 1000.0;
    CHECK(std::abs(check.via_exp_sum - second) < 1e-15);
    CHECK(std::abs(check.via_average - check.via_exp_sum) < 1e-9);

    const auto big = averages::rotation_reduction_check(w, rot, 1, 1, 1, 2, dynsys::Fixed{0}, 100000);
    CHECK(std::abs(big.via_average - big.via_exp_sum) < 1e-9);
    CHECK(std::abs(big.via_average) < 0.05);

    CHECK_THROWS_AS(averages::rotation_reduction_check(w, dynsys::SystemSpec::doubling(), 1, 1, 1, 2,
                                                       dynsys::Fixed{0}, 10),
                    ValidationError);
}

TEST_CASE("finitary direct examples")
{
    const auto w = arith::weight_table(WeightKind::liouville, 64);
    const auto one = FinitaryField::constant(32, 1.0);
    const auto b = averages::finitary_direct(one, one, w, 10);
    for (auto v : b.values)
        CHECK(std::abs(v - arith::partial_sum(w, 10) / 10.0) < 1e-15);

    const auto zero_w = averages::finitary_direct(one, one, zeros(64), 10);
    for (auto v : zero_w.values)
        CHECK(v == 0.0);

    const auto delta = FinitaryField::delta(8, 0);
    for (auto v : averages::finitary_direct(delta, delta, w, 3).values)
        CHECK(v == 0.0);

    CHECK_THROWS_AS(averages::finitary_direct(one, one, w, 32), ValidationError);
    try {
        averages::finitary_direct(one, one, w, 40);
    } catch (const ValidationError& e) {
        CHECK(e.kind() == ErrorKind::window);
    }
}

TEST_CASE("finitary fourier examples")
{
    const auto w = arith::weight_table(WeightKind::liouville, 64);
    const auto one = FinitaryField::constant(32, 1.0);
    for (auto v : averages::finitary_fourier(one, one, w, 10).values)
        CHECK(std::abs(v - arith::partial_sum(w, 10) / 10.0) < 1e-12);

    const auto f = rng::random_sign_field(16, 5, 0);
    const auto g = rng::random_sign_field(16, 5, 1);
    CHECK(max_diff(averages::finitary_fourier(f, g, w, 4), averages::finitary_direct(f, g, w, 4)) < 1e-9);
}

TEST_CASE("direct evaluator matches the naive sum")
{
    std::mt19937_64 gen(3);
    const auto w = arith::weight_table(WeightKind::moebius, 200);
    for (std::size_t j : {2u, 7u, 16u, 33u, 64u}) {
        const auto f = random_complex_field(j, gen);
        const auto g = random_complex_field(j, gen);
        for (std::uint64_t n = 1; n < j; n += std::max<std::uint64_t>(1, j / 5))
            REQUIRE(max_diff(averages::finitary_direct(f, g, w, n), naive_bilinear(f, g, w, n)) < 1e-12);
    }
}

TEST_CASE("fourier and direct evaluators agree on random inputs")
{
    std::mt19937_64 gen(19);
    std::uniform_int_distribution<std::size_t> size(2, 2048);
    const auto lambda = arith::weight_table(WeightKind::liouville, 2048);
    std::vector<Complex> custom_values(2048);
    std::uniform_real_distribution<double> phase(0.0, 1.0);
    for (auto& v : custom_values)
        v = std::polar(phase(gen), 2.0 * std::numbers::pi * phase(gen));
    const auto custom = arith::WeightSequence::custom(custom_values);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t j = trial < 2 ? (trial == 0 ? 2048 : 1001) : size(gen);
        std::uniform_int_distribution<std::uint64_t> window(1, j - 1);
        const auto n = window(gen);
        const auto f = random_complex_field(j, gen);
        const auto g = random_complex_field(j, gen);
        const auto& w = trial % 2 ? custom : lambda;
        const double tol = 1e-9 * (1.0 + f.sup_norm() * g.sup_norm());
        REQUIRE(max_diff(averages::finitary_fourier(f, g, w, n), averages::finitary_direct(f, g, w, n)) <= tol);
    }
}

TEST_CASE("parseval under the forward DFT")
{
    std::mt19937_64 gen(23);
    for (std::size_t j : {1u, 5u, 64u, 1000u}) {
        const auto f = random_complex_field(j, gen);
        const auto spectrum = fft::transform(f.values, fft::Direction::forward);
        double lhs = 0.0, rhs = 0.0;
        for (auto c : spectrum)
            lhs += std::norm(c);
        lhs /= static_cast<double>(j);
        for (auto v : f.values)
            rhs += std::norm(v);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
    }
}

TEST_CASE("forward DFT convention")
{
    // F(f)(chi_m) = sum_n f(n) e(-mn/J)
    std::vector<Complex> delta(8, 0.0);
    delta[1] = 1.0;
    const auto spec = fft::transform(delta, fft::Direction::forward);
    for (std::size_t m = 0; m < 8; ++m)
        CHECK(std::abs(spec[m] - std::polar(1.0, -2.0 * std::numbers::pi * m / 8.0)) < 1e-14);
    fft::Plan plan(8, fft::Direction::backward);
    std::vector<Complex> back(8);
    plan.execute(spec, back);
    CHECK(std::abs(back[1] - 8.0) < 1e-14);
}

TEST_CASE("shift covariance is exact")
{
    const auto w = arith::weight_table(WeightKind::liouville, 100);
    const auto f = rng::random_sign_field(50, 9, 0);
    const auto g = rng::random_sign_field(50, 9, 1);
    const auto b = averages::finitary_direct(f, g, w, 20);
    for (std::int64_t s : {1, 7, -3, 49}) {
        const auto shifted = averages::finitary_direct(f.shifted(s), g.shifted(s), w, 20);
        REQUIRE(shifted.values == b.shifted(s).values);
    }
}

TEST_CASE("cesaro diagnostics")
{
    averages::AverageSeries zero;
    zero.grid = averages::default_grid(1000, 2.0);
    zero.values.assign(zero.grid.size(), 0.0);
    zero.bound = 0.0;
    const auto z = averages::cesaro_diagnostics(zero, 2.0);
    CHECK(z.lacunary_tail_sup == 0.0);
    CHECK(z.full_tail_sup == 0.0);
    CHECK(z.gap_term_max == 0.0);
    CHECK(z.gap_limit == 0.0);

    const auto rot = dynsys::SystemSpec::rotation(dynsys::golden_alpha());
    const auto chr = dynsys::Observable::character(1);
    const std::vector<dynsys::OrbitSequence> orbits{
        dynsys::orbit_observable(rot, chr, dynsys::State{0}, 1, 1 << 20),
        dynsys::orbit_observable(rot, chr, dynsys::State{0}, 2, 1 << 20),
    };
    const auto w = arith::weight_table(WeightKind::liouville, 1 << 20);
    const auto dyadic = averages::prefix_series(w, orbits, averages::default_grid(1 << 20, 2.0));
    const auto d = averages::cesaro_diagnostics(dyadic, 2.0);
    CHECK(d.gap_term_last == doctest::Approx(1.0));
    CHECK(d.gap_limit == doctest::Approx(1.0));
    CHECK(d.interpolation_violations == 0);

    const auto series = averages::prefix_series(w, orbits, averages::default_grid(1000000, 1.1));
    const auto r = averages::cesaro_diagnostics(series, 1.1);
    CHECK(r.lacunary_tail_sup < r.gap_term_last + 0.05);
    CHECK(r.interpolation_violations == 0);

    averages::AverageSeries sparse;
    sparse.grid = {1, 1000};
    sparse.values = {0.0, 0.0};
    CHECK_THROWS_AS(averages::cesaro_diagnostics(sparse, 2.0), ValidationError);
}

TEST_CASE("series CSV layout")
{
    averages::AverageSeries s;
    s.grid = {1, 2};
    s.values = {Complex(0.5, -0.25), 0.0};
    s.meta = {{"weight", "liouville"}};
    std::ostringstream out;
    averages::write_csv(out, s);
    CHECK(out.str() == "# schema_version=1;tool=ewlab 1.0.0;weight=liouville\n"
                       "N,re,im,abs\n"
                       "1,0.5,-0.25,0.5590169943749475\n"
                       "2,0,0,0\n");
}
