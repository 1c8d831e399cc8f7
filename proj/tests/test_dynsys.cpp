#include "ewlab/dynsys.hpp"
#include "ewlab/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ewlab;
using namespace ewlab::dynsys;

namespace {

const std::complex<double> I{0.0, 1.0};

bool close(std::complex<double> a, std::complex<double> b, double tol = 1e-12)
{
    return std::abs(a - b) < tol;
}

} // namespace

TEST_CASE("fixed-point fractions")
{
    CHECK(fixed_from_ratio(1, 4).raw == std::uint64_t{1} << 62);
    CHECK(fixed_from_ratio(-1, 4).raw == 3 * (std::uint64_t{1} << 62));
    CHECK(fixed_from_double(0.5).raw == std::uint64_t{1} << 63);
    CHECK(to_double(fixed_from_ratio(3, 8)) == 0.375);
    CHECK(parse_fraction("1/4") == fixed_from_ratio(1, 4));
    CHECK(parse_fraction("0.25") == fixed_from_ratio(1, 4));
    CHECK(parse_fraction("golden") == golden_alpha());
    CHECK_THROWS_AS(parse_fraction("half"), ValidationError);
    CHECK_THROWS_AS(parse_fraction("1/0"), ValidationError);
    CHECK_THROWS_AS(parse_fraction("1.5"), ValidationError);
}

TEST_CASE("quadratic irrational approximants")
{
    const long double golden = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    CHECK(std::abs(to_double(golden_alpha()) - golden) < 1e-16L);
    CHECK(std::abs(to_double(sqrt2_alpha()) - (std::sqrt(2.0L) - 1.0L)) < 1e-16L);
    // golden^2 + golden = 1: compare in 128-bit fixed point, error of a few ulps at most
    const unsigned __int128 g = golden_alpha().raw;
    const unsigned __int128 sq = (g * g) >> 64;
    const unsigned __int128 one = static_cast<unsigned __int128>(1) << 64;
    const auto sum = sq + g;
    const auto gap = sum > one ? sum - one : one - sum;
    CHECK(gap <= 2);
}

TEST_CASE("iterate examples")
{
    const auto quarter = SystemSpec::rotation(fixed_from_ratio(1, 4));
    CHECK(iterate(quarter, State{0}, 3).value == fixed_from_ratio(3, 4).raw);
    CHECK(iterate(quarter, State{0}, -1).value == fixed_from_ratio(3, 4).raw);
    const auto shift = SystemSpec::cyclic_shift(8);
    CHECK(iterate(shift, State{5}, 6).value == 3);
    CHECK(iterate(shift, State{5}, -6).value == 7);
    const auto doubling = SystemSpec::doubling();
    CHECK(iterate(doubling, State{fixed_from_ratio(3, 8).raw}, 1).value == fixed_from_ratio(3, 4).raw);
    CHECK(iterate(doubling, State{fixed_from_ratio(3, 8).raw}, 64).value == 0);
    CHECK(doubling.description().find("empirical analog") != std::string::npos);
}

TEST_CASE("iterate errors")
{
    const auto doubling = SystemSpec::doubling();
    try {
        iterate(doubling, State{1}, -1);
        FAIL("expected throw");
    } catch (const ValidationError& e) {
        CHECK(e.kind() == ErrorKind::non_invertible);
    }
    const auto rot = SystemSpec::rotation(golden_alpha());
    CHECK_THROWS_AS(iterate(rot, State{0}, (std::int64_t{1} << 62) + 1), ValidationError);
    CHECK_THROWS_AS(SystemSpec::cyclic_shift(0), ValidationError);
}

TEST_CASE("rotation group law is bit-exact")
{
    const auto rot = SystemSpec::rotation(golden_alpha());
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<std::int64_t> steps(-(std::int64_t{1} << 40), std::int64_t{1} << 40);
    for (int i = 0; i < 10000; ++i) {
        const State x{gen()};
        const auto m = steps(gen), n = steps(gen);
        REQUIRE(iterate(rot, iterate(rot, x, m), n) == iterate(rot, x, m + n));
    }
}

TEST_CASE("rational rotation is periodic")
{
    const auto rot = SystemSpec::rotation(fixed_from_ratio(5, 64));
    const State x{123456789};
    CHECK(iterate(rot, x, 64) == x);
    CHECK_FALSE(iterate(rot, x, 32) == x);
}

TEST_CASE("observables")
{
    const auto chr = Observable::character(2);
    CHECK(close(chr(State{fixed_from_ratio(1, 8).raw}), I));
    const auto ind = Observable::interval_indicator(fixed_from_ratio(3, 4), fixed_from_ratio(1, 4));
    CHECK(ind(State{0}) == 1.0);
    CHECK(ind(State{fixed_from_ratio(1, 2).raw}) == 0.0);
    CHECK(ind(State{fixed_from_ratio(3, 4).raw}) == 1.0);
    CHECK(ind(State{fixed_from_ratio(1, 4).raw}) == 0.0);

    const auto table = Observable::table({1.0, I, -1.0, -I});
    CHECK(table.sup_norm() == 1.0);
    CHECK_NOTHROW(table.check_domain(SystemSpec::cyclic_shift(4)));
    CHECK_THROWS_AS(table.check_domain(SystemSpec::cyclic_shift(5)), ValidationError);
    CHECK_THROWS_AS(table.check_domain(SystemSpec::doubling()), ValidationError);
    CHECK_THROWS_AS(chr.check_domain(SystemSpec::cyclic_shift(4)), ValidationError);
}

TEST_CASE("orbit examples")
{
    const auto one = orbit_observable(SystemSpec::rotation(golden_alpha()), Observable::character(0),
                                      State{0}, 1, 50);
    for (auto v : one.values)
        CHECK(v == 1.0);

    const auto alpha = sqrt2_alpha();
    const auto rot = SystemSpec::rotation(alpha);
    const auto orbit = orbit_observable(rot, Observable::character(1), State{0}, 1, 1000);
    for (std::uint64_t n = 1; n <= 1000; ++n)
        REQUIRE(close(orbit.values[n - 1], unit_phase(Fixed{n * alpha.raw})));

    const auto shift = orbit_observable(SystemSpec::cyclic_shift(4), Observable::table({1.0, I, -1.0, -I}),
                                        State{0}, 1, 4);
    const std::vector<std::complex<double>> expected{I, -1.0, -I, 1.0};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(close(shift.values[i], expected[i]));
    CHECK(shift.meta.power == 1);
    CHECK_THROWS_AS(orbit_observable(SystemSpec::doubling(), Observable::character(1), State{0}, -1, 3),
                    ValidationError);
}

TEST_CASE("shift preserves the uniform measure")
{
    std::vector<std::complex<double>> values;
    for (int j = 0; j < 37; ++j)
        values.emplace_back(std::cos(j * 1.3), std::sin(j * 0.7));
    const auto obs = Observable::table(values);
    const auto sys = SystemSpec::cyclic_shift(37);
    std::complex<double> before = 0.0, after = 0.0;
    for (std::uint64_t j = 0; j < 37; ++j) {
        before += obs(State{j});
        after += obs(iterate(sys, State{j}, 1));
    }
    CHECK(close(before, after));
}

TEST_CASE("orbit values are bounded by the recorded sup norm")
{
    const auto obs = Observable::interval_indicator(fixed_from_ratio(1, 3), fixed_from_ratio(1, 2));
    const auto orbit = orbit_observable(SystemSpec::doubling(), obs, State{golden_alpha().raw}, 1, 60);
    CHECK(orbit.sup_norm == 1.0);
    for (auto v : orbit.values)
        CHECK(std::abs(v) <= orbit.sup_norm);
}
