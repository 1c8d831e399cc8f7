#include "ewlab/error.hpp"
#include "ewlab/expsum.hpp"
#include "ewlab/kbsz.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ewlab;
using arith::WeightKind;
using kbsz::Complex;

namespace {

std::vector<Complex> rotation_character(dynsys::Fixed alpha, std::uint64_t length)
{
    const auto rot = dynsys::SystemSpec::rotation(alpha);
    const std::vector<dynsys::Observable> obs{dynsys::Observable::character(1)};
    const std::vector<std::int64_t> powers{1};
    return kbsz::product_observable(rot, obs, powers, dynsys::State{0}, length);
}

// (1/N) sum_{n<=N} e(n t) in closed form, t in turns.
Complex geometric_mean(long double t, std::uint64_t n)
{
    const long double pi = std::numbers::pi_v<long double>;
    const long double s = std::sin(pi * t);
    if (std::abs(s) < 1e-18L)
        return 1.0;
    const long double mag = std::sin(pi * t * n) / (s * n);
    const long double phase = pi * t * (n + 1);
    return {static_cast<double>(mag * std::cos(phase)), static_cast<double>(mag * std::sin(phase))};
}

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const ValidationError& e) {
        return e.kind();
    }
    FAIL("no ValidationError thrown");
    return ErrorKind::validation;
}

kbsz::CriterionOptions small_window()
{
    kbsz::CriterionOptions opt;
    opt.p_min = 2;
    opt.p_max = 13;
    return opt;
}

} // namespace

TEST_CASE("prime helpers")
{
    CHECK(kbsz::prime_window(11, 31) == std::vector<std::uint32_t>{11, 13, 17, 19, 23, 29, 31});
    CHECK(kbsz::prime_window(24, 28).empty());
    CHECK_FALSE(kbsz::is_prime(1));
    CHECK(kbsz::is_prime(97));
}

TEST_CASE("constant sequence correlates perfectly")
{
    const std::vector<Complex> ones(2000, 1.0);
    for (auto [p, q] : {std::pair{2, 3}, std::pair{5, 13}, std::pair{7, 11}})
        CHECK(kbsz::prime_pair_correlation(ones, p, q, 100) == Complex(1.0, 0.0));
}

TEST_CASE("liouville prime dilates correlate exactly")
{
    const auto lambda = arith::weight_table(WeightKind::liouville, 97 * 1000);
    const auto seq = lambda.values(lambda.limit());
    for (auto [p, q] : {std::pair{2, 3}, std::pair{11, 97}, std::pair{53, 59}})
        CHECK(kbsz::prime_pair_correlation(seq, p, q, 1000) == Complex(1.0, 0.0));
}

TEST_CASE("rotation correlation matches the geometric closed form")
{
    const auto alpha = dynsys::golden_alpha();
    const auto seq = rotation_character(alpha, 13 * 5000);
    const long double a = static_cast<long double>(alpha.raw) / 18446744073709551616.0L;
    for (auto [p, q] : {std::pair{2, 3}, std::pair{5, 13}, std::pair{11, 7}}) {
        const auto c = kbsz::prime_pair_correlation(seq, p, q, 5000);
        const auto expected = geometric_mean(static_cast<long double>(p - q) * a, 5000);
        CHECK(std::abs(c - expected) < 1e-9);
    }
}

TEST_CASE("correlation preconditions")
{
    const std::vector<Complex> ones(100, 1.0);
    CHECK(kind_of([&] { kbsz::prime_pair_correlation(ones, 3, 3, 10); }) == ErrorKind::validation);
    CHECK(kind_of([&] { kbsz::prime_pair_correlation(ones, 4, 3, 10); }) == ErrorKind::validation);
    CHECK(kind_of([&] { kbsz::prime_pair_correlation(ones, 3, 11, 10); }) == ErrorKind::length);
}

TEST_CASE("criterion report agrees with direct sums")
{
    const auto lambda = arith::weight_table(WeightKind::liouville, 20000);
    const auto seq = rotation_character(dynsys::sqrt2_alpha(), 13 * 1000);
    const std::vector<std::uint64_t> grid{10, 100, 1000, 10000};
    auto opt = small_window();
    opt.correlation_n = 1000;
    const auto rep = kbsz::criterion_report(seq, "rotation", lambda, grid, opt);
    REQUIRE(rep.primes == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13});
    REQUIRE(rep.weighted.size() == grid.size());

    double offdiag = 0.0;
    for (std::size_t i = 0; i < rep.primes.size(); ++i)
        for (std::size_t j = 0; j < rep.primes.size(); ++j) {
            const auto c = rep.at(i, j);
            if (i == j) {
                CHECK(std::abs(c - 1.0) < 1e-12);
                continue;
            }
            CHECK(std::abs(c - kbsz::prime_pair_correlation(seq, rep.primes[i], rep.primes[j], 1000)) < 1e-12);
            // Hermitian symmetry
            CHECK(std::abs(c - std::conj(rep.at(j, i))) < 1e-15);
            CHECK(std::abs(c) <= 1.0 + 1e-12);
            offdiag = std::max(offdiag, std::abs(c));
        }
    CHECK(rep.max_offdiagonal == doctest::Approx(offdiag));

    for (std::size_t i = 0; i < grid.size(); ++i) {
        Complex sum = 0.0;
        for (std::uint64_t n = 1; n <= grid[i]; ++n)
            sum += lambda[n] * seq[n - 1];
        CHECK(std::abs(rep.weighted[i] - sum / static_cast<double>(grid[i])) < 1e-12);
        CHECK(std::abs(rep.weighted[i]) <= 1.0 + 1e-12);
    }

    const auto one_weight = arith::weight_table(WeightKind::constant_one, 20000);
    const auto bounded = kbsz::criterion_report(seq, "rotation", one_weight, grid, opt);
    CHECK(bounded.aperiodicity == doctest::Approx(1.0));
    CHECK_FALSE(bounded.aperiodic_plausible);
}

TEST_CASE("zero weight gives zero averages")
{
    const auto zero = arith::WeightSequence::custom(std::vector<Complex>(5000, 0.0));
    const auto seq = rotation_character(dynsys::golden_alpha(), 13 * 5000);
    const std::vector<std::uint64_t> grid{100, 5000};
    const auto rep = kbsz::criterion_report(seq, "rotation", zero, grid, small_window());
    for (auto v : rep.weighted)
        CHECK(v == Complex(0.0, 0.0));
    CHECK(rep.aperiodicity == 0.0);
}

TEST_CASE("golden rotation looks orthogonal to liouville")
{
    const auto lambda = arith::weight_table(WeightKind::liouville, 100000);
    kbsz::CriterionOptions opt;
    opt.correlation_n = 10000;
    const auto seq = rotation_character(dynsys::golden_alpha(), 97 * 10000 + 1);
    const std::vector<std::uint64_t> grid{1000, 10000, 100000};
    const auto rep = kbsz::criterion_report(seq, "rotation", lambda, grid, opt);
    CHECK(rep.hypothesis_plausible);
    CHECK(std::abs(rep.weighted.back()) < 0.05);
    CHECK(rep.aperiodic_plausible);
}

TEST_CASE("report length errors")
{
    const auto lambda = arith::weight_table(WeightKind::liouville, 1000);
    const std::vector<Complex> shortseq(500, 1.0);
    const std::vector<std::uint64_t> grid{100, 1000};
    CHECK(kind_of([&] { kbsz::criterion_report(shortseq, "s", lambda, grid, small_window()); }) ==
          ErrorKind::length);
    const std::vector<Complex> longer(5000, 1.0);
    CHECK(kind_of([&] { kbsz::criterion_report(longer, "s", lambda, grid, small_window()); }) ==
          ErrorKind::length);
    const std::vector<std::uint64_t> unsorted{1000, 100};
    CHECK(kind_of([&] { kbsz::criterion_report(longer, "s", lambda, unsorted, small_window()); }) ==
          ErrorKind::validation);
    auto narrow = small_window();
    narrow.p_min = 24;
    narrow.p_max = 28;
    CHECK(kind_of([&] { kbsz::criterion_report(longer, "s", lambda, std::vector<std::uint64_t>{10}, narrow); }) ==
          ErrorKind::validation);
}

TEST_CASE("product observables")
{
    const auto alpha = dynsys::golden_alpha();
    const auto rot = dynsys::SystemSpec::rotation(alpha);
    const auto x = dynsys::fixed_from_ratio(1, 7);

    const std::vector<dynsys::Observable> single{dynsys::Observable::character(1)};
    const std::vector<std::int64_t> p1{1};
    const auto f = kbsz::product_observable(rot, single, p1, dynsys::State{x.raw}, 50);
    const auto orbit = dynsys::orbit_observable(rot, single[0], dynsys::State{x.raw}, 1, 50);
    CHECK(f == orbit.values);

    const std::vector<dynsys::Observable> trivial(3, dynsys::Observable::character(0));
    const std::vector<std::int64_t> p123{1, 2, 3};
    for (auto v : kbsz::product_observable(rot, trivial, p123, dynsys::State{x.raw}, 20))
        CHECK(v == Complex(1.0, 0.0));

    const std::vector<dynsys::Observable> chars(3, dynsys::Observable::character(1));
    const auto prod = kbsz::product_observable(rot, chars, p123, dynsys::State{x.raw}, 200);
    for (std::uint64_t n = 1; n <= 200; ++n) {
        const dynsys::Fixed phase{3 * x.raw + 6 * n * alpha.raw};
        REQUIRE(std::abs(prod[n - 1] - dynsys::unit_phase(phase)) < 1e-12);
    }

    const std::vector<std::int64_t> dup{1, 1, 2};
    CHECK(kind_of([&] { kbsz::product_observable(rot, chars, dup, dynsys::State{0}, 5); }) ==
          ErrorKind::validation);
    CHECK(kind_of([&] { kbsz::product_observable(rot, chars, p1, dynsys::State{0}, 5); }) == ErrorKind::length);
}

TEST_CASE("commuting rotations")
{
    const auto lambda = arith::weight_table(WeightKind::liouville, 100000);
    const auto golden = dynsys::golden_alpha();
    const auto sqrt2 = dynsys::sqrt2_alpha();
    const std::vector<dynsys::SystemSpec> rots{dynsys::SystemSpec::rotation(golden),
                                               dynsys::SystemSpec::rotation(sqrt2)};
    const std::vector<dynsys::Observable> obs{dynsys::Observable::character(2), dynsys::Observable::character(-1)};
    const std::vector<std::uint64_t> grid{1000, 10000, 100000};
    kbsz::CriterionOptions opt;
    opt.correlation_n = 1000;
    const auto rep = kbsz::commuting_experiment(rots, obs, dynsys::State{0}, lambda, grid, opt);
    REQUIRE(rep.weighted.size() == 3);
    CHECK(rep.label.find("empirical") != std::string::npos);

    // with x = 0 the product is e(n (2 golden - sqrt2)): a single exponential sum
    const dynsys::Fixed theta{2 * golden.raw - sqrt2.raw};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto direct = expsum::exp_sum(lambda, grid[i], theta, 1) / static_cast<double>(grid[i]);
        CHECK(std::abs(rep.weighted[i] - direct) < 1e-9);
    }
    CHECK(std::abs(rep.weighted.back()) < 0.05);

    CHECK(kind_of([&] {
              const std::vector<dynsys::SystemSpec> one{rots[0]};
              const std::vector<dynsys::Observable> o{obs[0]};
              kbsz::commuting_experiment(one, o, dynsys::State{0}, lambda, grid, opt);
          }) == ErrorKind::validation);
    CHECK(kind_of([&] {
              const std::vector<dynsys::SystemSpec> mixed{rots[0], dynsys::SystemSpec::doubling()};
              kbsz::commuting_experiment(mixed, obs, dynsys::State{0}, lambda, grid, opt);
          }) == ErrorKind::validation);
    CHECK(kind_of([&] {
              const std::vector<dynsys::SystemSpec> same{rots[0], rots[0]};
              kbsz::commuting_experiment(same, obs, dynsys::State{0}, lambda, grid, opt);
          }) == ErrorKind::validation);
}

TEST_CASE("JSON report fields")
{
    const auto lambda = arith::weight_table(WeightKind::liouville, 1000);
    const auto seq = rotation_character(dynsys::golden_alpha(), 13 * 1000);
    const std::vector<std::uint64_t> grid{10, 1000};
    auto rep = kbsz::criterion_report(seq, "rotation", lambda, grid, small_window());
    rep.config = {{"weight", "liouville"}};
    std::ostringstream out;
    kbsz::write_json(out, rep);
    const auto doc = nlohmann::json::parse(out.str());
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["tool"] == "ewlab 1.0.0");
    CHECK(doc["label"] == "empirical");
    CHECK(doc["sequence"] == "rotation");
    CHECK(doc["primes"].size() == 6);
    CHECK(doc["correlation_N"] == 1000);
    CHECK(doc["matrix"].size() == 36);
    CHECK(doc["weighted_average"].size() == 2);
    CHECK(doc["weighted_average"][1][0] == 1000);
    CHECK(doc["flags"].contains("hypothesis_plausible"));
    CHECK(doc["flags"]["threshold"] == 0.1);
    CHECK(doc["config"]["weight"] == "liouville");
}
