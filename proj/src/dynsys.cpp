#include "ewlab/dynsys.hpp"

#include "ewlab/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace ewlab::dynsys {

namespace {

__extension__ typedef unsigned __int128 u128;
__extension__ typedef __int128 i128;

constexpr std::int64_t max_iterate = std::int64_t{1} << 62;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t mod_floor(std::int64_t n, std::uint64_t modulus)
{
    const i128 r = static_cast<i128>(n) % static_cast<i128>(modulus);
    return static_cast<std::uint64_t>(r < 0 ? r + modulus : r);
}

} // namespace

Fixed fixed_from_double(double fraction)
{
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw ValidationError(ErrorKind::validation,
                              fmt::format("fraction {} outside [0, 1)", fraction));
    const long double scaled = std::ldexp(static_cast<long double>(fraction), 64);
    const long double rounded = std::nearbyint(scaled);
    if (rounded >= std::ldexp(1.0L, 64))
        return Fixed{0};
    return Fixed{static_cast<std::uint64_t>(rounded)};
}

Fixed fixed_from_ratio(std::int64_t numerator, std::uint64_t denominator)
{
    if (denominator == 0)
        throw ValidationError(ErrorKind::validation, "fraction denominator is 0");
    const u128 r = mod_floor(numerator, denominator);
    const u128 scaled = ((r << 64) + denominator / 2) / denominator;
    return Fixed{static_cast<std::uint64_t>(scaled)}; // 2^64 wraps to 0
}

double to_double(Fixed x) { return std::ldexp(static_cast<double>(x.raw), -64); }

Fixed quadratic_irrational(std::uint64_t d, std::int64_t b, std::uint64_t c)
{
    using boost::multiprecision::cpp_int;
    if (c == 0)
        throw ValidationError(ErrorKind::validation, "quadratic irrational divisor is 0");
    constexpr unsigned extra = 72;
    const cpp_int one = 1;
    // floor(sqrt(d) * 2^72) + b * 2^72 represents (sqrt(d) + b) scaled by 2^72
    cpp_int scaled = boost::multiprecision::sqrt(cpp_int(d) << (2 * extra));
    scaled += cpp_int(b) << extra;
    const cpp_int period = cpp_int(c) << extra;
    cpp_int frac = scaled % period;
    if (frac < 0)
        frac += period;
    const cpp_int unit = cpp_int(c) << (extra - 64);
    cpp_int raw = (frac + unit / 2) / unit;
    raw %= (one << 64);
    return Fixed{raw.convert_to<std::uint64_t>()};
}

Fixed golden_alpha() { return quadratic_irrational(5, -1, 2); }
Fixed sqrt2_alpha() { return quadratic_irrational(2, -1, 1); }

Fixed parse_fraction(std::string_view text)
{
    const std::string s(text);
    if (s == "golden")
        return golden_alpha();
    if (s == "sqrt2")
        return sqrt2_alpha();
    try {
        if (const auto slash = s.find('/'); slash != std::string::npos) {
            std::size_t used_p = 0, used_q = 0;
            const auto p = std::stoll(s.substr(0, slash), &used_p);
            const auto q = std::stoull(s.substr(slash + 1), &used_q);
            if (used_p != slash || used_q != s.size() - slash - 1)
                throw std::invalid_argument(s);
            return fixed_from_ratio(p, q);
        }
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return fixed_from_double(v);
    } catch (const std::logic_error&) {
        throw ValidationError(ErrorKind::validation,
                              "cannot parse fraction '" + s +
                                  "' (expected golden, sqrt2, p/q or a decimal in [0,1))");
    }
}

std::complex<double> unit_phase(Fixed x)
{
    // centre on (-1/2, 1/2] so the angle keeps full relative precision near 0
    const double turns = std::ldexp(static_cast<double>(static_cast<std::int64_t>(x.raw)), -64);
    return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

SystemSpec SystemSpec::rotation(Fixed alpha)
{
    return SystemSpec(Rotation{alpha},
                      fmt::format("rotation(alpha={:.17g},raw={})", to_double(alpha), alpha.raw));
}

SystemSpec SystemSpec::doubling() { return SystemSpec(Doubling{}, "doubling (empirical analog)"); }

SystemSpec SystemSpec::cyclic_shift(std::uint64_t modulus)
{
    if (modulus < 1)
        throw ValidationError(ErrorKind::validation, "cyclic_shift modulus J must be >= 1");
    return SystemSpec(CyclicShift{modulus}, fmt::format("cyclic_shift(J={})", modulus));
}

std::uint64_t SystemSpec::modulus() const noexcept
{
    if (const auto* c = std::get_if<CyclicShift>(&variant_))
        return c->modulus;
    return 0;
}

State iterate(const SystemSpec& sys, State x, std::int64_t n)
{
    if (n > max_iterate || n < -max_iterate)
        throw ValidationError(ErrorKind::range, fmt::format("|n|={} exceeds 2^62", n));
    return std::visit(
        overloaded{
            [&](const Rotation& r) {
                return State{x.value + static_cast<std::uint64_t>(n) * r.alpha.raw};
            },
            [&](const Doubling&) {
                if (n < 0)
                    throw ValidationError(ErrorKind::non_invertible,
                                          fmt::format("doubling map has no inverse (n={})", n));
                return State{n >= 64 ? 0 : x.value << n};
            },
            [&](const CyclicShift& c) {
                if (x.value >= c.modulus)
                    throw ValidationError(ErrorKind::validation,
                                          fmt::format("x={} outside Z_{}", x.value, c.modulus));
                return State{mod_floor(static_cast<std::int64_t>(x.value % c.modulus) +
                                           static_cast<std::int64_t>(mod_floor(n, c.modulus)),
                                       c.modulus)};
            },
        },
        sys.variant());
}

Observable Observable::character(std::int64_t k) { return Observable(Character{k}, 1.0); }

Observable Observable::interval_indicator(Fixed left, Fixed right)
{
    return Observable(IntervalIndicator{left, right}, left == right ? 0.0 : 1.0);
}

Observable Observable::table(std::vector<std::complex<double>> values)
{
    if (values.empty())
        throw ValidationError(ErrorKind::validation, "table observable needs at least one value");
    double sup = 0.0;
    for (const auto& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError(ErrorKind::validation, "table observable has a non-finite value");
        sup = std::max(sup, std::abs(v));
    }
    return Observable(TableObservable{std::move(values)}, sup);
}

std::string Observable::describe() const
{
    return std::visit(
        overloaded{
            [](const Character& c) { return fmt::format("character(k={})", c.frequency); },
            [](const IntervalIndicator& i) {
                return fmt::format("indicator({:.17g},{:.17g})", to_double(i.left),
                                   to_double(i.right));
            },
            [](const TableObservable& t) { return fmt::format("table(J={})", t.values.size()); },
        },
        variant_);
}

void Observable::check_domain(const SystemSpec& sys) const
{
    const bool is_table = std::holds_alternative<TableObservable>(variant_);
    if (is_table) {
        const auto size = std::get<TableObservable>(variant_).values.size();
        if (!sys.is_cyclic() || sys.modulus() != size)
            throw ValidationError(ErrorKind::validation,
                                  fmt::format("table observable of length {} needs "
                                              "cyclic_shift with J={}, got {}",
                                              size, size, sys.description()));
    } else if (sys.is_cyclic()) {
        throw ValidationError(ErrorKind::validation,
                              describe() + " lives on the circle, not on " + sys.description());
    }
}

std::complex<double> Observable::operator()(State x) const
{
    return std::visit(
        overloaded{
            [&](const Character& c) -> std::complex<double> {
                return unit_phase(Fixed{static_cast<std::uint64_t>(c.frequency) * x.value});
            },
            [&](const IntervalIndicator& i) -> std::complex<double> {
                const auto v = x.value;
                const bool inside = i.left.raw <= i.right.raw
                                        ? (v >= i.left.raw && v < i.right.raw)
                                        : (v >= i.left.raw || v < i.right.raw);
                return inside ? 1.0 : 0.0;
            },
            [&](const TableObservable& t) -> std::complex<double> {
                return t.values[x.value];
            },
        },
        variant_);
}

OrbitSequence orbit_observable(const SystemSpec& sys, const Observable& obs, State x,
                               std::int64_t power, std::uint64_t length)
{
    obs.check_domain(sys);
    if (length < 1)
        throw ValidationError(ErrorKind::validation, "orbit length N must be >= 1");
    const u128 reach = static_cast<u128>(power < 0 ? -static_cast<i128>(power) : power) * length;
    if (reach > static_cast<u128>(max_iterate))
        throw ValidationError(ErrorKind::range,
                              fmt::format("|a|*N = {}*{} exceeds 2^62", power, length));

    OrbitSequence orbit;
    orbit.meta = {sys.description(), obs.describe(), x, power};
    orbit.sup_norm = obs.sup_norm();
    orbit.values.resize(length);

    // Each branch steps the state incrementally; every step equals iterate(sys, x, a n)
    // exactly because all three group laws are modular integer arithmetic.
    std::visit(overloaded{
                   [&](const Rotation& r) {
                       const std::uint64_t step = static_cast<std::uint64_t>(power) * r.alpha.raw;
                       std::uint64_t s = x.value;
                       for (auto& v : orbit.values) {
                           s += step;
                           v = obs(State{s});
                       }
                   },
                   [&](const Doubling&) {
                       if (power < 0)
                           throw ValidationError(
                               ErrorKind::non_invertible,
                               fmt::format("doubling map has no inverse (power={})", power));
                       for (std::uint64_t n = 1; n <= length; ++n) {
                           const u128 shift = static_cast<u128>(power) * n;
                           orbit.values[n - 1] = obs(State{shift >= 64 ? 0 : x.value << shift});
                       }
                   },
                   [&](const CyclicShift& c) {
                       if (x.value >= c.modulus)
                           throw ValidationError(ErrorKind::validation,
                                                 fmt::format("x={} outside Z_{}", x.value, c.modulus));
                       const std::uint64_t step = mod_floor(power, c.modulus);
                       std::uint64_t s = x.value;
                       for (auto& v : orbit.values) {
                           s += step;
                           if (s >= c.modulus)
                               s -= c.modulus;
                           v = obs(State{s});
                       }
                   },
               },
               sys.variant());
    return orbit;
}

} // namespace ewlab::dynsys
