#pragma once

// Desk-scale measure-preserving systems. Points on the circle are 64-bit
// fixed-point fractions (x / 2^64), so rotation orbits obey the group law
// bit-exactly.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ewlab::dynsys {

// Fraction of the unit circle as a numerator over 2^64.
struct Fixed {
    std::uint64_t raw = 0;

    friend bool operator==(Fixed, Fixed) = default;
};

Fixed fixed_from_double(double fraction);
Fixed fixed_from_ratio(std::int64_t numerator, std::uint64_t denominator);
double to_double(Fixed x);

// Nearest fixed-point approximant of frac((sqrt(d) + b) / c).
Fixed quadratic_irrational(std::uint64_t d, std::int64_t b, std::uint64_t c);
Fixed golden_alpha(); // (sqrt 5 - 1) / 2
Fixed sqrt2_alpha();  // sqrt 2 - 1

// Parses "golden", "sqrt2", "p/q" or a decimal in [0, 1).
Fixed parse_fraction(std::string_view text);

// e^{2 pi i x}
std::complex<double> unit_phase(Fixed x);

struct Rotation {
    Fixed alpha;
};
struct Doubling {};
struct CyclicShift {
    std::uint64_t modulus = 1;
};

class SystemSpec {
public:
    using Variant = std::variant<Rotation, Doubling, CyclicShift>;

    static SystemSpec rotation(Fixed alpha);
    static SystemSpec doubling();
    static SystemSpec cyclic_shift(std::uint64_t modulus);

    const Variant& variant() const noexcept { return variant_; }
    const std::string& description() const noexcept { return description_; }
    bool is_rotation() const noexcept { return std::holds_alternative<Rotation>(variant_); }
    bool is_doubling() const noexcept { return std::holds_alternative<Doubling>(variant_); }
    bool is_cyclic() const noexcept { return std::holds_alternative<CyclicShift>(variant_); }
    bool invertible() const noexcept { return !is_doubling(); }

    // Modulus of a cyclic shift, 0 for circle systems.
    std::uint64_t modulus() const noexcept;

private:
    SystemSpec(Variant v, std::string description)
        : variant_(v), description_(std::move(description))
    {}

    Variant variant_;
    std::string description_;
};

// A point of the state space: a fixed-point fraction for circle systems, a
// residue in [0, J) for the cyclic shift.
struct State {
    std::uint64_t value = 0;

    friend bool operator==(State, State) = default;
};

State iterate(const SystemSpec& sys, State x, std::int64_t n);

struct Character {
    std::int64_t frequency = 0;
};
// 1 on [left, right) of the circle, wrapping when left > right.
struct IntervalIndicator {
    Fixed left;
    Fixed right;
};
struct TableObservable {
    std::vector<std::complex<double>> values;
};

class Observable {
public:
    using Variant = std::variant<Character, IntervalIndicator, TableObservable>;

    static Observable character(std::int64_t k);
    static Observable interval_indicator(Fixed left, Fixed right);
    static Observable table(std::vector<std::complex<double>> values);

    const Variant& variant() const noexcept { return variant_; }
    double sup_norm() const noexcept { return sup_norm_; }
    std::string describe() const;

    // Throws unless this observable lives on the state space of sys.
    void check_domain(const SystemSpec& sys) const;

    std::complex<double> operator()(State x) const;

private:
    Observable(Variant v, double sup) : variant_(std::move(v)), sup_norm_(sup) {}

    Variant variant_;
    double sup_norm_;
};

struct OrbitMeta {
    std::string system;
    std::string observable;
    State start;
    std::int64_t power = 1;
};

struct OrbitSequence {
    std::vector<std::complex<double>> values; // values[n-1] = f(T^{a n} x)
    OrbitMeta meta;
    double sup_norm = 0.0;
};

OrbitSequence orbit_observable(const SystemSpec& sys, const Observable& obs, State x,
                               std::int64_t power, std::uint64_t length);

} // namespace ewlab::dynsys
