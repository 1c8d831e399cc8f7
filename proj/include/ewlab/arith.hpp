#pragma once

// Arithmetic weights: a linear smallest-prime-factor sieve and the Liouville
// and Moebius tables built from it.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace ewlab::arith {

inline constexpr std::uint64_t max_sieve_limit = std::uint64_t{1} << 31;

// Smallest prime factor table for 2..limit, built in one linear pass.
class FactorSieve {
public:
    explicit FactorSieve(std::uint64_t limit);

    std::uint64_t limit() const noexcept { return limit_; }
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }

    // spf(n) for 2 <= n <= limit.
    std::uint32_t smallest_prime_factor(std::uint64_t n) const;
    bool is_prime(std::uint64_t n) const;

    int big_omega(std::uint64_t n) const;
    int liouville(std::uint64_t n) const;
    int moebius(std::uint64_t n) const;

private:
    void check_range(std::uint64_t n, std::uint64_t lower) const;

    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

FactorSieve build_sieve(std::uint64_t n_max);

int big_omega(const FactorSieve& sieve, std::uint64_t n);
int liouville(const FactorSieve& sieve, std::uint64_t n);
int moebius(const FactorSieve& sieve, std::uint64_t n);

enum class WeightKind { liouville, moebius, constant_one, custom };

std::string_view to_string(WeightKind kind);
WeightKind parse_weight_kind(std::string_view name);

// Raw lambda/mu tables as stored in the sieve cache; index 0 holds n = 1.
struct SignTables {
    std::uint64_t limit = 0;
    std::vector<std::int8_t> liouville;
    std::vector<std::int8_t> moebius;
};

SignTables compute_sign_tables(std::uint64_t n_max);

// Bounded weight nu(1..limit), extended evenly to the integers with nu(0) = 0.
class WeightSequence {
public:
    static WeightSequence from_signs(WeightKind kind, std::vector<std::int8_t> signs);
    static WeightSequence constant_one(std::uint64_t limit);
    static WeightSequence custom(std::vector<std::complex<double>> values);

    WeightKind kind() const noexcept { return kind_; }
    std::uint64_t limit() const noexcept { return limit_; }

    // nu(n) for 1 <= n <= limit, unchecked.
    std::complex<double> operator[](std::uint64_t n) const noexcept
    {
        switch (kind_) {
        case WeightKind::constant_one: return 1.0;
        case WeightKind::custom: return custom_[n - 1];
        default: return static_cast<double>(signs_[n - 1]);
        }
    }

    std::complex<double> at(std::uint64_t n) const;
    std::complex<double> extend(std::int64_t n) const;
    bool is_real() const noexcept;

    // Copy of nu(1..count) as complex values.
    std::vector<std::complex<double>> values(std::uint64_t count) const;

private:
    WeightSequence(WeightKind kind, std::uint64_t limit) : kind_(kind), limit_(limit) {}

    WeightKind kind_;
    std::uint64_t limit_;
    std::vector<std::int8_t> signs_;
    std::vector<std::complex<double>> custom_;
};

WeightSequence weight_table(WeightKind kind, std::uint64_t n_max);
WeightSequence weight_table(const SignTables& tables, WeightKind kind, std::uint64_t n_max);

std::complex<double> partial_sum(const WeightSequence& w, std::uint64_t n);
std::complex<double> extend(const WeightSequence& w, std::int64_t n);

// Sieve cache: little-endian "EWL1", u64 N_max, lambda as i8[N_max], mu as i8[N_max].
void save_sieve_cache(const std::filesystem::path& path, const SignTables& tables);
SignTables load_sieve_cache(const std::filesystem::path& path);
std::filesystem::path sieve_cache_path(const std::filesystem::path& dir, std::uint64_t n_max);

// Loads the cached tables for n_max from dir if present and valid, otherwise
// computes them and (when dir is non-empty) writes the cache.
SignTables load_or_compute_tables(const std::filesystem::path& dir, std::uint64_t n_max,
                                  bool* cache_hit = nullptr);

} // namespace ewlab::arith
