#include "ewlab/arith.hpp"

#include "ewlab/error.hpp"

#include <cmath>
#include <string>

namespace ewlab::arith {

FactorSieve::FactorSieve(std::uint64_t limit) : limit_(limit)
{
    if (limit < 2 || limit > max_sieve_limit)
        throw ValidationError(ErrorKind::size,
                              "N_max=" + std::to_string(limit) + " outside [2, 2^31]");

    spf_.assign(limit + 1, 0);
    // pi(x) < 1.26 x / ln x
    primes_.reserve(static_cast<std::size_t>(1.26 * limit / std::log(double(limit))) + 8);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            primes_.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t spf_i = spf_[i];
        for (std::uint32_t p : primes_) {
            if (p > spf_i || std::uint64_t{p} * i > limit)
                break;
            spf_[std::uint64_t{p} * i] = p;
        }
    }
}

void FactorSieve::check_range(std::uint64_t n, std::uint64_t lower) const
{
    if (n < lower || n > limit_)
        throw ValidationError(ErrorKind::range, "n=" + std::to_string(n) + " outside [" +
                                                    std::to_string(lower) + ", " +
                                                    std::to_string(limit_) + "]");
}

std::uint32_t FactorSieve::smallest_prime_factor(std::uint64_t n) const
{
    check_range(n, 2);
    return spf_[n];
}

bool FactorSieve::is_prime(std::uint64_t n) const
{
    if (n < 2)
        return false;
    check_range(n, 2);
    return spf_[n] == n;
}

int FactorSieve::big_omega(std::uint64_t n) const
{
    check_range(n, 1);
    int count = 0;
    while (n > 1) {
        n /= spf_[n];
        ++count;
    }
    return count;
}

int FactorSieve::liouville(std::uint64_t n) const
{
    return (big_omega(n) % 2 == 0) ? 1 : -1;
}

int FactorSieve::moebius(std::uint64_t n) const
{
    check_range(n, 1);
    int sign = 1;
    std::uint32_t last = 0;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        if (p == last)
            return 0;
        last = p;
        sign = -sign;
        n /= p;
    }
    return sign;
}

FactorSieve build_sieve(std::uint64_t n_max) { return FactorSieve(n_max); }

int big_omega(const FactorSieve& sieve, std::uint64_t n) { return sieve.big_omega(n); }
int liouville(const FactorSieve& sieve, std::uint64_t n) { return sieve.liouville(n); }
int moebius(const FactorSieve& sieve, std::uint64_t n) { return sieve.moebius(n); }

std::string_view to_string(WeightKind kind)
{
    switch (kind) {
    case WeightKind::liouville: return "liouville";
    case WeightKind::moebius: return "moebius";
    case WeightKind::constant_one: return "constant_one";
    case WeightKind::custom: return "custom";
    }
    return "unknown";
}

WeightKind parse_weight_kind(std::string_view name)
{
    if (name == "liouville")
        return WeightKind::liouville;
    if (name == "moebius" || name == "mobius")
        return WeightKind::moebius;
    if (name == "constant_one" || name == "one")
        return WeightKind::constant_one;
    if (name == "custom")
        return WeightKind::custom;
    throw ValidationError(ErrorKind::validation, "weight='" + std::string(name) +
                                                     "' is not one of liouville, moebius, "
                                                     "constant_one, custom");
}

SignTables compute_sign_tables(std::uint64_t n_max)
{
    if (n_max < 1 || n_max > max_sieve_limit)
        throw ValidationError(ErrorKind::size,
                              "N_max=" + std::to_string(n_max) + " outside [1, 2^31]");
    SignTables tables;
    tables.limit = n_max;
    tables.liouville.assign(n_max, 1);
    tables.moebius.assign(n_max, 1);
    if (n_max == 1)
        return tables;

    // Linear sieve carrying the multiplicative recurrences directly:
    // lambda(p i) = -lambda(i); mu(p i) = 0 if p | i else -mu(i).
    const FactorSieve sieve(n_max);
    auto& lam = tables.liouville;
    auto& mu = tables.moebius;
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        const std::uint64_t p = sieve.smallest_prime_factor(n);
        const std::uint64_t rest = n / p;
        lam[n - 1] = static_cast<std::int8_t>(-lam[rest - 1]);
        const bool repeated = rest > 1 && rest % p == 0;
        mu[n - 1] = repeated ? std::int8_t{0} : static_cast<std::int8_t>(-mu[rest - 1]);
    }
    return tables;
}

WeightSequence WeightSequence::from_signs(WeightKind kind, std::vector<std::int8_t> signs)
{
    if (kind != WeightKind::liouville && kind != WeightKind::moebius)
        throw ValidationError(ErrorKind::validation, "sign tables only back liouville/moebius");
    if (signs.empty())
        throw ValidationError(ErrorKind::size, "empty weight table");
    WeightSequence w(kind, signs.size());
    w.signs_ = std::move(signs);
    return w;
}

WeightSequence WeightSequence::constant_one(std::uint64_t limit)
{
    if (limit < 1)
        throw ValidationError(ErrorKind::size, "N_max must be >= 1");
    return WeightSequence(WeightKind::constant_one, limit);
}

WeightSequence WeightSequence::custom(std::vector<std::complex<double>> values)
{
    if (values.empty())
        throw ValidationError(ErrorKind::size, "custom weight table is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double mag = std::abs(values[i]);
        // a hair of slack so unit-circle values computed with rounding pass
        if (!(mag <= 1.0 + 1e-12))
            throw ValidationError(ErrorKind::validation,
                                  "custom weight |nu(" + std::to_string(i + 1) +
                                      ")|=" + std::to_string(mag) + " exceeds 1");
    }
    WeightSequence w(WeightKind::custom, values.size());
    w.custom_ = std::move(values);
    return w;
}

std::complex<double> WeightSequence::at(std::uint64_t n) const
{
    if (n < 1 || n > limit_)
        throw ValidationError(ErrorKind::range, "n=" + std::to_string(n) + " outside [1, " +
                                                    std::to_string(limit_) + "]");
    return (*this)[n];
}

std::complex<double> WeightSequence::extend(std::int64_t n) const
{
    if (n == 0)
        return 0.0;
    const std::uint64_t m = n < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(n)
                                  : static_cast<std::uint64_t>(n);
    if (m > limit_)
        throw ValidationError(ErrorKind::range, "|n|=" + std::to_string(m) + " exceeds limit " +
                                                    std::to_string(limit_));
    return (*this)[m];
}

bool WeightSequence::is_real() const noexcept
{
    if (kind_ != WeightKind::custom)
        return true;
    for (const auto& v : custom_)
        if (v.imag() != 0.0)
            return false;
    return true;
}

std::vector<std::complex<double>> WeightSequence::values(std::uint64_t count) const
{
    if (count > limit_)
        throw ValidationError(ErrorKind::range, "requested " + std::to_string(count) +
                                                    " weights, limit is " +
                                                    std::to_string(limit_));
    std::vector<std::complex<double>> out(count);
    for (std::uint64_t n = 1; n <= count; ++n)
        out[n - 1] = (*this)[n];
    return out;
}

WeightSequence weight_table(const SignTables& tables, WeightKind kind, std::uint64_t n_max)
{
    if (n_max < 1)
        throw ValidationError(ErrorKind::size, "N_max must be >= 1");
    switch (kind) {
    case WeightKind::constant_one: return WeightSequence::constant_one(n_max);
    case WeightKind::custom:
        throw ValidationError(ErrorKind::validation,
                              "custom weights need caller-supplied values");
    default: break;
    }
    if (tables.limit < n_max)
        throw ValidationError(ErrorKind::range, "sign tables cover " +
                                                    std::to_string(tables.limit) +
                                                    " < N_max=" + std::to_string(n_max));
    const auto& src = kind == WeightKind::liouville ? tables.liouville : tables.moebius;
    return WeightSequence::from_signs(kind, {src.begin(), src.begin() + n_max});
}

WeightSequence weight_table(WeightKind kind, std::uint64_t n_max)
{
    if (kind == WeightKind::constant_one)
        return WeightSequence::constant_one(n_max);
    if (kind == WeightKind::custom)
        return weight_table(SignTables{}, kind, n_max);
    SignTables tables = compute_sign_tables(n_max);
    auto& src = kind == WeightKind::liouville ? tables.liouville : tables.moebius;
    return WeightSequence::from_signs(kind, std::move(src));
}

std::complex<double> partial_sum(const WeightSequence& w, std::uint64_t n)
{
    if (n < 1 || n > w.limit())
        throw ValidationError(ErrorKind::range, "N=" + std::to_string(n) + " outside [1, " +
                                                    std::to_string(w.limit()) + "]");
    std::complex<double> sum = 0.0;
    for (std::uint64_t i = 1; i <= n; ++i)
        sum += w[i];
    return sum;
}

std::complex<double> extend(const WeightSequence& w, std::int64_t n) { return w.extend(n); }

} // namespace ewlab::arith
