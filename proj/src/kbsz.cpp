#include "ewlab/kbsz.hpp"

#include "ewlab/error.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <json.hpp>
#include <set>

namespace ewlab::kbsz {

bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

std::vector<std::uint32_t> prime_window(std::uint32_t lo, std::uint32_t hi)
{
    std::vector<std::uint32_t> primes;
    for (std::uint32_t p = lo; p <= hi && p >= lo; ++p)
        if (is_prime(p))
            primes.push_back(p);
    return primes;
}

Complex prime_pair_correlation(std::span<const Complex> sequence, std::uint64_t p,
                               std::uint64_t q, std::uint64_t n)
{
    if (p == q || !is_prime(p) || !is_prime(q))
        throw ValidationError(ErrorKind::validation,
                              fmt::format("p={}, q={} must be distinct primes", p, q));
    if (n < 1)
        throw ValidationError(ErrorKind::validation, "N must be >= 1");
    if (sequence.size() < n * std::max(p, q))
        throw ValidationError(ErrorKind::length,
                              fmt::format("sequence length {} < N*max(p,q) = {}", sequence.size(),
                                          n * std::max(p, q)));
    Complex sum = 0.0;
    for (std::uint64_t i = 1; i <= n; ++i)
        sum += sequence[i * p - 1] * std::conj(sequence[i * q - 1]);
    return sum / static_cast<double>(n);
}

double aperiodicity(const arith::WeightSequence& w, unsigned max_a, unsigned max_b)
{
    double worst = 0.0;
    for (std::uint64_t a = 1; a <= max_a; ++a) {
        for (std::uint64_t b = 0; b <= max_b; ++b) {
            if (w.limit() < a + b)
                continue;
            const std::uint64_t count = (w.limit() - b) / a;
            Complex sum = 0.0;
            for (std::uint64_t n = 1; n <= count; ++n)
                sum += w[a * n + b];
            worst = std::max(worst, std::abs(sum) / static_cast<double>(count));
        }
    }
    return worst;
}

CorrelationReport criterion_report(std::span<const Complex> sequence, std::string descriptor,
                                   const arith::WeightSequence& w,
                                   std::span<const std::uint64_t> grid,
                                   const CriterionOptions& options)
{
    if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()) || grid.front() < 1)
        throw ValidationError(ErrorKind::validation, "N grid must be non-empty, ascending, >= 1");
    const std::uint64_t n_max = grid.back();
    if (sequence.size() < n_max)
        throw ValidationError(ErrorKind::length, fmt::format("sequence length {} < max grid N={}",
                                                             sequence.size(), n_max));
    if (w.limit() < n_max)
        throw ValidationError(ErrorKind::range, fmt::format("weight table limit {} < max grid N={}",
                                                            w.limit(), n_max));

    CorrelationReport report;
    report.sequence = std::move(descriptor);
    report.label = "empirical";
    report.primes = prime_window(options.p_min, options.p_max);
    if (report.primes.size() < 2)
        throw ValidationError(ErrorKind::validation,
                              fmt::format("prime window [{}, {}] holds fewer than two primes",
                                          options.p_min, options.p_max));
    report.correlation_n = options.correlation_n ? options.correlation_n : n_max;
    const std::uint64_t need = report.correlation_n * report.primes.back();
    if (sequence.size() < need)
        throw ValidationError(ErrorKind::length,
                              fmt::format("sequence length {} < correlation N * P_max = {}",
                                          sequence.size(), need));

    const std::size_t k = report.primes.size();
    report.matrix.assign(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::uint64_t p = report.primes[i], q = report.primes[j];
            if (j < i) {
                // c(q,p) = conj(c(p,q)) term by term
                report.matrix[i * k + j] = std::conj(report.matrix[j * k + i]);
                continue;
            }
            Complex sum = 0.0;
            for (std::uint64_t n = 1; n <= report.correlation_n; ++n)
                sum += sequence[n * p - 1] * std::conj(sequence[n * q - 1]);
            report.matrix[i * k + j] = sum / static_cast<double>(report.correlation_n);
            if (i != j)
                report.max_offdiagonal = std::max(report.max_offdiagonal, std::abs(report.matrix[i * k + j]));
        }
    }

    report.grid.assign(grid.begin(), grid.end());
    Complex sum = 0.0;
    std::size_t next = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        sum += w[n] * sequence[n - 1];
        while (next < grid.size() && grid[next] == n) {
            report.weighted.push_back(sum / static_cast<double>(n));
            ++next;
        }
    }

    report.threshold = options.threshold;
    report.hypothesis_plausible = report.max_offdiagonal < options.threshold;
    report.aperiodicity = aperiodicity(w);
    report.aperiodic_plausible = report.aperiodicity < options.threshold;
    return report;
}

std::vector<Complex> product_observable(const dynsys::SystemSpec& sys,
                                        std::span<const dynsys::Observable> observables,
                                        std::span<const std::int64_t> powers, dynsys::State x,
                                        std::uint64_t length)
{
    if (observables.empty())
        throw ValidationError(ErrorKind::validation, "product needs at least one observable");
    if (powers.size() != observables.size())
        throw ValidationError(ErrorKind::length,
                              fmt::format("{} observables but {} powers", observables.size(), powers.size()));
    if (std::set<std::int64_t>(powers.begin(), powers.end()).size() != powers.size() ||
        std::any_of(powers.begin(), powers.end(), [](std::int64_t a) { return a < 1; }))
        throw ValidationError(ErrorKind::validation, "powers must be distinct positive integers");

    std::vector<Complex> product(length, 1.0);
    for (std::size_t i = 0; i < observables.size(); ++i) {
        const auto orbit = dynsys::orbit_observable(sys, observables[i], x, powers[i], length);
        for (std::uint64_t n = 0; n < length; ++n)
            product[n] *= orbit.values[n];
    }
    return product;
}

CorrelationReport commuting_experiment(std::span<const dynsys::SystemSpec> rotations,
                                       std::span<const dynsys::Observable> observables,
                                       dynsys::State x, const arith::WeightSequence& w,
                                       std::span<const std::uint64_t> grid,
                                       const CriterionOptions& options)
{
    if (rotations.size() < 2)
        throw ValidationError(ErrorKind::validation, "commuting experiment needs l >= 2 systems");
    if (rotations.size() != observables.size())
        throw ValidationError(ErrorKind::length,
                              fmt::format("{} systems but {} observables", rotations.size(),
                                          observables.size()));
    std::set<std::uint64_t> angles;
    for (const auto& sys : rotations) {
        if (!sys.is_rotation())
            throw ValidationError(ErrorKind::validation,
                                  "commuting experiment only accepts rotations (commuting by "
                                  "construction), got " + sys.description());
        angles.insert(std::get<dynsys::Rotation>(sys.variant()).alpha.raw);
    }
    if (angles.size() != rotations.size())
        throw ValidationError(ErrorKind::validation, "rotation angles must be distinct");
    if (grid.empty())
        throw ValidationError(ErrorKind::validation, "N grid is empty");

    const std::uint64_t corr_n = options.correlation_n ? options.correlation_n : grid.back();
    const std::uint64_t length = std::max<std::uint64_t>(grid.back(), corr_n * options.p_max);
    std::vector<Complex> product(length, 1.0);
    std::string descriptor = "commuting";
    for (std::size_t i = 0; i < rotations.size(); ++i) {
        const auto orbit = dynsys::orbit_observable(rotations[i], observables[i], x, 1, length);
        for (std::uint64_t n = 0; n < length; ++n)
            product[n] *= orbit.values[n];
        descriptor += " " + rotations[i].description() + ":" + observables[i].describe();
    }
    auto report = criterion_report(product, descriptor, w, grid, options);
    report.label = "conjecture experiment: empirical only";
    return report;
}

void write_json(std::ostream& out, const CorrelationReport& report)
{
    using json = nlohmann::ordered_json;
    json doc;
    doc["schema_version"] = report::schema_version;
    doc["tool"] = fmt::format("{} {}", report::tool_name, report::tool_version);
    doc["label"] = report.label;
    doc["sequence"] = report.sequence;
    doc["primes"] = report.primes;
    doc["correlation_N"] = report.correlation_n;
    json matrix = json::array();
    for (const auto& c : report.matrix)
        matrix.push_back({c.real(), c.imag()});
    doc["matrix"] = std::move(matrix);
    json series = json::array();
    for (std::size_t i = 0; i < report.grid.size(); ++i)
        series.push_back({report.grid[i], report.weighted[i].real(), report.weighted[i].imag(),
                          std::abs(report.weighted[i])});
    doc["weighted_average"] = std::move(series);
    doc["flags"] = {
        {"threshold", report.threshold},
        {"max_offdiagonal", report.max_offdiagonal},
        {"hypothesis_plausible", report.hypothesis_plausible},
        {"aperiodicity", report.aperiodicity},
        {"aperiodic_plausible", report.aperiodic_plausible},
    };
    json config = json::object();
    for (const auto& [key, value] : report.config)
        config[key] = value;
    doc["config"] = std::move(config);
    out << doc.dump(2) << '\n';
}

} // namespace ewlab::kbsz
