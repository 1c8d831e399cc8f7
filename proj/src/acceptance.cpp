#include "ewlab/acceptance.hpp"

#include "ewlab/arith.hpp"
#include "ewlab/averages.hpp"
#include "ewlab/cli.hpp"
#include "ewlab/dynsys.hpp"
#include "ewlab/error.hpp"
#include "ewlab/expsum.hpp"
#include "ewlab/kbsz.hpp"
#include "ewlab/maximal.hpp"
#include "ewlab/report.hpp"
#include "ewlab/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace ewlab::acceptance {

namespace fs = std::filesystem;
using Complex = std::complex<double>;

namespace {

// Rows of "quantity,value" plus the pass/fail verdict of the value checks.
class Sheet {
public:
    void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double value) { add(std::move(key), report::number(value)); }
    void add_int(std::string key, std::int64_t value) { add(std::move(key), std::to_string(value)); }

    bool passed = true;
    std::string detail;

    void write(const fs::path& path, const Criterion& c, const Options& options) const
    {
        std::ofstream out(path, std::ios::trunc);
        if (!out)
            throw IoError(fmt::format("cannot write '{}'", path.string()));
        report::write_csv_meta(out, {{"criterion", std::to_string(c.id)},
                                     {"name", c.name},
                                     {"seed", std::to_string(options.seed)}});
        out << "quantity,value\n";
        for (const auto& [k, v] : rows_)
            out << k << ',' << v << '\n';
        out << "values_pass," << (passed ? 1 : 0) << '\n';
        if (!out)
            throw IoError(fmt::format("write to '{}' failed", path.string()));
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

// ---- independent oracles ----------------------------------------------------

struct TrialFactor {
    int omega = 0;       // with multiplicity
    bool squarefree = true;
};

TrialFactor trial_division(std::uint64_t n)
{
    TrialFactor t;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        t.omega += e;
        if (e > 1)
            t.squarefree = false;
    }
    if (n > 1)
        ++t.omega;
    return t;
}

arith::WeightSequence liouville(std::uint64_t n)
{
    return arith::weight_table(arith::WeightKind::liouville, n);
}

// ---- criteria ---------------------------------------------------------------

void sieve_oracle(Sheet& s, const Options&)
{
    constexpr std::uint64_t n_max = 100000;
    const arith::FactorSieve sieve(n_max);
    const auto tables = arith::compute_sign_tables(n_max);
    std::uint64_t mismatches = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const auto t = trial_division(n);
        const int lambda = (t.omega % 2) ? -1 : 1;
        const int mu = t.squarefree ? lambda : 0;
        const bool sieve_ok = n == 1 || (sieve.big_omega(n) == t.omega && sieve.liouville(n) == lambda &&
                                         sieve.moebius(n) == mu);
        const bool table_ok = tables.liouville[n - 1] == lambda && tables.moebius[n - 1] == mu;
        mismatches += !(sieve_ok && table_ok);
    }
    s.add_int("n_max", n_max);
    s.add_int("mismatches", static_cast<std::int64_t>(mismatches));
    s.passed = mismatches == 0;
    s.detail = fmt::format("{} mismatches against trial division for n <= {}", mismatches, n_max);
}

void pnt_proxy(Sheet& s, const Options&)
{
    constexpr std::uint64_t n_max = 1000000;
    const auto tables = arith::compute_sign_tables(n_max);
    std::int64_t sum = 0;
    double worst = 0.0;
    std::uint64_t worst_n = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        sum += tables.liouville[n - 1];
        const double r = std::abs(static_cast<double>(sum)) / std::sqrt(static_cast<double>(n));
        if (r > worst) {
            worst = r;
            worst_n = n;
        }
    }
    const double density = std::abs(static_cast<double>(sum)) / static_cast<double>(n_max);
    s.add_int("L(1000000)", sum);
    s.add("abs_L_over_N", density);
    s.add("max_abs_L_over_sqrtN", worst);
    s.add_int("argmax_N", static_cast<std::int64_t>(worst_n));
    s.passed = density < 0.01 && worst <= 3.0;
    s.detail = fmt::format("|L(10^6)|/10^6 = {:.3g} (< 0.01), max |L(N)|/sqrt(N) = {:.3f} at N={} (<= 3)",
                           density, worst, worst_n);
}

void finitary_fourier(Sheet& s, const Options& options)
{
    constexpr std::size_t j = 1024;
    constexpr std::uint64_t n = 256;
    constexpr std::uint64_t trials = 100;
    const auto w = liouville(n);
    double worst = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto f = rng::random_sign_field(j, options.seed, 2 * t);
        const auto g = rng::random_sign_field(j, options.seed, 2 * t + 1);
        const auto direct = averages::finitary_direct(f, g, w, n);
        const auto fourier = averages::finitary_fourier(f, g, w, n);
        for (std::size_t i = 0; i < j; ++i)
            worst = std::max(worst, std::abs(direct[i] - fourier[i]));
    }
    s.add_int("J", j);
    s.add_int("N", n);
    s.add_int("trials", trials);
    s.add("max_abs_diff", worst);
    s.passed = worst < 1e-9;
    s.detail = fmt::format("max |direct - fourier| = {:.3g} over {} pairs (< 1e-9)", worst, trials);
}

void davenport_decay(Sheet& s, const Options&)
{
    const std::vector<std::uint64_t> ns{1u << 12, 1u << 16, 1u << 20};
    std::vector<std::uint64_t> grids;
    for (auto n : ns)
        grids.push_back(4 * n);
    const auto rep = expsum::decay_report(liouville(ns.back()), ns, 1, grids);
    bool decreasing = true;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        s.add(fmt::format("max_norm(N={})", rep.rows[i].n), rep.rows[i].max_norm);
        if (i > 0 && !(rep.rows[i].max_norm < rep.rows[i - 1].max_norm))
            decreasing = false;
    }
    const double first = rep.rows.front().max_norm, last = rep.rows.back().max_norm;
    s.passed = decreasing && last < first / 3.0;
    s.detail = fmt::format("max_norm {:.4g} > {:.4g} > {:.4g}; last < first/3: {}", rep.rows[0].max_norm,
                           rep.rows[1].max_norm, rep.rows[2].max_norm, last < first / 3.0);
}

void hua_decay(Sheet& s, const Options&)
{
    const auto w = liouville(1u << 14);
    const auto small = expsum::max_over_grid(w, 1u << 10, 2, 1u << 12);
    const auto large = expsum::max_over_grid(w, 1u << 14, 2, 1u << 16);
    s.add("max_norm(N=1024,G=4096)", small.max_norm);
    s.add("max_norm(N=16384,G=65536)", large.max_norm);
    s.passed = large.max_norm < small.max_norm;
    s.detail = fmt::format("k=2 max_norm {:.4g} (N=2^14) < {:.4g} (N=2^10)", large.max_norm,
                           small.max_norm);
}

void zhan_short_interval(Sheet& s, const Options&)
{
    constexpr std::uint64_t n = 1000000;
    const auto m = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), 0.7)));
    const auto result = expsum::short_interval_max(liouville(n + m), n, m, 1u << 20);
    s.add_int("N", n);
    s.add_int("M", static_cast<std::int64_t>(m));
    s.add_int("G", 1 << 20);
    s.add("max_norm", result.max_norm);
    s.add("argmax_theta", result.argmax_theta);
    s.passed = result.max_norm < 0.05;
    s.detail = fmt::format("N=10^6, M={}: normalized max = {:.4g} (< 0.05)", m, result.max_norm);
}

void rotation_average(Sheet& s, const Options&)
{
    constexpr std::uint64_t n = 1000000;
    const auto w = liouville(n);
    const auto rot = dynsys::SystemSpec::rotation(dynsys::golden_alpha());
    const auto chr = dynsys::Observable::character(1);
    const std::vector<dynsys::OrbitSequence> orbits{
        dynsys::orbit_observable(rot, chr, dynsys::State{0}, 1, n),
        dynsys::orbit_observable(rot, chr, dynsys::State{0}, 2, n),
    };
    const std::uint64_t grid[] = {n};
    const auto a_n = averages::prefix_series(w, orbits, grid).values.front();
    const auto check = averages::rotation_reduction_check(w, rot, 1, 1, 1, 2, dynsys::Fixed{0}, n);
    const double gap = std::abs(check.via_average - check.via_exp_sum);
    s.add("abs_A_N", std::abs(a_n));
    s.add("A_N_re", a_n.real());
    s.add("A_N_im", a_n.imag());
    s.add("reduction_gap", gap);
    s.passed = std::abs(a_n) < 0.01 && gap < 1e-9;
    s.detail = fmt::format("|A_N| = {:.3g} (< 0.01), reduction gap = {:.3g} (< 1e-9)", std::abs(a_n), gap);
}

void sqrtk_maximal(Sheet& s, const Options& options)
{
    constexpr std::size_t j = 1u << 12;
    constexpr double rho = 2.0;
    constexpr std::size_t k = 8;
    constexpr std::uint64_t trials = 20;
    const auto w = liouville(j - 1);
    const auto shift = dynsys::SystemSpec::cyclic_shift(j);
    const auto grid = maximal::lacunary_grid(rho, j - 1);
    double worst_ratio = 0.0, worst_gap = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto f = rng::random_sign_field(j, options.seed, 2 * t);
        const auto g = rng::random_sign_field(j, options.seed, 2 * t + 1);
        const auto stats = maximal::sqrtK_ratio(f, g, w, rho, k);
        const double base = stats.cumulative_ratio[1];
        for (double r : stats.cumulative_ratio)
            worst_ratio = std::max(worst_ratio, base > 0.0 ? r / base : 0.0);
        for (std::size_t b = 1; b <= k; ++b) {
            const auto check = maximal::transference_check(shift, f, g, w, rho, grid.block_point(b),
                                                           grid.block_point(b + 1));
            worst_gap = std::max(worst_gap, std::abs(check.seq_side - check.dyn_side));
        }
        s.add(fmt::format("ratio_K8_trial{}", t), stats.ratio);
    }
    s.add("max_ratio_over_K2", worst_ratio);
    s.add("max_transference_gap", worst_gap);
    s.passed = worst_ratio <= 4.0 && worst_gap < 1e-12;
    s.detail = fmt::format("max ratio(K)/ratio(2) = {:.3f} (<= 4), transference gap = {:.3g} (< 1e-12)",
                           worst_ratio, worst_gap);
}

void spectral_bound(Sheet& s, const Options& options)
{
    constexpr std::size_t j = 1024;
    constexpr std::uint64_t n = 256;
    const auto g = rng::random_sign_field(j, options.seed, 0);
    const auto checks = expsum::spectral_norm_check_all(g, liouville(n), n);
    double worst = 0.0;
    std::size_t violations = 0;
    for (const auto& c : checks) {
        worst = std::max(worst, c.lhs / c.rhs);
        violations += !(c.lhs <= c.rhs * (1.0 + expsum::spectral_slack));
    }
    s.add_int("characters", static_cast<std::int64_t>(checks.size()));
    s.add("max_lhs_over_rhs", worst);
    s.add_int("violations", static_cast<std::int64_t>(violations));
    s.passed = violations == 0;
    s.detail = fmt::format("max lhs/rhs = {:.4f} over {} characters (<= 1.02)", worst, checks.size());
}

void kbsz_closed_forms(Sheet& s, const Options&)
{
    constexpr std::uint64_t n = 10000;
    const auto primes = kbsz::prime_window(2, 100);
    const auto lambda = liouville(n * primes.back()).values(n * primes.back());
    double worst = 0.0;
    for (auto p : primes)
        for (auto q : primes)
            if (p != q)
                worst = std::max(worst, std::abs(kbsz::prime_pair_correlation(lambda, p, q, n) - 1.0));

    const auto alpha = dynsys::sqrt2_alpha();
    const auto orbit = dynsys::orbit_observable(dynsys::SystemSpec::rotation(alpha),
                                                dynsys::Observable::character(1), dynsys::State{0}, 1,
                                                3 * n);
    const auto c = kbsz::prime_pair_correlation(orbit.values, 2, 3, n);
    // (1/N) sum_{n<=N} e(-n alpha) as a geometric sum in long double
    const long double theta = -std::ldexp(static_cast<long double>(alpha.raw), -64);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const std::complex<long double> z = std::polar(1.0L, two_pi * theta);
    const std::complex<long double> zn = std::polar(1.0L, two_pi * theta * static_cast<long double>(n));
    const auto closed = z * (1.0L - zn) / (1.0L - z) / static_cast<long double>(n);
    const double gap = std::abs(c - Complex(static_cast<double>(closed.real()),
                                            static_cast<double>(closed.imag())));
    s.add_int("primes", static_cast<std::int64_t>(primes.size()));
    s.add("max_abs_c_minus_1", worst);
    s.add("c23_re", c.real());
    s.add("c23_im", c.imag());
    s.add("closed_form_gap", gap);
    s.passed = worst < 1e-12 && gap < 1e-9;
    s.detail = fmt::format("lambda: max |c-1| = {:.3g} (< 1e-12); rotation: |c - closed form| = {:.3g} (< 1e-9)",
                           worst, gap);
}

const std::vector<int> determinism_ids{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

std::string read_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<fs::path> cli_determinism_run(const fs::path& dir, std::uint64_t seed)
{
    std::vector<fs::path> files;
    std::ostringstream sink;
    const std::vector<std::pair<std::string, std::string>> runs{
        {"avg", "n_max = 100000\n"},
        {"finitary", "modulus = 256\nwindow = 64\ntrials = 5\n"},
        {"expsum", "ns = 1024,4096\n"},
        {"expsum", "mode = spectral\nmodulus = 256\nwindow = 64\n"},
        {"maximal", "modulus = 512\nblocks = 4\ntrials = 3\n"},
        {"kbsz", "grid = 1000,5000\ncorrelation_n = 1000\n"},
    };
    for (std::size_t i = 0; i < runs.size(); ++i) {
        auto user = config::RunConfig::parse(runs[i].second);
        user.set("seed", std::to_string(seed));
        user.set("out", (dir / fmt::format("cli{}_{}", i, runs[i].first)).string());
        const auto written = cli::run_command(runs[i].first, config::resolve(runs[i].first, user), sink,
                                              nullptr);
        files.insert(files.end(), written.begin(), written.end());
    }
    return files;
}

void determinism(Sheet& s, const Options& options)
{
    std::vector<fs::path> first, second;
    for (int run = 0; run < 2; ++run) {
        Options sub = options;
        sub.out_dir = options.out_dir / "determinism" / (run == 0 ? "run_a" : "run_b");
        std::error_code ec;
        fs::remove_all(sub.out_dir, ec);
        fs::create_directories(sub.out_dir);
        auto& files = run == 0 ? first : second;
        for (int id : determinism_ids) {
            const auto r = acceptance::run(criteria()[id - 1], sub);
            files.push_back(r.report);
        }
        const auto cli_files = cli_determinism_run(sub.out_dir, options.seed);
        files.insert(files.end(), cli_files.begin(), cli_files.end());
    }
    std::size_t differing = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const bool same = read_bytes(first[i]) == read_bytes(second[i]) && !read_bytes(first[i]).empty();
        if (!same) {
            ++differing;
            s.add("differs", first[i].filename().string());
        }
    }
    s.add_int("files_compared", static_cast<std::int64_t>(first.size()));
    s.add_int("files_differing", static_cast<std::int64_t>(differing));
    s.passed = differing == 0 && !first.empty();
    s.detail = fmt::format("{} report files compared across two runs, {} differ", first.size(), differing);
}

using Body = std::function<void(Sheet&, const Options&)>;

const std::vector<Body>& bodies()
{
    static const std::vector<Body> b{sieve_oracle,  pnt_proxy,        finitary_fourier, davenport_decay,
                                     hua_decay,     zhan_short_interval, rotation_average, sqrtk_maximal,
                                     spectral_bound, kbsz_closed_forms, determinism};
    return b;
}

} // namespace

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> list{
        {1, "sieve_oracle", "Omega, lambda, mu equal trial division for n <= 10^5", 5.0},
        {2, "pnt_proxy", "|L(10^6)|/10^6 < 0.01 and |L(N)| <= 3 sqrt(N) for N <= 10^6", 0.0},
        {3, "finitary_fourier", "direct and Fourier finitary forms agree to 1e-9", 60.0},
        {4, "davenport_decay", "k=1 max_norm strictly decreasing over 2^12, 2^16, 2^20", 120.0},
        {5, "hua_decay", "k=2 max_norm(2^14) < max_norm(2^10)", 300.0},
        {6, "zhan_short_interval", "short interval N=10^6, M=ceil(N^0.7): max < 0.05", 0.0},
        {7, "rotation_average", "golden rotation bilinear average |A_N| < 0.01 at N=10^6", 0.0},
        {8, "sqrtk_maximal", "sqrt(K) ratios within 4x of K=2; transference equality", 0.0},
        {9, "spectral_bound", "character-twisted norms below the exponential-sum bound", 0.0},
        {10, "kbsz_closed_forms", "prime-pair correlations match closed forms", 0.0},
        {11, "determinism", "repeated runs give byte-identical report files", 0.0},
    };
    return list;
}

Result run(const Criterion& criterion, const Options& options)
{
    Result result;
    result.id = criterion.id;
    result.name = criterion.name;
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec)
        throw IoError(fmt::format("cannot create '{}'", options.out_dir.string()));

    Sheet sheet;
    const auto start = std::chrono::steady_clock::now();
    bodies().at(static_cast<std::size_t>(criterion.id - 1))(sheet, options);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.seconds = elapsed.count();

    result.report = options.out_dir / fmt::format("criterion_{:02}_{}.csv", criterion.id, criterion.name);
    sheet.write(result.report, criterion, options);
    result.passed = sheet.passed;
    result.detail = sheet.detail;
    if (criterion.time_limit > 0.0 && result.seconds >= criterion.time_limit) {
        result.passed = false;
        result.detail += fmt::format("; runtime {:.1f} s exceeds {:.0f} s", result.seconds, criterion.time_limit);
    }
    return result;
}

std::vector<Result> run_selected(std::string_view selector, const Options& options)
{
    const auto& list = criteria();
    std::vector<Result> results;
    if (selector == "all") {
        for (const auto& c : list)
            results.push_back(run(c, options));
        return results;
    }
    for (const auto& c : list)
        if (c.name == selector || std::to_string(c.id) == selector)
            return {run(c, options)};
    std::string names;
    for (const auto& c : list)
        names += (names.empty() ? "" : ", ") + c.name;
    throw ValidationError(ErrorKind::validation,
                          fmt::format("--assert '{}' names no criterion (use all, 1-11 or {})", selector, names));
}

std::string format_line(const Result& result)
{
    return fmt::format("{} {:2} {}: {} ({:.2f} s)", result.passed ? "PASS" : "FAIL", result.id, result.name,
                       result.detail, result.seconds);
}

} // namespace ewlab::acceptance
