#include "ewlab/cli.hpp"

#include "ewlab/acceptance.hpp"
#include "ewlab/averages.hpp"
#include "ewlab/error.hpp"
#include "ewlab/expsum.hpp"
#include "ewlab/kbsz.hpp"
#include "ewlab/maximal.hpp"
#include "ewlab/report.hpp"
#include "ewlab/rng.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>

namespace ewlab::cli {

namespace fs = std::filesystem;
using Complex = std::complex<double>;

namespace {

class Stopwatch {
public:
    Stopwatch(std::ostream* sink, std::string label)
        : sink_(sink), label_(std::move(label)), start_(std::chrono::steady_clock::now())
    {}
    void note(std::string_view extra = {})
    {
        if (!sink_)
            return;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        *sink_ << fmt::format("timing: {} {:.3f} s{}{}\n", label_, elapsed.count(),
                              extra.empty() ? "" : " ", extra);
    }

private:
    std::ostream* sink_;
    std::string label_;
    std::chrono::steady_clock::time_point start_;
};

report::Meta echo_meta(std::string_view command, const config::RunConfig& cfg)
{
    report::Meta meta{{"command", std::string(command)}};
    const auto& keys = config::keys_for(command);
    for (const auto& [key, value] : cfg.entries()) {
        const auto spec = std::find_if(keys.begin(), keys.end(),
                                       [&](const config::KeySpec& s) { return s.name == key; });
        if (spec != keys.end() && spec->echo)
            meta.emplace_back(key, value);
    }
    return meta;
}

// front, then the entries of back whose key front does not already carry
report::Meta merge_meta(const report::Meta& front, const report::Meta& back)
{
    report::Meta out = front;
    for (const auto& entry : back)
        if (std::none_of(front.begin(), front.end(), [&](const auto& f) { return f.first == entry.first; }))
            out.push_back(entry);
    return out;
}

fs::path prepare_out(const config::RunConfig& cfg)
{
    const fs::path dir = cfg.get("out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError(fmt::format("cannot create output directory '{}'", dir.string()));
    return dir;
}

class ReportFile {
public:
    ReportFile(const fs::path& path, std::vector<fs::path>& written) : path_(path), out_(path, std::ios::trunc)
    {
        if (!out_)
            throw IoError(fmt::format("cannot write '{}'", path.string()));
        written.push_back(path);
    }
    ~ReportFile() = default;
    std::ofstream& stream() { return out_; }
    void close()
    {
        out_.close();
        if (!out_)
            throw IoError(fmt::format("write to '{}' failed", path_.string()));
    }

private:
    fs::path path_;
    std::ofstream out_;
};

std::string pair_text(Complex z)
{
    return report::number(z.real()) + ',' + report::number(z.imag());
}

std::vector<std::uint64_t> positive_list(const config::RunConfig& cfg, const std::string& key)
{
    auto values = cfg.get_u64_list(key);
    for (auto v : values)
        if (v < 1)
            throw ValidationError(ErrorKind::validation, fmt::format("{} entries must be >= 1", key));
    return values;
}

dynsys::SystemSpec parse_system(const config::RunConfig& cfg)
{
    const auto& name = cfg.get("system");
    if (name == "rotation")
        return dynsys::SystemSpec::rotation(dynsys::parse_fraction(cfg.get("alpha")));
    if (name == "doubling")
        return dynsys::SystemSpec::doubling();
    if (name == "cyclic" || name == "cyclic_shift")
        return dynsys::SystemSpec::cyclic_shift(cfg.get_u64("modulus"));
    throw ValidationError(ErrorKind::validation,
                          fmt::format("system='{}' is not rotation, doubling or cyclic", name));
}

dynsys::State parse_state(const dynsys::SystemSpec& sys, const config::RunConfig& cfg)
{
    if (sys.is_cyclic()) {
        const auto x = cfg.get_u64("x");
        if (x >= sys.modulus())
            throw ValidationError(ErrorKind::range,
                                  fmt::format("x={} must be a residue below J={}", x, sys.modulus()));
        return dynsys::State{x};
    }
    return dynsys::State{dynsys::parse_fraction(cfg.get("x")).raw};
}

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b, std::string_view what)
{
    if (b != 0 && a > UINT64_MAX / b)
        throw ValidationError(ErrorKind::range, fmt::format("{} overflows", what));
    return a * b;
}

// ---- sieve ---------------------------------------------------------------

std::uint64_t count_primes(std::uint64_t n)
{
    if (n < 2)
        return 0;
    // odd-only Eratosthenes: bit i stands for 2i+1
    std::vector<bool> composite((n + 1) / 2, false);
    std::uint64_t count = 1; // the prime 2
    for (std::uint64_t i = 1; i < composite.size(); ++i) {
        if (composite[i])
            continue;
        ++count;
        const std::uint64_t p = 2 * i + 1;
        for (std::uint64_t m = p * p; m <= n; m += 2 * p)
            composite[m / 2] = true;
    }
    return count;
}

std::vector<fs::path> cmd_sieve(const config::RunConfig& cfg, std::ostream& out, std::ostream* timing)
{
    const auto n_max = cfg.get_u64("n_max");
    if (n_max < 1 || n_max > arith::max_sieve_limit)
        throw ValidationError(ErrorKind::range,
                              fmt::format("n_max={} outside [1, 2^31]", n_max));
    const fs::path cache_dir = cfg.get("cache_dir");
    if (cache_dir.empty())
        throw ValidationError(ErrorKind::validation, "cache_dir must name a directory for sieve");
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    if (ec || !fs::is_directory(cache_dir))
        throw IoError(fmt::format("cannot create cache directory '{}'", cache_dir.string()));

    Stopwatch watch(timing, "sieve");
    const auto path = arith::sieve_cache_path(cache_dir, n_max);
    arith::SignTables tables;
    bool hit = false;
    if (cfg.get_bool("refresh")) {
        tables = arith::compute_sign_tables(n_max);
        arith::save_sieve_cache(path, tables);
    } else {
        tables = arith::load_or_compute_tables(cache_dir, n_max, &hit);
    }

    std::int64_t sum_l = 0, sum_m = 0;
    std::uint64_t squarefree = 0;
    for (std::uint64_t i = 0; i < n_max; ++i) {
        sum_l += tables.liouville[i];
        sum_m += tables.moebius[i];
        squarefree += tables.moebius[i] != 0;
    }
    out << fmt::format("N_max={} primes={} squarefree={} sum_liouville={} sum_moebius={}\n", n_max,
                       count_primes(n_max), squarefree, sum_l, sum_m);
    watch.note(hit ? "cache=hit" : "cache=miss");
    return {path};
}

// ---- avg -----------------------------------------------------------------

std::vector<fs::path> cmd_avg(const config::RunConfig& cfg, std::ostream& out, std::ostream* timing)
{
    const auto meta = echo_meta("avg", cfg);
    const auto sys = parse_system(cfg);
    const auto observables = parse_observables(cfg.get("observables"));
    const auto powers = cfg.get_i64_list("powers");
    if (powers.size() != observables.size())
        throw ValidationError(ErrorKind::length,
                              fmt::format("observables has {} entries but powers has {}",
                                          observables.size(), powers.size()));
    const double rho = cfg.get_double("rho");
    const auto x = parse_state(sys, cfg);

    std::vector<std::uint64_t> grid;
    const bool explicit_grid = !cfg.get("grid").empty();
    if (explicit_grid) {
        grid = positive_list(cfg, "grid");
    } else {
        const auto n_max = cfg.get_u64("n_max");
        if (n_max < 1)
            throw ValidationError(ErrorKind::validation, "n_max must be >= 1");
        if (!(rho > 1.0))
            throw ValidationError(ErrorKind::validation, fmt::format("rho={} must be > 1", rho));
        grid = averages::default_grid(n_max, rho);
    }
    if (grid.empty())
        throw ValidationError(ErrorKind::validation, "grid is empty");
    const auto length = *std::max_element(grid.begin(), grid.end());

    Stopwatch watch(timing, "avg");
    const auto w = load_weight(cfg, length);
    std::vector<dynsys::OrbitSequence> orbits;
    for (std::size_t i = 0; i < observables.size(); ++i)
        orbits.push_back(dynsys::orbit_observable(sys, observables[i], x, powers[i], length));
    auto series = averages::prefix_series(w, orbits, grid);
    series.meta = merge_meta(meta, series.meta);

    const auto dir = prepare_out(cfg);
    std::vector<fs::path> written;
    {
        ReportFile file(dir / "avg_series.csv", written);
        averages::write_csv(file.stream(), series);
        file.close();
    }
    if (!explicit_grid) {
        const auto diag = averages::cesaro_diagnostics(series, rho, cfg.get_u64("tail_start"));
        ReportFile file(dir / "avg_cesaro.csv", written);
        auto& s = file.stream();
        report::write_csv_meta(s, meta);
        s << "quantity,value\n"
          << "rho," << report::number(diag.rho) << '\n'
          << "tail_start," << diag.tail_start << '\n'
          << "tail_points," << diag.tail_points << '\n'
          << "lacunary_tail_sup," << report::number(diag.lacunary_tail_sup) << '\n'
          << "full_tail_sup," << report::number(diag.full_tail_sup) << '\n'
          << "gap_term_max," << report::number(diag.gap_term_max) << '\n'
          << "gap_term_last," << report::number(diag.gap_term_last) << '\n'
          << "gap_limit," << report::number(diag.gap_limit) << '\n'
          << "interpolation_violations," << diag.interpolation_violations << '\n';
        file.close();
    }
    const auto last = series.values.back();
    out << fmt::format("N={} re={} im={} abs={}\n", series.grid.back(), report::number(last.real()),
                       report::number(last.imag()), report::number(std::abs(last)));
    watch.note();
    return written;
}

// ---- finitary ------------------------------------------------------------

struct FinitaryShape {
    std::uint64_t modulus;
    std::uint64_t window;
};

FinitaryShape finitary_shape(const config::RunConfig& cfg)
{
    const auto j = cfg.get_u64("modulus");
    const auto n = cfg.get_u64("window");
    if (j < 2)
        throw ValidationError(ErrorKind::validation, fmt::format("modulus={} must be >= 2", j));
    if (n < 1 || n >= j)
        throw ValidationError(ErrorKind::window,
                              fmt::format("window={} must satisfy 1 <= N < J={}", n, j));
    return {j, n};
}

std::vector<fs::path> cmd_finitary(const config::RunConfig& cfg, std::ostream& out, std::ostream* timing)
{
    const auto meta = echo_meta("finitary", cfg);
    const auto [j, n] = finitary_shape(cfg);
    const auto trials = cfg.get_u64("trials");
    if (trials < 1)
        throw ValidationError(ErrorKind::validation, "trials must be >= 1");
    const auto seed = cfg.get_u64("seed");

    Stopwatch watch(timing, "finitary");
    const auto w = load_weight(cfg, n);
    const auto dir = prepare_out(cfg);
    std::vector<fs::path> written;
    ReportFile summary(dir / "finitary.csv", written);
    report::write_csv_meta(summary.stream(), meta);
    summary.stream() << "trial,max_abs_diff,direct_l2,fourier_l2\n";
    double worst = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto f = rng::random_sign_field(j, seed, 2 * t);
        const auto g = rng::random_sign_field(j, seed, 2 * t + 1);
        const auto direct = averages::finitary_direct(f, g, w, n);
        const auto fourier = averages::finitary_fourier(f, g, w, n);
        double diff = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            diff = std::max(diff, std::abs(direct[i] - fourier[i]));
        worst = std::max(worst, diff);
        summary.stream() << t << ',' << report::number(diff) << ','
                         << report::number(direct.norm(2.0)) << ','
                         << report::number(fourier.norm(2.0)) << '\n';
        if (t == 0) {
            ReportFile field(dir / "finitary_field.csv", written);
            report::write_csv_meta(field.stream(), meta);
            field.stream() << "j,direct_re,direct_im,fourier_re,fourier_im\n";
            for (std::size_t i = 0; i < j; ++i)
                field.stream() << i << ',' << pair_text(direct[i]) << ',' << pair_text(fourier[i])
                               << '\n';
            field.close();
        }
    }
    summary.close();
    out << fmt::format("J={} N={} trials={} max_abs_diff={}\n", j, n, trials, report::number(worst));
    watch.note();
    return written;
}

// ---- expsum --------------------------------------------------------------

std::vector<fs::path> cmd_expsum(const config::RunConfig& cfg, std::ostream& out, std::ostream* timing)
{
    const auto meta = echo_meta("expsum", cfg);
    const auto& mode = cfg.get("mode");
    Stopwatch watch(timing, "expsum " + mode);
    std::vector<fs::path> written;

    if (mode == "decay") {
        const auto ns = positive_list(cfg, "ns");
        if (ns.empty())
            throw ValidationError(ErrorKind::validation, "ns is empty");
        const auto k = cfg.get_u64("power");
        if (k < 1 || k > expsum::max_power)
            throw ValidationError(ErrorKind::range,
                                  fmt::format("power={} outside [1, {}]", k, expsum::max_power));
        const auto factor = cfg.get_u64("grid_factor");
        std::vector<std::uint64_t> grids;
        for (auto n : ns)
            grids.push_back(checked_product(n, factor, "grid_factor * N"));
        const auto w = load_weight(cfg, *std::max_element(ns.begin(), ns.end()));
        auto rep = expsum::decay_report(w, ns, static_cast<unsigned>(k), grids);
        rep.meta = merge_meta(meta, rep.meta);
        const auto dir = prepare_out(cfg);
        ReportFile file(dir / "expsum_decay.csv", written);
        expsum::write_csv(file.stream(), rep);
        file.close();
        for (const auto& row : rep.rows)
            out << fmt::format("N={} k={} G={} max_norm={}\n", row.n, row.k, row.grid_size,
                               report::number(row.max_norm));
    } else if (mode == "short") {
        const auto n = cfg.get_u64("start");
        const double eps = cfg.get_double("epsilon");
        auto m = cfg.get_u64("interval");
        if (m == 0)
            m = expsum::zhan_threshold(n, eps);
        const auto g = cfg.get_u64("grid_size");
        if (n < 1 || n > UINT64_MAX - m)
            throw ValidationError(ErrorKind::range, fmt::format("start={} out of range", n));
        const auto w = load_weight(cfg, n + m);
        const auto result = expsum::short_interval_max(w, n, m, g);
        const auto dir = prepare_out(cfg);
        ReportFile file(dir / "expsum_short.csv", written);
        report::write_csv_meta(file.stream(), meta);
        file.stream() << "N,M,G,terms,max_norm,max_norm_by_m,argmax_theta,zhan_threshold\n"
                      << n << ',' << m << ',' << g << ',' << result.terms << ','
                      << report::number(result.max_norm) << ','
                      << report::number(result.max_norm_by_m) << ','
                      << report::number(result.argmax_theta) << ','
                      << expsum::zhan_threshold(n, eps) << '\n';
        file.close();
        out << fmt::format("N={} M={} G={} max_norm={}\n", n, m, g, report::number(result.max_norm));
    } else if (mode == "spectral") {
        const auto [j, n] = finitary_shape(cfg);
        const auto w = load_weight(cfg, n);
        const auto g = rng::random_sign_field(j, cfg.get_u64("seed"), 0);
        const auto checks = expsum::spectral_norm_check_all(g, w, n);
        const auto dir = prepare_out(cfg);
        ReportFile file(dir / "expsum_spectral.csv", written);
        report::write_csv_meta(file.stream(), meta);
        file.stream() << "m,lhs,rhs,within_slack\n";
        std::size_t violations = 0;
        for (std::size_t m = 0; m < checks.size(); ++m) {
            const bool ok = checks[m].lhs <= checks[m].rhs * (1.0 + expsum::spectral_slack);
            violations += !ok;
            file.stream() << m << ',' << report::number(checks[m].lhs) << ','
                          << report::number(checks[m].rhs) << ',' << (ok ? 1 : 0) << '\n';
        }
        file.close();
        out << fmt::format("J={} N={} characters={} violations={}\n", j, n, checks.size(), violations);
    } else {
        throw ValidationError(ErrorKind::validation,
                              fmt::format("mode='{}' is not decay, short or spectral", mode));
    }
    watch.note();
    return written;
}

// ---- maximal -------------------------------------------------------------

std::vector<fs::path> cmd_maximal(const config::RunConfig& cfg, std::ostream& out, std::ostream* timing)
{
    const auto meta = echo_meta("maximal", cfg);
    const auto j = cfg.get_u64("modulus");
    const double rho = cfg.get_double("rho");
    const auto k = cfg.get_u64("blocks");
    const auto trials = cfg.get_u64("trials");
    const auto seed = cfg.get_u64("seed");
    if (j < 2)
        throw ValidationError(ErrorKind::validation, fmt::format("modulus={} must be >= 2", j));
    if (trials < 1)
        throw ValidationError(ErrorKind::validation, "trials must be >= 1");

    Stopwatch watch(timing, "maximal");
    const auto w = load_weight(cfg, j - 1);
    const auto shift = dynsys::SystemSpec::cyclic_shift(j);
    std::vector<maximal::MaximalStats> stats;
    std::ostringstream transference;
    double worst_gap = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto f = rng::random_sign_field(j, seed, 2 * t);
        const auto g = rng::random_sign_field(j, seed, 2 * t + 1);
        stats.push_back(maximal::sqrtK_ratio(f, g, w, rho, k));
        if (cfg.get_bool("transference")) {
            const auto grid = maximal::lacunary_grid(rho, j - 1);
            for (std::size_t b = 1; b <= k; ++b) {
                const auto n0 = grid.block_point(b), n1 = grid.block_point(b + 1);
                const auto check = maximal::transference_check(shift, f, g, w, rho, n0, n1);
                const double gap = std::abs(check.seq_side - check.dyn_side);
                worst_gap = std::max(worst_gap, gap);
                transference << t << ',' << b << ',' << n0 << ',' << n1 << ','
                             << report::number(check.seq_side) << ','
                             << report::number(check.dyn_side) << ',' << report::number(gap) << '\n';
            }
        }
    }

    const auto dir = prepare_out(cfg);
    std::vector<fs::path> written;
    {
        ReportFile file(dir / "maximal.csv", written);
        maximal::write_csv(file.stream(), stats, meta);
        file.close();
    }
    if (cfg.get_bool("transference")) {
        ReportFile file(dir / "transference.csv", written);
        report::write_csv_meta(file.stream(), meta);
        file.stream() << "trial,block,N0,N1,seq_side,dyn_side,abs_diff\n" << transference.str();
        file.close();
    }
    double worst_ratio = 0.0;
    for (const auto& s : stats)
        worst_ratio = std::max(worst_ratio, s.ratio);
    out << fmt::format("J={} rho={} K={} trials={} max_ratio={} transference_max_diff={}\n", j,
                       report::number(rho), k, trials, report::number(worst_ratio),
                       report::number(worst_gap));
    watch.note();
    return written;
}

// ---- kbsz ----------------------------------------------------------------

std::vector<fs::path> cmd_kbsz(const config::RunConfig& cfg, std::ostream& out, std::ostream* timing)
{
    const auto meta = echo_meta("kbsz", cfg);
    const auto grid = positive_list(cfg, "grid");
    if (grid.empty())
        throw ValidationError(ErrorKind::validation, "grid is empty");
    kbsz::CriterionOptions options;
    const auto p_min = cfg.get_u64("p_min"), p_max = cfg.get_u64("p_max");
    if (p_min > p_max || p_max > UINT32_MAX)
        throw ValidationError(ErrorKind::range,
                              fmt::format("prime window [{}, {}] is invalid", p_min, p_max));
    options.p_min = static_cast<std::uint32_t>(p_min);
    options.p_max = static_cast<std::uint32_t>(p_max);
    options.threshold = cfg.get_double("threshold");
    options.correlation_n = cfg.get_u64("correlation_n");
    const auto n_max = *std::max_element(grid.begin(), grid.end());
    const auto corr_n = options.correlation_n ? options.correlation_n : n_max;
    const auto length = std::max(n_max, checked_product(corr_n, p_max, "correlation_n * p_max"));

    Stopwatch watch(timing, "kbsz");
    const auto w = load_weight(cfg, n_max);
    const auto& sequence = cfg.get("sequence");
    kbsz::CorrelationReport rep;
    if (sequence == "commuting") {
        std::vector<dynsys::SystemSpec> systems;
        for (const auto& a : cfg.get_list("alphas", ';'))
            systems.push_back(dynsys::SystemSpec::rotation(dynsys::parse_fraction(a)));
        const auto observables = parse_observables(cfg.get("observables"));
        const dynsys::State x{dynsys::parse_fraction(cfg.get("x")).raw};
        rep = kbsz::commuting_experiment(systems, observables, x, w, grid, options);
    } else {
        std::vector<Complex> values;
        std::string descriptor;
        if (sequence == "liouville") {
            auto lcfg = cfg;
            lcfg.set("weight", "liouville");
            const auto signs = load_weight(lcfg, length);
            values = signs.values(length);
            descriptor = "liouville";
        } else if (sequence == "one") {
            values.assign(length, 1.0);
            descriptor = "one";
        } else if (sequence == "product") {
            const auto sys = dynsys::SystemSpec::rotation(dynsys::parse_fraction(cfg.get("alpha")));
            const auto observables = parse_observables(cfg.get("observables"));
            const auto powers = cfg.get_i64_list("powers");
            const dynsys::State x{dynsys::parse_fraction(cfg.get("x")).raw};
            values = kbsz::product_observable(sys, observables, powers, x, length);
            descriptor = "product " + sys.description();
            for (std::size_t i = 0; i < observables.size(); ++i)
                descriptor += fmt::format(" {}@{}", observables[i].describe(), powers[i]);
        } else {
            throw ValidationError(ErrorKind::validation,
                                  fmt::format("sequence='{}' is not liouville, one, product or commuting",
                                              sequence));
        }
        rep = kbsz::criterion_report(values, descriptor, w, grid, options);
    }
    rep.config.assign(meta.begin(), meta.end());

    const auto dir = prepare_out(cfg);
    std::vector<fs::path> written;
    ReportFile file(dir / "kbsz.json", written);
    kbsz::write_json(file.stream(), rep);
    file.close();
    out << fmt::format("primes={} max_offdiagonal={} hypothesis_plausible={} |w(N)|={}\n",
                       rep.primes.size(), report::number(rep.max_offdiagonal),
                       rep.hypothesis_plausible, report::number(std::abs(rep.weighted.back())));
    watch.note();
    return written;
}

// ---- argument handling -----------------------------------------------------

struct Subcommand {
    CLI::App* app = nullptr;
    std::string config_file;
    bool dump_config = false;
    bool timing = false;
    std::map<std::string, std::string> flags;
};

int report_error(std::ostream& err, int code, const std::string& message)
{
    err << "ewlab: " << message << '\n';
    return code;
}

} // namespace

arith::WeightSequence load_weight(const config::RunConfig& cfg, std::uint64_t n_needed)
{
    const auto& name = cfg.get("weight");
    if (n_needed < 1)
        n_needed = 1;
    if (name == "zero")
        return arith::WeightSequence::custom(std::vector<Complex>(n_needed, 0.0));
    if (name == "custom") {
        const fs::path path = cfg.get("weight_file");
        std::ifstream in(path);
        if (path.empty() || !in)
            throw IoError(fmt::format("cannot read weight_file '{}'", path.string()));
        std::vector<Complex> values;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line.front() == '#')
                continue;
            std::istringstream fields(line);
            fields.imbue(std::locale::classic());
            double re = 0.0, im = 0.0;
            if (!(fields >> re))
                throw ValidationError(ErrorKind::validation,
                                      fmt::format("weight_file line {} is not a number", values.size() + 1));
            fields >> im;
            values.emplace_back(re, im);
        }
        if (values.size() < n_needed)
            throw ValidationError(ErrorKind::range,
                                  fmt::format("weight_file holds {} values, {} needed", values.size(),
                                              n_needed));
        return arith::WeightSequence::custom(std::move(values));
    }
    const auto kind = arith::parse_weight_kind(name);
    if (kind == arith::WeightKind::constant_one)
        return arith::WeightSequence::constant_one(n_needed);
    if (n_needed > arith::max_sieve_limit)
        throw ValidationError(ErrorKind::range,
                              fmt::format("N={} exceeds the sieve limit 2^31", n_needed));
    const fs::path cache = cfg.has("cache_dir") ? fs::path(cfg.get("cache_dir")) : fs::path();
    const auto tables = arith::load_or_compute_tables(cache, n_needed);
    return arith::weight_table(tables, kind, n_needed);
}

dynsys::Observable parse_observable(std::string_view text)
{
    const auto colon = text.find(':');
    const auto tag = text.substr(0, colon);
    const auto rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    auto bad = [&](std::string_view why) {
        return ValidationError(ErrorKind::validation,
                               fmt::format("observable '{}': {}", text, why));
    };
    if (tag == "character") {
        std::int64_t k = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
        if (ec != std::errc() || ptr != rest.data() + rest.size() || rest.empty())
            throw bad("expected character:k with integer k");
        return dynsys::Observable::character(k);
    }
    if (tag == "indicator") {
        const auto sep = rest.find(':');
        if (sep == std::string_view::npos)
            throw bad("expected indicator:left:right");
        return dynsys::Observable::interval_indicator(dynsys::parse_fraction(rest.substr(0, sep)),
                                                      dynsys::parse_fraction(rest.substr(sep + 1)));
    }
    if (tag == "table") {
        std::vector<Complex> values;
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto end = std::min(rest.find(',', start), rest.size());
            const std::string item(rest.substr(start, end - start));
            const auto part = item.find(':');
            try {
                std::size_t used = 0;
                const double re = std::stod(item.substr(0, part), &used);
                double im = 0.0;
                if (part != std::string::npos)
                    im = std::stod(item.substr(part + 1));
                values.emplace_back(re, im);
            } catch (const std::logic_error&) {
                throw bad(fmt::format("table entry '{}' is not re or re:im", item));
            }
            start = end + 1;
        }
        return dynsys::Observable::table(std::move(values));
    }
    throw bad("expected character:k, indicator:l:r or table:v0,v1,...");
}

std::vector<dynsys::Observable> parse_observables(std::string_view text)
{
    std::vector<dynsys::Observable> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(';', start), text.size());
        const auto item = text.substr(start, end - start);
        if (!item.empty())
            out.push_back(parse_observable(item));
        start = end + 1;
    }
    if (out.empty())
        throw ValidationError(ErrorKind::validation, "observables is empty");
    return out;
}

std::vector<fs::path> run_command(std::string_view command, const config::RunConfig& resolved,
                                  std::ostream& out, std::ostream* timing)
{
    if (command == "sieve")
        return cmd_sieve(resolved, out, timing);
    if (command == "avg")
        return cmd_avg(resolved, out, timing);
    if (command == "finitary")
        return cmd_finitary(resolved, out, timing);
    if (command == "expsum")
        return cmd_expsum(resolved, out, timing);
    if (command == "maximal")
        return cmd_maximal(resolved, out, timing);
    if (command == "kbsz")
        return cmd_kbsz(resolved, out, timing);
    throw ValidationError(ErrorKind::validation, fmt::format("unknown command '{}'", command));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"ewlab: weighted ergodic averages laboratory", "ewlab"};
    app.set_version_flag("--version", std::string(report::tool_version));
    app.require_subcommand(0, 1);

    std::string assert_name;
    std::string assert_out = "ewlab-acceptance";
    std::uint64_t assert_seed = 1;
    bool top_timing = false;
    app.add_option("--assert", assert_name, "run acceptance criterion NAME, its number, or 'all'");
    auto* top_out = app.add_option("--out", assert_out, "output directory");
    app.add_option("--seed", assert_seed, "seed for --assert runs");
    app.add_flag("--timing", top_timing, "print wall-clock timings to stderr");

    std::map<std::string, Subcommand> subs;
    for (const auto& name : config::commands()) {
        auto& sub = subs[name];
        sub.app = app.add_subcommand(name, fmt::format("run {}", name));
        sub.app->add_option("--config", sub.config_file, "key = value config file");
        sub.app->add_flag("--dump-config", sub.dump_config, "print the resolved config and exit");
        sub.app->add_flag("--timing", sub.timing, "print wall-clock timings to stderr");
        for (const auto& spec : config::keys_for(name))
            sub.app->add_option("--" + spec.name, sub.flags[spec.name], spec.help);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        for (const auto& [name, sub] : subs)
            if (sub.app->parsed()) {
                out << sub.app->help();
                return exit_ok;
            }
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << report::tool_name << ' ' << report::tool_version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        return report_error(err, exit_validation, fmt::format("validation error: {}", e.what()));
    }

    try {
        if (!assert_name.empty()) {
            if (!app.get_subcommands().empty())
                throw ValidationError(ErrorKind::validation, "--assert cannot be combined with a subcommand");
            acceptance::Options options;
            options.seed = assert_seed;
            options.out_dir = assert_out;
            const auto results = acceptance::run_selected(assert_name, options);
            bool all_passed = true;
            for (const auto& r : results) {
                out << acceptance::format_line(r) << '\n';
                all_passed = all_passed && r.passed;
            }
            return all_passed ? exit_ok : exit_acceptance;
        }
        if (app.get_subcommands().empty()) {
            out << app.help();
            return exit_validation;
        }
        const auto name = app.get_subcommands().front()->get_name();
        auto& sub = subs.at(name);
        config::RunConfig user;
        if (!sub.config_file.empty())
            user = config::RunConfig::load(sub.config_file);
        if (top_out->count() > 0)
            user.set("out", assert_out);
        for (const auto& spec : config::keys_for(name))
            if (sub.app->get_option("--" + spec.name)->count() > 0)
                user.set(spec.name, sub.flags[spec.name]);
        const auto resolved = config::resolve(name, user);
        if (sub.dump_config) {
            out << resolved.to_text();
            return exit_ok;
        }
        run_command(name, resolved, out, (sub.timing || top_timing) ? &err : nullptr);
        return exit_ok;
    } catch (const ValidationError& e) {
        return report_error(err, exit_validation, e.what());
    } catch (const IoError& e) {
        return report_error(err, exit_io, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return report_error(err, exit_io, fmt::format("I/O error: {}", e.what()));
    } catch (const std::bad_alloc&) {
        return report_error(err, exit_validation, "validation error: parameters too large for memory");
    }
}

} // namespace ewlab::cli
