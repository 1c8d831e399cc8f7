#include "ewlab/config.hpp"

#include "ewlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace ewlab::config {

namespace {

std::string trim(std::string_view s)
{
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool valid_key(std::string_view key)
{
    return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

ValidationError bad_value(const std::string& key, const std::string& text, std::string_view expected)
{
    return ValidationError(ErrorKind::validation,
                           fmt::format("{}='{}' is not {}", key, text, expected));
}

template <class T>
T parse_integer(const std::string& key, const std::string& text)
{
    T value{};
    const auto s = trim(text);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw bad_value(key, text, "an integer in range");
    return value;
}

const std::vector<KeySpec> common_keys{
    {"seed", "1", "64-bit seed of the counter-based generator"},
    {"out", ".", "output directory", false},
    {"cache_dir", "", "sieve cache directory (empty disables)", false},
};

const std::vector<KeySpec> weight_keys{
    {"weight", "liouville", "liouville | moebius | one | zero | custom"},
    {"weight_file", "", "custom weights, one 're im' pair per line (weight=custom)"},
};

std::vector<KeySpec> join(std::initializer_list<std::vector<KeySpec>> parts)
{
    std::vector<KeySpec> out;
    for (const auto& p : parts)
        out.insert(out.end(), p.begin(), p.end());
    return out;
}

const std::map<std::string, std::vector<KeySpec>, std::less<>>& table()
{
    static const std::map<std::string, std::vector<KeySpec>, std::less<>> specs{
        {"sieve", join({{
                            {"out", ".", "output directory", false},
                            {"cache_dir", "ewlab-cache", "sieve cache directory", false},
                            {"n_max", "1000000", "sieve limit N_max"},
                            {"refresh", "false", "rebuild the cache even if present"},
                        }})},
        {"avg", join({common_keys, weight_keys,
                      {
                          {"n_max", "1000000", "largest N of the series"},
                          {"system", "rotation", "rotation | doubling | cyclic"},
                          {"alpha", "golden", "rotation angle: golden, sqrt2, p/q or decimal"},
                          {"modulus", "64", "J for system=cyclic"},
                          {"observables", "character:1;character:1",
                           "';'-separated: character:k | indicator:l:r | table:v0,v1,..."},
                          {"powers", "1,2", "power a_j per observable"},
                          {"x", "0", "start point: fraction for circle systems, residue for cyclic"},
                          {"rho", "1.1", "lacunary ratio for the grid and diagnostics"},
                          {"grid", "", "explicit ascending N list (empty: dyadic and I_rho)"},
                          {"tail_start", "0", "first N of the diagnostic tail (0: sqrt(n_max))"},
                      }})},
        {"finitary", join({common_keys, weight_keys,
                           {
                               {"modulus", "1024", "J"},
                               {"window", "256", "N, 1 <= N < J"},
                               {"trials", "100", "random +-1 field pairs"},
                           }})},
        {"expsum", join({common_keys, weight_keys,
                         {
                             {"mode", "decay", "decay | short | spectral"},
                             {"power", "1", "k in n^k (decay mode)"},
                             {"ns", "4096,65536,1048576", "N values (decay mode)"},
                             {"grid_factor", "4", "G = grid_factor * N (decay mode)"},
                             {"start", "1000000", "interval start N (short mode)"},
                             {"interval", "0", "interval length M (0: ceil(N^(5/8+epsilon)))"},
                             {"epsilon", "0.075", "epsilon in the 5/8 + epsilon threshold"},
                             {"grid_size", "1048576", "G (short mode)"},
                             {"modulus", "1024", "J (spectral mode)"},
                             {"window", "256", "N (spectral mode)"},
                         }})},
        {"maximal", join({common_keys, weight_keys,
                          {
                              {"modulus", "4096", "J"},
                              {"rho", "2", "lacunary ratio"},
                              {"blocks", "8", "K"},
                              {"trials", "20", "random +-1 field pairs"},
                              {"transference", "true", "also run the transference check per block"},
                          }})},
        {"kbsz", join({common_keys, weight_keys,
                       {
                           {"sequence", "product",
                            "liouville | one | product | commuting"},
                           {"alpha", "golden", "rotation angle (product)"},
                           {"alphas", "golden;sqrt2", "';'-separated angles (commuting)"},
                           {"observables", "character:1",
                            "';'-separated observables (product, commuting)"},
                           {"powers", "1", "distinct positive powers (product)"},
                           {"x", "0", "start point"},
                           {"grid", "1000,10000,100000", "N grid of weighted averages"},
                           {"p_min", "11", "smallest prime of the window"},
                           {"p_max", "97", "largest prime of the window"},
                           {"threshold", "0.1", "hypothesis-plausible threshold"},
                           {"correlation_n", "10000", "N of the correlation matrix (0: last grid N)"},
                       }})},
    };
    return specs;
}

} // namespace

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> names{"sieve", "avg", "finitary", "expsum", "maximal", "kbsz"};
    return names;
}

const std::vector<KeySpec>& keys_for(std::string_view command)
{
    const auto& specs = table();
    const auto it = specs.find(command);
    if (it == specs.end())
        throw ValidationError(ErrorKind::validation, fmt::format("unknown command '{}'", command));
    return it->second;
}

RunConfig RunConfig::parse(std::string_view text)
{
    RunConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto content = trim(line);
        if (content.empty() || content.front() == '#')
            continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw ValidationError(ErrorKind::validation,
                                  fmt::format("config line {}: expected 'key = value'", lineno));
        config.set(trim(std::string_view(content).substr(0, eq)),
                   trim(std::string_view(content).substr(eq + 1)));
    }
    return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string RunConfig::to_text() const
{
    std::string text;
    for (const auto& [key, value] : entries_)
        text += key + " = " + value + "\n";
    return text;
}

void RunConfig::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot write config file '" + path.string() + "'");
    out << to_text();
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    if (!valid_key(key))
        throw ValidationError(ErrorKind::validation, fmt::format("invalid config key '{}'", key));
    if (value.find('\n') != std::string::npos || value != trim(value))
        throw ValidationError(ErrorKind::validation,
                              fmt::format("config value for '{}' has surrounding blanks or a newline", key));
    entries_[key] = value;
}

const std::string& RunConfig::get(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw ValidationError(ErrorKind::validation, fmt::format("missing config key '{}'", key));
    return it->second;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const
{
    return parse_integer<std::uint64_t>(key, get(key));
}

std::int64_t RunConfig::get_i64(const std::string& key) const
{
    return parse_integer<std::int64_t>(key, get(key));
}

double RunConfig::get_double(const std::string& key) const
{
    const auto& text = get(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size())
            return v;
    } catch (const std::logic_error&) {
    }
    throw bad_value(key, text, "a real number");
}

bool RunConfig::get_bool(const std::string& key) const
{
    const auto& text = get(key);
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    throw bad_value(key, text, "a boolean (true/false)");
}

std::vector<std::string> RunConfig::get_list(const std::string& key, char separator) const
{
    std::vector<std::string> items;
    const auto& text = get(key);
    if (text.empty())
        return items;
    std::size_t start = 0;
    while (true) {
        const auto end = text.find(separator, start);
        items.push_back(trim(std::string_view(text).substr(start, end - start)));
        if (end == std::string::npos)
            break;
        start = end + 1;
    }
    return items;
}

std::vector<std::uint64_t> RunConfig::get_u64_list(const std::string& key) const
{
    std::vector<std::uint64_t> out;
    for (const auto& item : get_list(key, ','))
        out.push_back(parse_integer<std::uint64_t>(key, item));
    return out;
}

std::vector<std::int64_t> RunConfig::get_i64_list(const std::string& key) const
{
    std::vector<std::int64_t> out;
    for (const auto& item : get_list(key, ','))
        out.push_back(parse_integer<std::int64_t>(key, item));
    return out;
}

RunConfig resolve(std::string_view command, const RunConfig& user)
{
    const auto& keys = keys_for(command);
    RunConfig resolved;
    for (const auto& spec : keys)
        resolved.set(spec.name, spec.default_value);
    for (const auto& [key, value] : user.entries()) {
        const bool known = std::any_of(keys.begin(), keys.end(),
                                       [&](const KeySpec& s) { return s.name == key; });
        if (!known)
            throw ValidationError(ErrorKind::validation,
                                  fmt::format("unknown key '{}' for command '{}'", key, command));
        resolved.set(key, value);
    }
    return resolved;
}

} // namespace ewlab::config
