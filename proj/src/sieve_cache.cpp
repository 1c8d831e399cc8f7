#include "ewlab/arith.hpp"

#include "ewlab/error.hpp"

#include <array>
#include <fstream>
#include <system_error>

namespace ewlab::arith {

namespace {

constexpr std::array<char, 4> cache_magic{'E', 'W', 'L', '1'};
constexpr std::uint64_t header_bytes = 4 + 8;

void put_u64_le(std::ostream& out, std::uint64_t v)
{
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64_le(const std::array<unsigned char, 8>& bytes)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | bytes[i];
    return v;
}

} // namespace

std::filesystem::path sieve_cache_path(const std::filesystem::path& dir, std::uint64_t n_max)
{
    return dir / ("sieve_" + std::to_string(n_max) + ".ewl");
}

void save_sieve_cache(const std::filesystem::path& path, const SignTables& tables)
{
    if (tables.liouville.size() != tables.limit || tables.moebius.size() != tables.limit)
        throw ValidationError(ErrorKind::length, "sign tables do not match their limit");

    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);

    // write to a sibling and rename, so a crashed run never leaves a torn cache
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open sieve cache '" + tmp.string() + "' for writing");
        out.write(cache_magic.data(), cache_magic.size());
        put_u64_le(out, tables.limit);
        out.write(reinterpret_cast<const char*>(tables.liouville.data()),
                  static_cast<std::streamsize>(tables.limit));
        out.write(reinterpret_cast<const char*>(tables.moebius.data()),
                  static_cast<std::streamsize>(tables.limit));
        if (!out)
            throw IoError("short write to sieve cache '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move sieve cache into place at '" + path.string() +
                      "': " + ec.message());
}

SignTables load_sieve_cache(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open sieve cache '" + path.string() + "'");

    std::array<char, 4> magic{};
    std::array<unsigned char, 8> len{};
    in.read(magic.data(), magic.size());
    in.read(reinterpret_cast<char*>(len.data()), len.size());
    if (!in || magic != cache_magic)
        throw IoError("sieve cache '" + path.string() + "' has a bad magic/header");

    const std::uint64_t n_max = get_u64_le(len);
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    if (ec || n_max < 1 || n_max > max_sieve_limit || file_size != header_bytes + 2 * n_max)
        throw IoError("sieve cache '" + path.string() + "' length does not match N_max=" +
                      std::to_string(n_max));

    SignTables tables;
    tables.limit = n_max;
    tables.liouville.resize(n_max);
    tables.moebius.resize(n_max);
    in.read(reinterpret_cast<char*>(tables.liouville.data()), static_cast<std::streamsize>(n_max));
    in.read(reinterpret_cast<char*>(tables.moebius.data()), static_cast<std::streamsize>(n_max));
    if (!in)
        throw IoError("short read from sieve cache '" + path.string() + "'");
    return tables;
}

SignTables load_or_compute_tables(const std::filesystem::path& dir, std::uint64_t n_max,
                                  bool* cache_hit)
{
    if (cache_hit)
        *cache_hit = false;
    if (dir.empty())
        return compute_sign_tables(n_max);

    const auto path = sieve_cache_path(dir, n_max);
    if (std::filesystem::exists(path)) {
        try {
            SignTables tables = load_sieve_cache(path);
            if (tables.limit == n_max) {
                if (cache_hit)
                    *cache_hit = true;
                return tables;
            }
        } catch (const IoError&) {
            // stale or corrupt: rebuild below
        }
    }
    SignTables tables = compute_sign_tables(n_max);
    save_sieve_cache(path, tables);
    return tables;
}

} // namespace ewlab::arith
