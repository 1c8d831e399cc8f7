#pragma once

// Acceptance criteria, each runnable on its own through `ewlab --assert NAME`.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ewlab::acceptance {

struct Criterion {
    int id = 0;
    std::string name;
    std::string summary;
    double time_limit = 0.0; // seconds, 0 for none
};

const std::vector<Criterion>& criteria();

struct Options {
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "ewlab-acceptance";
};

struct Result {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    std::filesystem::path report; // deterministic report file (no timings)
};

Result run(const Criterion& criterion, const Options& options);

// selector: "all", a criterion name, or its number.
std::vector<Result> run_selected(std::string_view selector, const Options& options);

// "PASS  3 finitary_fourier: ... (1.23 s)"
std::string format_line(const Result& result);

} // namespace ewlab::acceptance
