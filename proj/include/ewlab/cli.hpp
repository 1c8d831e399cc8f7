#pragma once

// Command-line front end: subcommands sieve, avg, finitary, expsum, maximal,
// kbsz, plus --assert for the acceptance criteria.

#include "ewlab/arith.hpp"
#include "ewlab/config.hpp"
#include "ewlab/dynsys.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ewlab::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 2,
    exit_io = 3,
    exit_acceptance = 4,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs one subcommand on a resolved config; returns the report files written.
// Throws ValidationError / IoError. timing may be null.
std::vector<std::filesystem::path> run_command(std::string_view command,
                                               const config::RunConfig& resolved,
                                               std::ostream& out, std::ostream* timing);

// Helpers shared with the acceptance suite and tests.
arith::WeightSequence load_weight(const config::RunConfig& cfg, std::uint64_t n_needed);
dynsys::Observable parse_observable(std::string_view text);
std::vector<dynsys::Observable> parse_observables(std::string_view text);

} // namespace ewlab::cli
