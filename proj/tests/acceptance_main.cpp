// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include "ewlab/acceptance.hpp"

#include <exception>
#include <iostream>

int main(int argc, char** argv)
{
    ewlab::acceptance::Options options;
    if (argc > 1)
        options.out_dir = argv[1];
    bool all_passed = true;
    for (const auto& criterion : ewlab::acceptance::criteria()) {
        ewlab::acceptance::Result result;
        try {
            result = ewlab::acceptance::run(criterion, options);
        } catch (const std::exception& e) {
            result.id = criterion.id;
            result.name = criterion.name;
            result.detail = std::string("error: ") + e.what();
        }
        std::cout << ewlab::acceptance::format_line(result) << std::endl;
        all_passed = all_passed && result.passed;
    }
    return all_passed ? 0 : 1;
}
