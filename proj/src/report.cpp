#include "ewlab/report.hpp"

#include <fmt/format.h>

namespace ewlab::report {

std::string number(double v)
{
    if (v == 0.0)
        return "0"; // folds -0
    return fmt::format("{}", v);
}

void write_csv_meta(std::ostream& out, const Meta& meta)
{
    out << "# schema_version=" << schema_version << ";tool=" << tool_name << ' ' << tool_version;
    for (const auto& [key, value] : meta) {
        std::string clean = value;
        for (char& c : clean)
            if (c == ';' || c == '\n' || c == '\r')
                c = ',';
        out << ';' << key << '=' << clean;
    }
    out << '\n';
}

} // namespace ewlab::report
