#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "error.hpp"
#include "figures.hpp"

namespace bcrb {

/// Nine significant digits, '.' decimal point, "nan"/"inf" for non-finite values.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.9g", v);
    return buffer;
}

/**
 * Metadata as `# key: value` lines, then one header row `name [unit],...`,
 * then the data rows. Lines end in LF only.
 */
inline void write_csv(std::ostream& out, const FigureDataset& ds) {
    for (const auto& c : ds.columns) {
        if (c.values.size() != ds.rows()) {
            throw domain_error("write_csv: column '" + c.name + "' has a different length");
        }
    }
    for (const auto& [key, value] : ds.metadata) {
        out << "# " << key << ": " << value << '\n';
    }
    for (std::size_t j = 0; j < ds.columns.size(); ++j) {
        out << (j ? "," : "") << ds.columns[j].name << " [" << ds.columns[j].unit << ']';
    }
    out << '\n';
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.columns.size(); ++j) {
            out << (j ? "," : "") << format_number(ds.columns[j].values[i]);
        }
        out << '\n';
    }
}

inline std::string to_csv(const FigureDataset& ds) {
    std::ostringstream out;
    write_csv(out, ds);
    return out.str();
}

} // namespace bcrb
