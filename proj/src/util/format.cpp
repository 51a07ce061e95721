#include "util/format.hpp"

#include <cstdio>
#include <stdexcept>

namespace ptn {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), ncols_(header.size()) {
    raw_row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt17(v));
    raw_row(cells);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_)
        throw std::runtime_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        os_ << cells[i];
    }
    os_ << '\n';
}

} // namespace ptn
